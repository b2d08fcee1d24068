"""Straight-line programs: text format, import into a store, export, LCE."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from .editor import EditDelta, merge_pow
from .encoder import Encoding, RangeError, encode_into, lce_backward, lce_forward, uniq_pow
from .grammar_store import Char, Pair, RunOf
from .lcp_parse import DEFAULT_PARAMS, ParserParams


class SlpFormatError(ValueError):
    pass


@dataclass
class Slp:
    rules: Dict[int, object]
    start: int
    # filled by export: signature -> variable naming it, and the rules it owns
    origin: Dict[int, int] = field(default_factory=dict, compare=False)
    owned: Dict[int, List[int]] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        validate(self)

    def expand(self, var: Optional[int] = None) -> str:
        """Naive expansion; memoized per call."""
        memo: Dict[int, str] = {}
        for i in sorted(self.rules):
            r = self.rules[i]
            memo[i] = chr(r.code) if isinstance(r, Char) else memo[r.left] + memo[r.right]
        return memo[self.start if var is None else var]

    def lengths(self) -> Dict[int, int]:
        out: Dict[int, int] = {}
        for i in sorted(self.rules):
            r = self.rules[i]
            out[i] = 1 if isinstance(r, Char) else out[r.left] + out[r.right]
        return out


def validate(slp: Slp) -> None:
    if not slp.rules:
        raise SlpFormatError("no rules")
    for i, r in slp.rules.items():
        if isinstance(r, Char):
            if r.code < 0:
                raise SlpFormatError(f"variable {i}: negative code point")
        elif isinstance(r, Pair):
            for c in r:
                if c not in slp.rules:
                    raise SlpFormatError(f"variable {i} refers to unknown variable {c}")
                if c >= i:
                    raise SlpFormatError(f"variable {i} refers forward to {c}")
        else:
            raise SlpFormatError(f"variable {i}: bad rule {r!r}")
    if slp.start not in slp.rules:
        raise SlpFormatError(f"start variable {slp.start} is not defined")


def parse_slp(text: str) -> Slp:
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    if not lines or lines[0] != "SLP 1":
        raise SlpFormatError("missing 'SLP 1' header")
    if len(lines) < 2 or not lines[1].startswith("S "):
        raise SlpFormatError("missing start line")
    try:
        start = int(lines[1][2:])
    except ValueError:
        raise SlpFormatError("bad start line") from None
    rules: Dict[int, object] = {}
    last = 0
    for no, line in enumerate(lines[2:], 3):
        parts = line.split(" ")
        try:
            i = int(parts[0])
            if parts[1] == "C" and len(parts) == 3:
                r = Char(int(parts[2]))
            elif parts[1] == "P" and len(parts) == 4:
                r = Pair(int(parts[2]), int(parts[3]))
            else:
                raise ValueError
        except (ValueError, IndexError):
            raise SlpFormatError(f"line {no}: cannot parse {line!r}") from None
        if i in rules:
            raise SlpFormatError(f"line {no}: duplicate rule for {i}")
        if i <= last:
            raise SlpFormatError(f"line {no}: ids must ascend")
        rules[i] = r
        last = i
    return Slp(rules, start)


def serialize_slp(slp: Slp) -> str:
    out = ["SLP 1", f"S {slp.start}"]
    for i in sorted(slp.rules):
        r = slp.rules[i]
        if isinstance(r, Char):
            out.append(f"{i} C {r.code}")
        else:
            out.append(f"{i} P {r.left} {r.right}")
    return "\n".join(out) + "\n"


# -- import -------------------------------------------------------------------


def import_slp(slp: Slp, params: ParserParams = DEFAULT_PARAMS) -> Tuple[Encoding, Dict[int, int]]:
    """Encode every variable into one store.

    Each mapped signature is pinned; ``release_mapping`` drops those pins.
    """
    enc = Encoding(params=params)
    store = enc.store
    mapping: Dict[int, int] = {}
    for i in sorted(slp.rules):
        r = slp.rules[i]
        if isinstance(r, Char):
            sig = encode_into(store, chr(r.code), params)
        else:
            a, b = mapping[r.left], mapping[r.right]
            pieces = [uniq_pow(enc, a, 1, store.len_of(a)), uniq_pow(enc, b, 1, store.len_of(b))]
            sig = merge_pow(enc, pieces)[0]
        store.pin(sig)
        mapping[i] = sig
    enc.set_start(mapping[slp.start])
    return enc, mapping


def release_mapping(enc: Encoding, mapping: Dict[int, int]) -> None:
    for sig in mapping.values():
        enc.store.release(sig)
    enc.store.gc()


# -- export -------------------------------------------------------------------


def _reachable(enc: Encoding) -> List[int]:
    store = enc.store
    seen = {enc.start}
    stack = [enc.start]
    while stack:
        x = store.assgn(stack.pop())
        kids = (x.left, x.right) if isinstance(x, Pair) else (x.base,) if isinstance(x, RunOf) else ()
        for c in kids:
            if c not in seen:
                seen.add(c)
                stack.append(c)
    return sorted(seen)


def _translate(enc: Encoding, sig: int, rules: Dict[int, object], origin: Dict[int, int],
               owned: Dict[int, List[int]], next_id: int) -> int:
    store = enc.store
    x = store.assgn(sig)
    mine: List[int] = []

    def new(rule) -> int:
        nonlocal next_id
        rules[next_id] = rule
        mine.append(next_id)
        next_id += 1
        return next_id - 1

    if isinstance(x, Char):
        origin[sig] = new(Char(x.code))
    elif isinstance(x, Pair):
        origin[sig] = new(Pair(origin[x.left], origin[x.right]))
    else:
        base, k = origin[x.base], x.exp
        if k == 1:
            origin[sig] = base
        else:
            # squarings for every bit position, then the set bits joined
            powers = [base]
            for _ in range(k.bit_length() - 1):
                powers.append(new(Pair(powers[-1], powers[-1])))
            acc = None
            for bit in range(k.bit_length() - 1, -1, -1):
                if k >> bit & 1:
                    acc = powers[bit] if acc is None else new(Pair(acc, powers[bit]))
            origin[sig] = acc
    owned[sig] = mine
    return next_id


def export_slp(enc: Encoding) -> Slp:
    if enc.start is None:
        raise ValueError("cannot export an empty encoding")
    rules: Dict[int, object] = {}
    origin: Dict[int, int] = {}
    owned: Dict[int, List[int]] = {}
    nid = 1
    for sig in _reachable(enc):
        nid = _translate(enc, sig, rules, origin, owned, nid)
    slp = Slp(rules, origin[enc.start])
    slp.origin, slp.owned = origin, owned
    return slp


def export_delta(enc: Encoding, delta: EditDelta, slp: Slp) -> Slp:
    """Patch a previous export after an edit described by ``delta``."""
    if enc.start is None:
        raise ValueError("cannot export an empty encoding")
    rules = dict(slp.rules)
    origin = dict(slp.origin)
    owned = {k: list(v) for k, v in slp.owned.items()}
    for sig in delta.removed:
        if sig not in owned:
            raise SlpFormatError(f"removed signature {sig} is not part of the previous export")
        for v in owned.pop(sig):
            del rules[v]
        del origin[sig]
    nid = max(rules, default=0) + 1
    for sig in delta.added:
        if sig in origin:
            raise SlpFormatError(f"added signature {sig} is already exported")
        nid = _translate(enc, sig, rules, origin, owned, nid)
    if enc.start not in origin:
        raise SlpFormatError("start signature missing from the patched export")
    out = Slp(rules, origin[enc.start])
    out.origin, out.owned = origin, owned
    return out


def canonical_form(slp: Slp, table: Optional[Dict[tuple, int]] = None) -> frozenset:
    """Rules reachable from the start, variables renamed by structure.

    Pass the same ``table`` when comparing several programs.
    """
    key: Dict[int, int] = {}
    if table is None:
        table = {}
    for i in sorted(slp.rules):
        r = slp.rules[i]
        t = ("C", r.code) if isinstance(r, Char) else ("P", key[r.left], key[r.right])
        key[i] = table.setdefault(t, len(table))
    reach = set()
    stack = [slp.start]
    while stack:
        v = stack.pop()
        if v in reach:
            continue
        reach.add(v)
        r = slp.rules[v]
        if isinstance(r, Pair):
            stack.extend(r)
    return frozenset(key[v] for v in reach) | {("start", key[slp.start])}


# -- LCE over variables ---------------------------------------------------------


def slp_lce(enc: Encoding, mapping: Dict[int, int], xi: int, xj: int, a: int, b: int,
            backward: bool = False) -> int:
    try:
        e1, e2 = mapping[xi], mapping[xj]
    except KeyError as exc:
        raise RangeError(f"unknown variable {exc.args[0]}") from None
    if backward:
        return lce_backward(enc, e1, e2, a, b)
    return lce_forward(enc, e1, e2, a, b)


def slp_lcp(enc: Encoding, mapping: Dict[int, int], xi: int, xj: int) -> int:
    return slp_lce(enc, mapping, xi, xj, 1, 1)


def slp_lcs(enc: Encoding, mapping: Dict[int, int], xi: int, xj: int) -> int:
    e1, e2 = mapping[xi], mapping[xj]
    return lce_backward(enc, e1, e2, enc.store.len_of(e1), enc.store.len_of(e2))
