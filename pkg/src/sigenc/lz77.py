"""Greedy LZ77 over an encoding, and encodings built back from factors."""

from __future__ import annotations

from typing import Dict, Iterable, List, NamedTuple, Optional, Union

from .editor import insert_copy, insert_str
from .encoder import Encoding, RangeError, encode_string, extract
from .grammar_store import Char, Pair
from .index import INF, Index, PatternHandle, build_index, left_part, pattern_ranges, split_positions
from .lcp_parse import DEFAULT_PARAMS, ParserParams


class FactorFormatError(ValueError):
    pass


class Literal(NamedTuple):
    char: str


class Ref(NamedTuple):
    pos: int
    length: int


Factor = Union[Literal, Ref]


class WeightMap:
    """Leftmost start of every node and the derived point weights."""

    def __init__(self, minpos: Dict[int, int], weights: Dict[int, int]):
        self.minpos = minpos
        self.weights = weights

    def __getitem__(self, e):
        return self.weights[e]

    def get(self, e, default=None):
        return self.weights.get(e, default)


def compute_weights(enc: Encoding) -> WeightMap:
    store = enc.store
    minpos: Dict[int, int] = {}
    weights: Dict[int, int] = {}
    if enc.start is None:
        return WeightMap(minpos, weights)
    minpos[enc.start] = 1
    # parents always carry larger ids, so one pass in decreasing order works
    for e in sorted(store.signatures(), reverse=True):
        v = minpos.get(e)
        if v is None:
            continue
        x = store.assgn(e)
        if isinstance(x, Char):
            continue
        if isinstance(x, Pair):
            _lower(minpos, x.left, v)
            _lower(minpos, x.right, v + store.len_of(x.left))
        else:
            _lower(minpos, x.base, v)
        weights[e] = v + left_part(store, e)[1]
    return WeightMap(minpos, weights)


def _lower(d: Dict[int, int], k: int, v: int) -> None:
    old = d.get(k)
    if old is None or v < old:
        d[k] = v


def fst_occ(enc: Encoding, idx: Index, wmap: WeightMap, p: PatternHandle, i: int) -> Optional[int]:
    rect = pattern_ranges(idx, p, i)
    if rect is None:
        return None
    if idx.weights is not wmap.weights:
        idx.set_weights(wmap.weights)
    x1, x2, y1, y2 = rect
    w, _ = idx.tree().min_weight(x1 - 1, x2 - 1, y1 - 1, y2 - 1)
    return None if w == INF else int(w)


def fst(enc: Encoding, idx: Index, wmap: WeightMap, j: int, k: int) -> Optional[int]:
    """Leftmost start of T[j..j+k-1], if it is before ``j``."""
    n = enc.text_len
    if k < 1 or j < 1 or j + k - 1 > n:
        raise RangeError(f"range [{j}, {j + k - 1}] outside 1..{n}")
    store = enc.store
    if k == 1:
        c = extract(enc, enc.start, j, 1)
        best = wmap.minpos.get(store.char_sig(c))
    else:
        p = PatternHandle(enc.start, j, k)
        best = None
        for i in split_positions(enc, p):
            w = fst_occ(enc, idx, wmap, p, i)
            if w is not None and (best is None or w - i < best):
                best = w - i
    if best is None or best >= j:
        return None
    return best


def factorize(source: Union[str, Encoding], params: ParserParams = DEFAULT_PARAMS) -> List[Factor]:
    enc = encode_string(source, params) if isinstance(source, str) else source
    n = enc.text_len
    if n == 0:
        return []
    idx = build_index(enc)
    wmap = compute_weights(enc)
    idx.set_weights(wmap.weights)
    out: List[Factor] = []
    j = 1
    while j <= n:
        pos = fst(enc, idx, wmap, j, 1)
        if pos is None:
            out.append(Literal(extract(enc, enc.start, j, 1)))
            j += 1
            continue
        # grow by doubling, then binary search the last length that still has
        # an earlier occurrence
        good, good_pos = 1, pos
        bad = None
        k = 2
        while True:
            if j + k - 1 > n:
                bad = n - j + 2
                break
            p = fst(enc, idx, wmap, j, k)
            if p is None:
                bad = k
                break
            good, good_pos = k, p
            k *= 2
        while bad - good > 1:
            mid = (good + bad) // 2
            p = fst(enc, idx, wmap, j, mid)
            if p is None:
                bad = mid
            else:
                good, good_pos = mid, p
        out.append(Ref(good_pos, good))
        j += good
    return out


def expand_factors(factors: Iterable[Factor]) -> str:
    buf: List[str] = []
    for f in factors:
        if isinstance(f, Literal):
            buf.append(f.char)
            continue
        pos, k = f
        if pos < 1 or pos > len(buf) or k < 1:
            raise FactorFormatError(f"reference {f} does not point into the decoded prefix")
        for t in range(k):
            buf.append(buf[pos - 1 + t])
    return "".join(buf)


def from_factors(factors: Iterable[Factor], params: ParserParams = DEFAULT_PARAMS) -> Encoding:
    enc = Encoding(params=params)
    for f in factors:
        n = enc.text_len
        if isinstance(f, Literal):
            if len(f.char) != 1:
                raise FactorFormatError("literal must be a single character")
            insert_str(enc, n + 1, f.char)
            continue
        pos, k = f
        if k < 1 or pos < 1 or pos > n:
            raise FactorFormatError(f"reference {tuple(f)} does not point into the first {n} characters")
        cur, left = pos, k
        while left:
            c = min(left, enc.text_len - cur + 1)
            insert_copy(enc, enc.text_len + 1, cur, c)
            cur += c
            left -= c
    return enc


def format_factors(factors: Iterable[Factor]) -> bytes:
    out = bytearray()
    for f in factors:
        if isinstance(f, Literal):
            out += b"L " + f.char.encode("latin-1") + b"\n"
        else:
            out += f"F {f.pos} {f.length}\n".encode()
    return bytes(out)


def parse_factors(data: bytes) -> List[Factor]:
    """Read the line format; a literal line holds exactly one raw byte."""
    out: List[Factor] = []
    i = 0
    n = len(data)
    line = 1
    while i < n:
        if data.startswith(b"L ", i):
            if i + 3 >= n or data[i + 3:i + 4] != b"\n":
                raise FactorFormatError(f"line {line}: literal must be one byte followed by a newline")
            out.append(Literal(chr(data[i + 2])))
            i += 4
        elif data.startswith(b"F ", i):
            end = data.find(b"\n", i)
            if end < 0:
                raise FactorFormatError(f"line {line}: missing newline")
            parts = data[i + 2:end].split(b" ")
            try:
                if len(parts) != 2:
                    raise ValueError
                pos, k = int(parts[0]), int(parts[1])
            except ValueError:
                raise FactorFormatError(f"line {line}: expected 'F <pos> <len>'") from None
            out.append(Ref(pos, k))
            i = end + 1
        else:
            raise FactorFormatError(f"line {line}: unknown record")
        line += 1
    return out
