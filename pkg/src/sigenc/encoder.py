"""Signature encodings: construction, random access, common sequences, LCE."""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

from .grammar_store import Char, GrammarStore, InvariantError, Pair, RunOf
from .lcp_parse import DEFAULT_PARAMS, ParserParams, compute_landmarks, eblock, epow


class EncodingError(Exception):
    pass


class RangeError(EncodingError, IndexError):
    pass


@dataclass(frozen=True)
class PowSeq:
    """Run-length list of ``(signature, exponent)`` pairs."""

    items: Tuple[Tuple[int, int], ...]

    @classmethod
    def of(cls, items: Iterable[Tuple[int, int]]) -> "PowSeq":
        merged: List[List[int]] = []
        for sig, exp in items:
            if exp < 1:
                raise ValueError("exponent must be positive")
            if merged and merged[-1][0] == sig:
                merged[-1][1] += exp
            else:
                merged.append([sig, exp])
        return cls(tuple((s, k) for s, k in merged))

    def __iter__(self) -> Iterator[Tuple[int, int]]:
        return iter(self.items)

    def __len__(self) -> int:
        return len(self.items)

    def __getitem__(self, i):
        return self.items[i]

    def expanded_length(self, store: GrammarStore) -> int:
        return sum(store.len_of(s) * k for s, k in self.items)


class Encoding:
    def __init__(self, store: Optional[GrammarStore] = None, params: ParserParams = DEFAULT_PARAMS):
        self.store = store if store is not None else GrammarStore()
        self.params = params
        self.start: Optional[int] = None
        self.text_len = 0

    def set_start(self, start: Optional[int]) -> None:
        """Replace the pinned start symbol; the old one is released."""
        old = self.start
        if start is not None:
            self.store.pin(start)
        self.start = start
        self.text_len = self.store.len_of(start) if start is not None else 0
        if old is not None:
            self.store.release(old)

    @property
    def height(self) -> int:
        return self.store.level_of(self.start) if self.start is not None else 0

    def text(self) -> str:
        if self.start is None:
            return ""
        return extract(self, self.start, 1, self.text_len)

    def __repr__(self):
        return f"Encoding(N={self.text_len}, start={self.start}, w={len(self.store)})"


# -- construction -------------------------------------------------------------


def build_from_shrink(store: GrammarStore, seq: List[int], params: ParserParams) -> int:
    """Alternate run grouping and block folding until one run remains."""
    while True:
        pows = [store.intern(RunOf(b, k)) for b, k in epow(seq)]
        if len(pows) == 1:
            return pows[0]
        bits = compute_landmarks(pows, params)
        seq = [store.fold_block(block) for block in eblock(pows, bits)]


def encode_into(store: GrammarStore, text: str, params: ParserParams = DEFAULT_PARAMS) -> Optional[int]:
    """Encode ``text`` into an existing store and return its (unpinned) start."""
    if not text:
        return None
    chars = [store.intern(Char(ord(c))) for c in text]
    return build_from_shrink(store, chars, params)


def encode_string(text: str, params: ParserParams = DEFAULT_PARAMS,
                  store: Optional[GrammarStore] = None) -> Encoding:
    enc = Encoding(store, params)
    enc.set_start(encode_into(enc.store, text, params))
    return enc


# -- random access ------------------------------------------------------------


def _check_range(store: GrammarStore, e: int, i: int, k: int) -> None:
    n = store.len_of(e)
    if k < 0 or i < 1 or i + k - 1 > n or (k > 0 and i > n):
        raise RangeError(f"range [{i}, {i + k - 1}] outside 1..{n}")


def extract(enc: Encoding, e: int, i: int, k: int) -> str:
    store = enc.store if isinstance(enc, Encoding) else enc
    _check_range(store, e, i, k)
    out: List[str] = []
    if k:
        _emit(store, e, i, i + k - 1, out, {})
    return "".join(out)


def _emit(store: GrammarStore, e: int, lo: int, hi: int, out: List[str], full: dict) -> None:
    x = store.assgn(e)
    if isinstance(x, Char):
        out.append(chr(x.code))
        return
    n = store.len_of(e)
    if lo == 1 and hi == n and n <= 4096:
        s = full.get(e)
        if s is None:
            buf: List[str] = []
            _emit_inner(store, e, x, 1, n, buf, full)
            s = full[e] = "".join(buf)
        out.append(s)
        return
    _emit_inner(store, e, x, lo, hi, out, full)


def _emit_inner(store, e, x, lo, hi, out, full):
    if isinstance(x, Pair):
        ll = store.len_of(x.left)
        if lo <= ll:
            _emit(store, x.left, lo, min(hi, ll), out, full)
        if hi > ll:
            _emit(store, x.right, max(lo, ll + 1) - ll, hi - ll, out, full)
        return
    b = x.base
    bl = store.len_of(b)
    first, last = (lo - 1) // bl, (hi - 1) // bl
    if first == last:
        _emit(store, b, lo - first * bl, hi - first * bl, out, full)
        return
    _emit(store, b, lo - first * bl, bl, out, full)
    if last - first > 1:
        buf: List[str] = []
        _emit(store, b, 1, bl, buf, full)
        out.append("".join(buf) * (last - first - 1))
    _emit(store, b, 1, hi - last * bl, out, full)


# -- layered navigation -------------------------------------------------------


class LevelCursor:
    """Walks the nodes of one derivation level below a root.

    Nodes on odd levels are runs, nodes on even levels above zero are folded
    blocks, and level zero holds characters.
    """

    def __init__(self, store: GrammarStore, root: int, level: int, pos: int):
        self.store = store
        self.level = level
        path = []
        sig, start = root, 1
        lvl = store.level_of
        while lvl(sig) > level:
            idx, cstart, child = self._child_at(sig, start, pos)
            path.append([sig, start, idx])
            sig, start = child, cstart
        path.append([sig, start, -1])
        self.path = path

    def _nchildren(self, sig: int) -> int:
        x = self.store.assgn(sig)
        if isinstance(x, RunOf):
            return x.exp
        return len(self.store.block_children(sig))

    def _child(self, sig: int, start: int, idx: int) -> Tuple[int, int]:
        x = self.store.assgn(sig)
        if isinstance(x, RunOf):
            return start + idx * self.store.len_of(x.base), x.base
        return start + self.store.block_offsets(sig)[idx], self.store.block_children(sig)[idx]

    def _child_at(self, sig: int, start: int, pos: int):
        x = self.store.assgn(sig)
        if isinstance(x, RunOf):
            idx = (pos - start) // self.store.len_of(x.base)
            return idx, start + idx * self.store.len_of(x.base), x.base
        offs = self.store.block_offsets(sig)
        idx = bisect_right(offs, pos - start) - 1
        return idx, start + offs[idx], self.store.block_children(sig)[idx]

    @property
    def sig(self) -> int:
        return self.path[-1][0]

    @property
    def start(self) -> int:
        return self.path[-1][1]

    @property
    def end(self) -> int:
        return self.path[-1][1] + self.store.len_of(self.path[-1][0]) - 1

    def is_first_child(self) -> bool:
        return len(self.path) < 2 or self.path[-2][2] == 0

    def next(self) -> bool:
        path = self.path
        i = len(path) - 2
        while i >= 0 and path[i][2] + 1 >= self._nchildren(path[i][0]):
            i -= 1
        if i < 0:
            return False
        path[i][2] += 1
        del path[i + 1:]
        sig, start, idx = path[i]
        cstart, child = self._child(sig, start, idx)
        lvl = self.store.level_of
        while lvl(child) > self.level:
            path.append([child, cstart, 0])
            cstart, child = self._child(child, cstart, 0)
        path.append([child, cstart, -1])
        return True

    def prev(self) -> bool:
        path = self.path
        i = len(path) - 2
        while i >= 0 and path[i][2] == 0:
            i -= 1
        if i < 0:
            return False
        path[i][2] -= 1
        del path[i + 1:]
        sig, start, idx = path[i]
        cstart, child = self._child(sig, start, idx)
        lvl = self.store.level_of
        while lvl(child) > self.level:
            last = self._nchildren(child) - 1
            path.append([child, cstart, last])
            cstart, child = self._child(child, cstart, last)
        path.append([child, cstart, -1])
        return True


# -- common sequences ---------------------------------------------------------


def uniq_bound(k: int, params: ParserParams = DEFAULT_PARAMS) -> int:
    m = params.margin
    return 2 * m * (k.bit_length()) + m


def uniq_pow(enc: Encoding, e: int, i: int, k: int) -> PowSeq:
    """Run-length common sequence of ``val(e)[i..i+k-1]``."""
    store = enc.store
    params = enc.params
    if k < 1:
        raise RangeError("empty range")
    _check_range(store, e, i, k)
    m = params.margin
    a, b = i, i + k - 1
    left: List[Tuple[int, int]] = []
    right: List[Tuple[int, int]] = []
    t = 0
    root_level = store.level_of(e)
    while True:
        pl = 2 * t + 1
        if pl > root_level:
            if (a, b) != (1, store.len_of(e)):
                raise InvariantError("encoding is not layered")
            left.append((e, 1))
            break
        cur = LevelCursor(store, e, pl, a)
        nodes = [(cur.sig, cur.start, cur.end)]
        while nodes[-1][2] < b and len(nodes) <= m:
            cur.next()
            nodes.append((cur.sig, cur.start, cur.end))
        if nodes[-1][2] >= b and len(nodes) <= m:
            for sig, s, en in nodes:
                base = store.assgn(sig).base
                bl = store.len_of(base)
                left.append((base, (min(en, b) - max(s, a) + 1) // bl))
            break
        fsig, _, fend = nodes[0]
        fbase = store.assgn(fsig).base
        left.append((fbase, (fend - a + 1) // store.len_of(fbase)))
        gcur = LevelCursor(store, e, pl, b)
        gbase = store.assgn(gcur.sig).base
        right.append((gbase, (b - gcur.start + 1) // store.len_of(gbase)))
        gstart = gcur.start

        lc = LevelCursor(store, e, pl, fend + 1)
        count = 0
        while True:
            left.append(tuple(store.assgn(lc.sig)))
            count += 1
            if not lc.next() or lc.start >= gstart:
                raise InvariantError("no landmark found while trimming a prefix")
            if count >= params.delta_l and lc.is_first_child():
                break
        new_a = lc.start

        rc = LevelCursor(store, e, pl, gstart - 1)
        count = 0
        while True:
            right.append(tuple(store.assgn(rc.sig)))
            count += 1
            if count >= params.delta_r + 1 and rc.is_first_child():
                break
            if not rc.prev() or rc.start < new_a:
                raise InvariantError("no landmark found while trimming a suffix")
        new_b = rc.start - 1
        if new_b < new_a:
            raise InvariantError("trimmed prefix and suffix overlap")
        a, b = new_a, new_b
        t += 1
    right.reverse()
    return PowSeq.of(left + right)


# -- longest common extension -------------------------------------------------


def _nodes_starting(store: GrammarStore, root: int, pos: int) -> List[Tuple[int, int]]:
    """Nodes on the path to ``pos`` that start there, largest first.

    Each entry carries the number of copies left in an enclosing run (1 when
    the parent is not a run of that node).
    """
    out = []
    sig, start, rem = root, 1, 1
    while True:
        if start == pos:
            out.append((sig, rem))
        x = store.assgn(sig)
        if isinstance(x, Char):
            return out
        if isinstance(x, Pair):
            ll = store.len_of(x.left)
            if pos < start + ll:
                sig = x.left
            else:
                start += ll
                sig = x.right
            rem = 1
        else:
            bl = store.len_of(x.base)
            idx = (pos - start) // bl
            start += idx * bl
            sig = x.base
            rem = x.exp - idx


def _nodes_ending(store: GrammarStore, root: int, pos: int) -> List[Tuple[int, int]]:
    out = []
    sig, start, rem = root, 1, 1
    while True:
        if start + store.len_of(sig) - 1 == pos:
            out.append((sig, rem))
        x = store.assgn(sig)
        if isinstance(x, Char):
            return out
        if isinstance(x, Pair):
            ll = store.len_of(x.left)
            if pos < start + ll:
                sig = x.left
            else:
                start += ll
                sig = x.right
            rem = 1
        else:
            bl = store.len_of(x.base)
            idx = (pos - start) // bl
            start += idx * bl
            sig = x.base
            rem = idx + 1


def _greedy_step(store, a_nodes, b_nodes) -> int:
    other = dict(b_nodes)
    for sig, rem in a_nodes:
        r2 = other.get(sig)
        if r2 is not None:
            return store.len_of(sig) * min(rem, r2)
    return 0


def lce_forward(enc: Encoding, e1: int, e2: int, i: int, j: int) -> int:
    store = enc.store
    n1, n2 = store.len_of(e1), store.len_of(e2)
    if not (1 <= i <= n1 + 1 and 1 <= j <= n2 + 1):
        raise RangeError("position outside the string")
    total = 0
    while i <= n1 and j <= n2:
        step = _greedy_step(store, _nodes_starting(store, e1, i), _nodes_starting(store, e2, j))
        if not step:
            break
        total += step
        i += step
        j += step
    return total


def lce_backward(enc: Encoding, e1: int, e2: int, i: int, j: int) -> int:
    store = enc.store
    n1, n2 = store.len_of(e1), store.len_of(e2)
    if not (0 <= i <= n1 and 0 <= j <= n2):
        raise RangeError("position outside the string")
    total = 0
    while i >= 1 and j >= 1:
        step = _greedy_step(store, _nodes_ending(store, e1, i), _nodes_ending(store, e2, j))
        if not step:
            break
        total += step
        i -= step
        j -= step
    return total


def lcp_of(enc: Encoding, e1: int, e2: int) -> int:
    return lce_forward(enc, e1, e2, 1, 1)


def lcs_of(enc: Encoding, e1: int, e2: int) -> int:
    return lce_backward(enc, e1, e2, enc.store.len_of(e1), enc.store.len_of(e2))


# -- audit --------------------------------------------------------------------


def level_sequences(enc: Encoding) -> List[List[int]]:
    """Every level of the derivation from the top run down to characters."""
    store = enc.store
    if enc.start is None:
        return []
    seqs = [[enc.start]]
    cur = [enc.start]
    while store.level_of(cur[0]) > 0:
        nxt: List[int] = []
        for s in cur:
            x = store.assgn(s)
            if isinstance(x, RunOf):
                nxt.extend([x.base] * x.exp)
            else:
                nxt.extend(store.block_children(s))
        seqs.append(nxt)
        cur = nxt
    return seqs


def audit(enc: Encoding) -> None:
    """Raise InvariantError unless the derivation is exactly what the parser yields."""
    store = enc.store
    if enc.start is None:
        if enc.text_len != 0:
            raise InvariantError("empty encoding with nonzero length")
        return
    if store.len_of(enc.start) != enc.text_len:
        raise InvariantError("start length differs from text length")
    top = store.level_of(enc.start)
    if top % 2 != 1:
        raise InvariantError("start symbol is not a run")
    seqs = level_sequences(enc)
    for depth, seq in enumerate(seqs):
        lvl = top - depth
        for s in seq:
            if store.level_of(s) != lvl:
                raise InvariantError(f"signature {s} sits on level {lvl} but is tagged {store.level_of(s)}")
        if lvl % 2 == 1:
            for s in seq:
                if not isinstance(store.assgn(s), RunOf):
                    raise InvariantError(f"signature {s} on a run level is not a run")
            for x, y in zip(seq, seq[1:]):
                if store.assgn(x).base == store.assgn(y).base:
                    raise InvariantError("adjacent runs share a base")
        elif lvl > 0:
            below = seqs[depth + 1]
            blocks = eblock(below, compute_landmarks(below, enc.params))
            if [len(bl) for bl in blocks] != [len(store.block_children(s)) for s in seq]:
                raise InvariantError(f"block structure on level {lvl} differs from the parse")
            for s, bl in zip(seq, blocks):
                if tuple(bl) != store.block_children(s):
                    raise InvariantError(f"block {s} differs from the parse")
        else:
            for s in seq:
                if not isinstance(store.assgn(s), Char):
                    raise InvariantError("bottom level holds a non-character")
    if len(seqs[0]) != 1:
        raise InvariantError("top level is not a single run")
