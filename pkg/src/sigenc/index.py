"""Pattern search over an encoding.

Every pair or run signature contributes one point: its left part read
backwards gives the x coordinate and its right part gives the y
coordinate.  An occurrence of P that crosses the split of its lowest
covering node is found as a point in the rectangle of (reversed P[..j],
P[j+1..]) for some split j; every other occurrence is a copy of one of
these, reached by walking up the parent links.
"""

from __future__ import annotations

from bisect import bisect_left, bisect_right
from functools import cmp_to_key
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .encoder import Encoding, encode_into, extract, lce_backward, lce_forward, uniq_pow
from .grammar_store import Char, GrammarStore, InvariantError, Pair, RunOf

KEY_LEN = 32
INF = float("inf")


class PrimaryOcc(NamedTuple):
    sig: int
    offset: int


def left_part(store: GrammarStore, e: int) -> Tuple[int, int]:
    """(signature, length) whose value is the left part of ``e``."""
    x = store.assgn(e)
    if isinstance(x, Pair):
        return x.left, store.len_of(x.left)
    return x.base, store.len_of(x.base)


def right_part(store: GrammarStore, e: int) -> Tuple[int, int]:
    """(signature, offset): the right part of ``e`` is val(signature)[offset..]."""
    x = store.assgn(e)
    if isinstance(x, Pair):
        return x.right, 1
    return e, store.len_of(x.base) + 1


class _RangeTree:
    """Static merge-sort tree over x ranks with y-sorted lists per node."""

    def __init__(self, by_x: Sequence[Tuple[int, int]], weights: Optional[Dict[int, float]] = None):
        n = len(by_x)
        size = 1
        while size < max(n, 1):
            size *= 2
        self.size = size
        self.ys: List[List[int]] = [[] for _ in range(2 * size)]
        self.sigs: List[List[int]] = [[] for _ in range(2 * size)]
        for x, (y, s) in enumerate(by_x):
            self.ys[size + x] = [y]
            self.sigs[size + x] = [s]
        for v in range(size - 1, 0, -1):
            a, b = 2 * v, 2 * v + 1
            merged = sorted(zip(self.ys[a] + self.ys[b], self.sigs[a] + self.sigs[b]))
            self.ys[v] = [y for y, _ in merged]
            self.sigs[v] = [s for _, s in merged]
        self.mins = None
        if weights is not None:
            self.mins = []
            for v in range(2 * size):
                w = [(weights.get(s, INF), s) for s in self.sigs[v]]
                m = len(w)
                tree = [(INF, 0)] * m + w
                for k in range(m - 1, 0, -1):
                    tree[k] = min(tree[2 * k], tree[2 * k + 1])
                self.mins.append(tree)

    def _nodes(self, x1: int, x2: int):
        lo, hi = x1 + self.size, x2 + self.size + 1
        while lo < hi:
            if lo & 1:
                yield lo
                lo += 1
            if hi & 1:
                hi -= 1
                yield hi
            lo //= 2
            hi //= 2

    def report(self, x1: int, x2: int, y1: int, y2: int) -> List[int]:
        out: List[int] = []
        if x1 > x2 or y1 > y2:
            return out
        for v in self._nodes(x1, x2):
            ys = self.ys[v]
            a, b = bisect_left(ys, y1), bisect_right(ys, y2)
            out.extend(self.sigs[v][a:b])
        return out

    def min_weight(self, x1: int, x2: int, y1: int, y2: int) -> Tuple[float, int]:
        best = (INF, 0)
        if x1 > x2 or y1 > y2 or self.mins is None:
            return best
        for v in self._nodes(x1, x2):
            ys = self.ys[v]
            lo, hi = bisect_left(ys, y1), bisect_right(ys, y2)
            tree = self.mins[v]
            m = len(ys)
            lo += m
            hi += m
            while lo < hi:
                if lo & 1:
                    best = min(best, tree[lo])
                    lo += 1
                if hi & 1:
                    hi -= 1
                    best = min(best, tree[hi])
                lo //= 2
                hi //= 2
        return best


class Index:
    def __init__(self, enc: Encoding):
        self.enc = enc
        self.xs: List[int] = []
        self.ys: List[int] = []
        self._xkey: Dict[int, str] = {}
        self._ykey: Dict[int, str] = {}
        self._tree: Optional[_RangeTree] = None
        self.weights: Optional[Dict[int, float]] = None
        members = [e for e in enc.store.signatures() if not isinstance(enc.store.assgn(e), Char)]
        for e in members:
            self._cache_keys(e)
        self.xs = sorted(members, key=cmp_to_key(self._cmp_x))
        self.ys = sorted(members, key=cmp_to_key(self._cmp_y))

    # -- keys and comparisons ----------------------------------------------

    def _cache_keys(self, e: int) -> None:
        store = self.enc.store
        ls, ln = left_part(store, e)
        k = min(KEY_LEN, ln)
        self._xkey[e] = extract(store, ls, ln - k + 1, k)[::-1]
        rs, ro = right_part(store, e)
        k = min(KEY_LEN, store.len_of(rs) - ro + 1)
        self._ykey[e] = extract(store, rs, ro, k)

    def _cmp_x(self, a: int, b: int) -> int:
        if a == b:
            return 0
        ka, kb = self._xkey[a], self._xkey[b]
        if ka != kb:
            return -1 if ka < kb else 1
        store = self.enc.store
        la, na = left_part(store, a)
        lb, nb = left_part(store, b)
        c = _cmp_back(self.enc, la, na, lb, nb)
        return c if c else (-1 if a < b else 1)

    def _cmp_y(self, a: int, b: int) -> int:
        if a == b:
            return 0
        ka, kb = self._ykey[a], self._ykey[b]
        if ka != kb:
            return -1 if ka < kb else 1
        store = self.enc.store
        ra, oa = right_part(store, a)
        rb, ob = right_part(store, b)
        c = _cmp_fwd(self.enc, ra, oa, rb, ob)
        return c if c else (-1 if a < b else 1)

    # -- maintenance -------------------------------------------------------

    def _insert(self, e: int) -> None:
        self._cache_keys(e)
        self.xs.insert(_bisect_cmp(self.xs, e, self._cmp_x), e)
        self.ys.insert(_bisect_cmp(self.ys, e, self._cmp_y), e)

    def _remove(self, e: int) -> None:
        self.xs.remove(e)
        self.ys.remove(e)
        del self._xkey[e], self._ykey[e]

    def update(self, delta) -> None:
        """Apply an EditDelta produced by the editor."""
        store = self.enc.store
        for e in delta.removed:
            if e in self._xkey:
                self._remove(e)
        for e in delta.added:
            if e in store and e not in self._xkey and not isinstance(store.assgn(e), Char):
                self._insert(e)
        self._tree = None
        self.weights = None

    def refresh(self) -> None:
        """Bring the point set in line with the store, whatever changed."""
        store = self.enc.store
        for e in [e for e in self._xkey if e not in store]:
            self._remove(e)
        for e in store.signatures():
            if e not in self._xkey and not isinstance(store.assgn(e), Char):
                self._insert(e)
        self._tree = None
        self.weights = None

    def set_weights(self, weights: Dict[int, float]) -> None:
        self.weights = weights
        self._tree = None

    def tree(self) -> _RangeTree:
        if self._tree is None:
            yrank = {e: r for r, e in enumerate(self.ys)}
            self._tree = _RangeTree([(yrank[e], e) for e in self.xs], self.weights)
        return self._tree

    def points(self) -> List[Tuple[int, int, int]]:
        """(x rank, y rank, signature) for every point, ranks 1-based."""
        yrank = {e: r for r, e in enumerate(self.ys, 1)}
        return [(x, yrank[e], e) for x, e in enumerate(self.xs, 1)]

    def __len__(self):
        return len(self.xs)


def build_index(enc: Encoding) -> Index:
    return Index(enc)


def range_report(idx: Index, x1: int, x2: int, y1: int, y2: int) -> List[int]:
    """Signatures with x rank in [x1, x2] and y rank in [y1, y2] (1-based)."""
    x1, y1 = max(x1, 1), max(y1, 1)
    x2, y2 = min(x2, len(idx)), min(y2, len(idx))
    if x1 > x2 or y1 > y2:
        return []
    return idx.tree().report(x1 - 1, x2 - 1, y1 - 1, y2 - 1)


# -- comparisons against a pattern ------------------------------------------


def _cmp_fwd(enc: Encoding, s1: int, o1: int, s2: int, o2: int) -> int:
    store = enc.store
    n1, n2 = store.len_of(s1) - o1 + 1, store.len_of(s2) - o2 + 1
    l = lce_forward(enc, s1, s2, o1, o2)
    if l >= n1 or l >= n2:
        return (n1 > n2) - (n1 < n2)
    c1 = extract(store, s1, o1 + l, 1)
    c2 = extract(store, s2, o2 + l, 1)
    return -1 if c1 < c2 else 1


def _cmp_back(enc: Encoding, s1: int, e1: int, s2: int, e2: int) -> int:
    """Compare val(s1)[..e1] and val(s2)[..e2] read right to left."""
    store = enc.store
    l = lce_backward(enc, s1, s2, e1, e2)
    if l >= e1 or l >= e2:
        return (e1 > e2) - (e1 < e2)
    c1 = extract(store, s1, e1 - l, 1)
    c2 = extract(store, s2, e2 - l, 1)
    return -1 if c1 < c2 else 1


def _bisect_cmp(seq: List[int], e: int, cmp) -> int:
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if cmp(seq[mid], e) < 0:
            lo = mid + 1
        else:
            hi = mid
    return lo


class PatternHandle(NamedTuple):
    """P = val(sig)[offset..offset+length-1]."""

    sig: int
    offset: int
    length: int


def _class_x(idx: Index, e: int, p: PatternHandle, j: int, pkey: str) -> int:
    # -1 / 0 / +1: reversed left part is below / has as prefix / above reversed P[..j]
    key = idx._xkey[e]
    r = _key_class(key, pkey, j)
    if r is not None:
        return r
    store = idx.enc.store
    ls, ln = left_part(store, e)
    end = p.offset + j - 1
    l = lce_backward(idx.enc, ls, p.sig, ln, end)
    if l >= j:
        return 0
    if l >= ln:
        return -1
    c1 = extract(store, ls, ln - l, 1)
    c2 = extract(store, p.sig, end - l, 1)
    return -1 if c1 < c2 else 1


def _class_y(idx: Index, e: int, p: PatternHandle, j: int, pkey: str) -> int:
    key = idx._ykey[e]
    m = p.length - j
    r = _key_class(key, pkey, m)
    if r is not None:
        return r
    store = idx.enc.store
    rs, ro = right_part(store, e)
    rn = store.len_of(rs) - ro + 1
    start = p.offset + j
    l = lce_forward(idx.enc, rs, p.sig, ro, start)
    if l >= m:
        return 0
    if l >= rn:
        return -1
    c1 = extract(store, rs, ro + l, 1)
    c2 = extract(store, p.sig, start + l, 1)
    return -1 if c1 < c2 else 1


def _key_class(key: str, pkey: str, plen: int) -> Optional[int]:
    """Decide from the cached prefixes alone when possible."""
    n = min(len(key), len(pkey))
    for i in range(n):
        if key[i] != pkey[i]:
            return -1 if key[i] < pkey[i] else 1
    if n == plen:
        return 0
    if len(key) < KEY_LEN and len(key) == n:
        # key is the whole string and a proper prefix of the pattern
        return -1
    return None


def _range_of(seq: List[int], classify) -> Optional[Tuple[int, int]]:
    lo, hi = 0, len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if classify(seq[mid]) < 0:
            lo = mid + 1
        else:
            hi = mid
    first = lo
    hi = len(seq)
    while lo < hi:
        mid = (lo + hi) // 2
        if classify(seq[mid]) <= 0:
            lo = mid + 1
        else:
            hi = mid
    if lo == first:
        return None
    return first + 1, lo


def pattern_ranges(idx: Index, p: PatternHandle, j: int) -> Optional[Tuple[int, int, int, int]]:
    """1-based rank rectangle for split ``j`` of the pattern, or None."""
    if not 1 <= j < p.length:
        raise ValueError("split outside the pattern")
    store = idx.enc.store
    k = min(KEY_LEN, j)
    xkey = extract(store, p.sig, p.offset + j - k, k)[::-1]
    k = min(KEY_LEN, p.length - j)
    ykey = extract(store, p.sig, p.offset + j, k)
    xr = _range_of(idx.xs, lambda e: _class_x(idx, e, p, j, xkey))
    if xr is None:
        return None
    yr = _range_of(idx.ys, lambda e: _class_y(idx, e, p, j, ykey))
    if yr is None:
        return None
    return xr + yr


def split_positions(enc: Encoding, p: PatternHandle) -> List[int]:
    if p.length <= 1:
        raise ValueError("pattern must have at least two characters")
    store = enc.store
    u = uniq_pow(enc, p.sig, p.offset, p.length)
    if len(u) == 1:
        sig, k = u[0]
        if k < 2:
            raise InvariantError("common sequence of a pattern is a single node")
        return [store.len_of(sig)]
    out = []
    acc = 0
    for sig, k in u.items[:-1]:
        acc += store.len_of(sig) * k
        out.append(acc)
    return out


def vocc_of(enc: Encoding, e: int, memo: Optional[dict] = None) -> List[int]:
    """Start positions of ``e`` as a node of the derivation tree of the text."""
    store = enc.store
    if memo is None:
        memo = {}
    if enc.start is None:
        return []
    # iterative post-order over parent links
    stack = [e]
    while stack:
        s = stack[-1]
        if s in memo:
            stack.pop()
            continue
        pending = [p for p in store.parents_of(s) if p not in memo]
        if pending:
            stack.extend(pending)
            continue
        stack.pop()
        out: List[int] = [1] if s == enc.start else []
        for p, mult in store.parents_of(s).items():
            pv = memo[p]
            if not pv:
                continue
            x = store.assgn(p)
            if isinstance(x, RunOf):
                bl = store.len_of(s)
                for c in range(x.exp):
                    out.extend(v + c * bl for v in pv)
            else:
                if x.left == s:
                    out.extend(pv)
                if x.right == s:
                    ll = store.len_of(x.left)
                    out.extend(v + ll for v in pv)
        memo[s] = out
    return memo[e]


def run_offsets(enc: Encoding, e: int, j: int, plen: int) -> List[int]:
    x = enc.store.assgn(e)
    if not isinstance(x, RunOf):
        return []
    bl = enc.store.len_of(x.base)
    total = x.exp * bl
    out = []
    c = 1
    while j + c * bl + plen - 1 <= total:
        out.append(c * bl)
        c += 1
    return out


def primary_occurrences(idx: Index, p: PatternHandle, splits: Iterable[int]) -> List[PrimaryOcc]:
    store = idx.enc.store
    out = []
    for j in splits:
        rect = pattern_ranges(idx, p, j)
        if rect is None:
            continue
        for e in range_report(idx, *rect):
            out.append(PrimaryOcc(e, left_part(store, e)[1] - j + 1))
    return out


def search(enc: Encoding, idx: Index, pattern: str) -> List[int]:
    if not pattern:
        raise ValueError("empty pattern")
    store = enc.store
    m = len(pattern)
    if enc.start is None or m > enc.text_len:
        return []
    chars = set(pattern)
    if any(store.char_sig(c) is None for c in chars):
        return []
    if m == 1:
        return sorted(set(vocc_of(enc, store.char_sig(pattern))))
    psig = encode_into(store, pattern, enc.params)
    store.pin(psig)
    try:
        p = PatternHandle(psig, 1, m)
        found = occurrences(enc, idx, p)
    finally:
        store.release(psig)
        store.gc()
    return found


def occurrences(enc: Encoding, idx: Index, p: PatternHandle) -> List[int]:
    memo: dict = {}
    res = set()
    for occ in primary_occurrences(idx, p, split_positions(enc, p)):
        extra = [0] + run_offsets(enc, occ.sig, occ.offset, p.length)
        for v in vocc_of(enc, occ.sig, memo):
            base = v + occ.offset - 1
            res.update(base + c for c in extra)
    return sorted(res)
