"""Signature dictionary and reverse DAG of a run-length grammar."""

from __future__ import annotations

from collections import Counter
from contextlib import contextmanager
from typing import Dict, Iterator, List, NamedTuple, Optional, Sequence, Tuple, Union

from sortedcontainers import SortedDict


class StoreError(Exception):
    pass


class DanglingReferenceError(StoreError):
    pass


class DeadSignatureError(StoreError, KeyError):
    pass


class InvariantError(StoreError):
    pass


class Char(NamedTuple):
    code: int


class Pair(NamedTuple):
    left: int
    right: int


class RunOf(NamedTuple):
    base: int
    exp: int


Assignment = Union[Char, Pair, RunOf]

_TAG = {Char: 0, Pair: 1, RunOf: 2}


def canonical_key(x: Assignment) -> Tuple[int, ...]:
    return (_TAG[type(x)],) + tuple(x)


class NodeMeta(NamedTuple):
    length: int
    level: int
    parent_refs: Counter
    refcount: int


class Recorder:
    """Collects signatures created and removed while active."""

    def __init__(self):
        self.created: List[int] = []
        self.removed: List[int] = []


class GrammarStore:
    def __init__(self):
        self._dict: SortedDict = SortedDict()
        self._assign: Dict[int, Assignment] = {}
        self._len: Dict[int, int] = {}
        self._level: Dict[int, int] = {}
        self._parents: Dict[int, Counter] = {}
        self._ref: Dict[int, int] = {}
        self._unreferenced: set = set()
        self._next_id = 1
        self._recorders: List[Recorder] = []
        self._children_cache: Dict[int, tuple] = {}
        self._offsets_cache: Dict[int, tuple] = {}

    # -- queries -----------------------------------------------------------

    def __len__(self) -> int:
        return len(self._assign)

    def __contains__(self, e) -> bool:
        return e in self._assign

    def signatures(self) -> List[int]:
        return sorted(self._assign)

    @property
    def next_id(self) -> int:
        return self._next_id

    def lookup(self, x: Assignment) -> Optional[int]:
        return self._dict.get(canonical_key(x))

    def assgn(self, e: int) -> Assignment:
        try:
            return self._assign[e]
        except KeyError:
            raise DeadSignatureError(f"signature {e} is not live") from None

    def len_of(self, e: int) -> int:
        try:
            return self._len[e]
        except KeyError:
            raise DeadSignatureError(f"signature {e} is not live") from None

    def level_of(self, e: int) -> int:
        try:
            return self._level[e]
        except KeyError:
            raise DeadSignatureError(f"signature {e} is not live") from None

    def parents_of(self, e: int) -> Counter:
        if e not in self._parents:
            raise DeadSignatureError(f"signature {e} is not live")
        return Counter(self._parents[e])

    def refcount(self, e: int) -> int:
        if e not in self._ref:
            raise DeadSignatureError(f"signature {e} is not live")
        return self._ref[e]

    def meta(self, e: int) -> NodeMeta:
        return NodeMeta(self.len_of(e), self._level[e], Counter(self._parents[e]), self._ref[e])

    def char_sig(self, ch: str) -> Optional[int]:
        return self._dict.get((0, ord(ch)))

    # -- mutation ----------------------------------------------------------

    def intern(self, x: Assignment) -> int:
        key = canonical_key(x)
        e = self._dict.get(key)
        if e is not None:
            return e
        return self._create(x, key, self._next_id)

    def intern_with_id(self, e: int, x: Assignment) -> int:
        """Insert ``x`` under an explicit id (used when loading files)."""
        key = canonical_key(x)
        if key in self._dict:
            raise InvariantError(f"assignment {x} is already mapped to {self._dict[key]}")
        if e in self._assign or e < 1:
            raise InvariantError(f"id {e} is not available")
        for c in _operands(x):
            if c >= e:
                raise InvariantError(f"signature {e} refers to non-smaller id {c}")
        return self._create(x, key, e)

    def _create(self, x: Assignment, key, e: int) -> int:
        if isinstance(x, Char):
            if x.code < 0:
                raise ValueError("negative code point")
            length, level = 1, 0
        elif isinstance(x, Pair):
            l, r = x
            for c in (l, r):
                if c not in self._assign:
                    raise DanglingReferenceError(f"operand {c} is not live")
            ll, lr = self._level[l], self._level[r]
            if ll != lr and not (ll == lr + 1 and isinstance(self._assign[l], Pair)):
                raise InvariantError(f"pair ({l},{r}) mixes levels {ll} and {lr}")
            length, level = self._len[l] + self._len[r], lr + 1
        elif isinstance(x, RunOf):
            b, k = x
            if b not in self._assign:
                raise DanglingReferenceError(f"operand {b} is not live")
            if k < 1:
                raise ValueError("run exponent must be positive")
            length, level = self._len[b] * k, self._level[b] + 1
        else:
            raise TypeError(f"not an assignment: {x!r}")
        self._dict[key] = e
        self._assign[e] = x
        self._len[e] = length
        self._level[e] = level
        self._parents[e] = Counter()
        self._ref[e] = 0
        self._unreferenced.add(e)
        for c in _operands(x):
            self._parents[c][e] += 1
            self._ref[c] += 1
            self._unreferenced.discard(c)
        if e >= self._next_id:
            self._next_id = e + 1
        for rec in self._recorders:
            rec.created.append(e)
        return e

    def pin(self, e: int) -> None:
        if e not in self._ref:
            raise DeadSignatureError(f"signature {e} is not live")
        self._ref[e] += 1
        self._unreferenced.discard(e)

    def release(self, e: int) -> None:
        """Drop one reference to ``e``; an unreferenced signature is removed."""
        if e not in self._ref:
            raise DeadSignatureError(f"signature {e} is not live")
        if self._ref[e] > 0:
            self._ref[e] -= 1
        if self._ref[e] == 0:
            self._remove_cascade(e)

    def _remove_cascade(self, e: int) -> None:
        stack = [e]
        while stack:
            s = stack.pop()
            x = self._assign.pop(s)
            del self._dict[canonical_key(x)]
            del self._len[s], self._level[s], self._ref[s]
            if self._parents.pop(s):
                raise InvariantError(f"removed signature {s} still has parents")
            self._unreferenced.discard(s)
            self._children_cache.pop(s, None)
            self._offsets_cache.pop(s, None)
            for rec in self._recorders:
                rec.removed.append(s)
            for c in _operands(x):
                par = self._parents[c]
                par[s] -= 1
                if par[s] == 0:
                    del par[s]
                if self._ref[c] <= 0:
                    raise InvariantError(f"refcount of {c} would drop below zero")
                self._ref[c] -= 1
                if self._ref[c] == 0:
                    stack.append(c)

    def gc(self) -> List[int]:
        """Remove every unreferenced signature; returns the removed ids."""
        removed: List[int] = []
        rec = Recorder()
        self._recorders.append(rec)
        try:
            while self._unreferenced:
                batch = sorted(self._unreferenced)
                self._unreferenced.clear()
                for e in batch:
                    if self._ref.get(e) == 0:
                        self._remove_cascade(e)
        finally:
            self._recorders.remove(rec)
        removed.extend(rec.removed)
        return removed

    @contextmanager
    def recording(self) -> Iterator[Recorder]:
        rec = Recorder()
        self._recorders.append(rec)
        try:
            yield rec
        finally:
            self._recorders.remove(rec)

    # -- folding -----------------------------------------------------------

    def fold_block(self, seq: Sequence[int]) -> int:
        if not 2 <= len(seq) <= 5:
            raise ValueError(f"block length {len(seq)} outside 2..5")
        acc = seq[0]
        for x in seq[1:]:
            acc = self.intern(Pair(acc, x))
        return acc

    def block_children(self, e: int) -> tuple:
        """Children of a block signature one level down.

        The left spine of pairs sharing the block's level is unfolded, so the
        result is the original block before folding.
        """
        cached = self._children_cache.get(e)
        if cached is not None:
            return cached
        if not isinstance(self._assign[e], Pair):
            raise InvariantError(f"signature {e} is not a block")
        lvl = self._level[e]
        out = []
        cur = e
        while True:
            x = self._assign[cur]
            if isinstance(x, Pair) and self._level[cur] == lvl:
                out.append(x.right)
                cur = x.left
            else:
                out.append(cur)
                break
        out.reverse()
        res = tuple(out)
        self._children_cache[e] = res
        return res

    def block_offsets(self, e: int) -> tuple:
        """Start offsets (0-based) of the children returned by block_children."""
        cached = self._offsets_cache.get(e)
        if cached is not None:
            return cached
        offs = []
        acc = 0
        for c in self.block_children(e):
            offs.append(acc)
            acc += self._len[c]
        res = tuple(offs)
        self._offsets_cache[e] = res
        return res

    # -- audit -------------------------------------------------------------

    def audit(self) -> None:
        """Check the bijection, length/level equations and reference counts."""
        refs: Counter = Counter()
        parents: Dict[int, Counter] = {e: Counter() for e in self._assign}
        for e, x in self._assign.items():
            if self._dict.get(canonical_key(x)) != e:
                raise InvariantError(f"dictionary does not map back to {e}")
            ops = _operands(x)
            for c in ops:
                if c >= e or c not in self._assign:
                    raise InvariantError(f"bad operand {c} in {e}")
                refs[c] += 1
                parents[c][e] += 1
            if isinstance(x, Char):
                ok = self._len[e] == 1 and self._level[e] == 0
            elif isinstance(x, Pair):
                ok = (self._len[e] == self._len[x.left] + self._len[x.right]
                      and self._level[e] == self._level[x.right] + 1)
            else:
                ok = (self._len[e] == x.exp * self._len[x.base]
                      and self._level[e] == self._level[x.base] + 1)
            if not ok:
                raise InvariantError(f"length or level mismatch at {e}")
        if len(self._dict) != len(self._assign):
            raise InvariantError("dictionary size mismatch")
        for e in self._assign:
            if parents[e] != self._parents[e]:
                raise InvariantError(f"parent multiset mismatch at {e}")
            if self._ref[e] < refs[e]:
                raise InvariantError(f"refcount too small at {e}")


def _operands(x: Assignment) -> Tuple[int, ...]:
    if isinstance(x, Pair):
        return (x.left, x.right)
    if isinstance(x, RunOf):
        return (x.base,)
    return ()
