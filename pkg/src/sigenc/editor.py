"""Substring insertion and deletion on a live encoding.

Every edit cuts the text into pieces, replaces each piece by its common
sequence, and merges the pieces back.  The merge works one level pair at a
time: tokens on the current level are reparsed, tokens above it are kept
frozen except for a margin next to anything that was reparsed.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterator, List, Optional, Sequence, Tuple

from .encoder import Encoding, PowSeq, RangeError, encode_into, uniq_pow
from .grammar_store import GrammarStore, InvariantError, RunOf
from .lcp_parse import ParserParams, compute_landmarks, eblock

Token = Tuple[int, int]


class MergeError(ValueError):
    pass


@dataclass
class EditDelta:
    added: List[int] = field(default_factory=list)
    removed: List[int] = field(default_factory=list)

    def __bool__(self):
        return bool(self.added or self.removed)


def _normalize(store: GrammarStore, piece) -> List[Token]:
    out: List[Token] = []
    for sig, exp in piece:
        if exp < 1:
            raise MergeError("exponent must be positive")
        if store.level_of(sig) % 2 == 1:
            x = store.assgn(sig)
            sig, exp = x.base, x.exp * exp
        out.append((sig, exp))
    return out


class _Merger:
    def __init__(self, store: GrammarStore, params: ParserParams):
        self.store = store
        self.params = params
        self.margin = params.margin

    # -- token expansion ---------------------------------------------------

    def _children(self, sig: int) -> List[Token]:
        return [tuple(self.store.assgn(r)) for r in self.store.block_children(sig)]

    def _open_group(self, group: List[Token], lvl: int) -> Tuple[List[Token], List[Token], List[Token]]:
        """Expand ``margin`` tokens of level ``lvl`` off each end of a frozen group."""
        level_of = self.store.level_of
        dq = deque(group)
        left: List[Token] = []
        cnt = 0
        while dq:
            s, k = dq[0]
            if level_of(s) == lvl:
                left.append(dq.popleft())
                cnt += 1
            elif cnt >= self.margin:
                break
            else:
                dq.popleft()
                if k > 1:
                    dq.appendleft((s, k - 1))
                dq.extendleft(reversed(self._children(s)))
        right: List[Token] = []
        cnt = 0
        while dq:
            s, k = dq[-1]
            if level_of(s) == lvl:
                right.append(dq.pop())
                cnt += 1
            elif cnt >= self.margin:
                break
            else:
                dq.pop()
                if k > 1:
                    dq.append((s, k - 1))
                dq.extend(self._children(s))
        right.reverse()
        return left, list(dq), right

    def _stream(self, tokens: Sequence[Token], lvl: int, backward: bool) -> Iterator[Token]:
        """Level-``lvl`` tokens of ``tokens`` one at a time, outward."""
        level_of = self.store.level_of
        seq = reversed(tokens) if backward else tokens
        stack: List[Token] = []
        for tok in seq:
            stack.append(tok)
            while stack:
                s, k = stack.pop()
                if level_of(s) == lvl:
                    yield s, k
                    continue
                if k > 1:
                    stack.append((s, k - 1))
                kids = self._children(s)
                stack.extend(kids if backward else reversed(kids))

    def _peek(self, tokens: Sequence[Token], lvl: int, need: int, backward: bool) -> List[int]:
        """Up to ``need`` complete runs next to a stretch, nearest first."""
        runs: List[List[int]] = []
        for s, k in self._stream(tokens, lvl, backward):
            if runs and runs[-1][0] == s:
                runs[-1][1] += k
                continue
            if len(runs) == need:
                break
            runs.append([s, k])
        return [self.store.intern(RunOf(b, k)) for b, k in runs]

    # -- stages ------------------------------------------------------------

    def merge(self, pieces: List[List[Token]]) -> int:
        store = self.store
        lvl = 0
        tagged = [(tok, n) for n, piece in enumerate(pieces) for tok in piece]
        first = True
        while True:
            if first:
                toks = [t for t, _ in tagged]
                owners = [n for _, n in tagged]
            else:
                owners = None
            for s, _ in toks:
                if store.level_of(s) < lvl:
                    raise InvariantError("token below the current level")
            if all(store.level_of(s) == lvl for s, _ in toks):
                runs = _runs(toks)
                if len(runs) == 1:
                    return store.intern(RunOf(*runs[0]))
            # split into explicit stretches and frozen groups, opening the groups
            parts: List[Tuple[bool, List[Token]]] = []
            i = 0
            n = len(toks)
            while i < n:
                explicit = store.level_of(toks[i][0]) == lvl
                j = i + 1
                while j < n and (store.level_of(toks[j][0]) == lvl) == explicit and (
                        explicit or owners is None or owners[j] == owners[i]):
                    j += 1
                chunk = toks[i:j]
                if explicit:
                    _push(parts, True, chunk)
                else:
                    left, mid, right = self._open_group(chunk, lvl)
                    _push(parts, True, left)
                    _push(parts, False, mid)
                    _push(parts, True, right)
                i = j
            nxt: List[Token] = []
            for idx, (explicit, chunk) in enumerate(parts):
                if not explicit:
                    nxt.extend(chunk)
                    continue
                before = [t for _, c in parts[:idx] for t in c]
                after = [t for _, c in parts[idx + 1:] for t in c]
                nxt.extend(self._reparse(chunk, before, after, lvl))
            toks = nxt
            lvl += 2
            first = False

    def _reparse(self, chunk: List[Token], before: List[Token], after: List[Token], lvl: int) -> List[Token]:
        store = self.store
        runs = _runs(chunk)
        pows = [store.intern(RunOf(b, k)) for b, k in runs]
        lp = self._peek(before, lvl, self.params.delta_l + 2, True)[::-1] if before else []
        rp = self._peek(after, lvl, self.params.delta_r + 2, False) if after else []
        if lp and store.assgn(lp[-1]).base == runs[0][0]:
            raise InvariantError("a run crosses the left edge of a reparsed stretch")
        if rp and store.assgn(rp[0]).base == runs[-1][0]:
            raise InvariantError("a run crosses the right edge of a reparsed stretch")
        bits = compute_landmarks(lp + pows + rp, self.params)
        lo, hi = len(lp), len(lp) + len(pows)
        if lp and not bits[lo]:
            raise InvariantError("reparsed stretch does not start a block")
        if rp and not bits[hi]:
            raise InvariantError("reparsed stretch does not end a block")
        d = bits[lo:hi]
        d[0] = 1
        return [(store.fold_block(bl), 1) for bl in eblock(pows, d)]


def _push(parts, explicit: bool, chunk: List[Token]) -> None:
    if not chunk:
        return
    if parts and parts[-1][0] == explicit:
        parts[-1][1].extend(chunk)
    else:
        parts.append((explicit, list(chunk)))


def _runs(tokens: Sequence[Token]) -> List[Tuple[int, int]]:
    out: List[List[int]] = []
    for s, k in tokens:
        if out and out[-1][0] == s:
            out[-1][1] += k
        else:
            out.append([s, k])
    return [(s, k) for s, k in out]


def merge_pow(enc: Encoding, pieces: Sequence[PowSeq]) -> Tuple[int, EditDelta]:
    """Start signature for the concatenation of ``pieces``.

    The returned signature is not pinned; callers that keep it must pin it.
    """
    if not pieces:
        raise MergeError("nothing to merge")
    store = enc.store
    norm = [_normalize(store, p) for p in pieces]
    if any(not p for p in norm):
        raise MergeError("empty piece")
    with store.recording() as rec:
        start = _Merger(store, enc.params).merge(norm)
    return start, EditDelta(list(rec.created), [])


def _replace(enc: Encoding, pieces: List[PowSeq], pinned: Sequence[int]) -> None:
    store = enc.store
    new = merge_pow(enc, pieces)[0] if pieces else None
    enc.set_start(new)
    for s in pinned:
        store.release(s)
    store.gc()


def _delta(store: GrammarStore, rec) -> EditDelta:
    created = set(rec.created)
    removed = set(rec.removed)
    added = [s for s in rec.created if s in store and s not in removed]
    gone = sorted(s for s in removed if s not in created)
    return EditDelta(added, gone)


def insert_str(enc: Encoding, i: int, y: str) -> EditDelta:
    if not y:
        raise ValueError("inserted string must be nonempty")
    n = enc.text_len
    if not 1 <= i <= n + 1:
        raise RangeError(f"insert position {i} outside 1..{n + 1}")
    store = enc.store
    with store.recording() as rec:
        ystart = encode_into(store, y, enc.params)
        store.pin(ystart)
        if enc.start is None:
            enc.set_start(ystart)
            store.release(ystart)
            store.gc()
            return _delta(store, rec)
        pieces = []
        if i > 1:
            pieces.append(uniq_pow(enc, enc.start, 1, i - 1))
        pieces.append(uniq_pow(enc, ystart, 1, len(y)))
        if i <= n:
            pieces.append(uniq_pow(enc, enc.start, i, n - i + 1))
        _replace(enc, pieces, [ystart])
    return _delta(store, rec)


def delete_range(enc: Encoding, i: int, k: int) -> EditDelta:
    n = enc.text_len
    if k < 1 or i < 1 or i + k - 1 > n:
        raise RangeError(f"delete range [{i}, {i + k - 1}] outside 1..{n}")
    store = enc.store
    with store.recording() as rec:
        pieces = []
        if i > 1:
            pieces.append(uniq_pow(enc, enc.start, 1, i - 1))
        if i + k <= n:
            pieces.append(uniq_pow(enc, enc.start, i + k, n - i - k + 1))
        _replace(enc, pieces, [])
    return _delta(store, rec)


def insert_copy(enc: Encoding, i: int, src: int, k: int) -> EditDelta:
    """Insert a copy of the current T[src..src+k-1] before position ``i``."""
    n = enc.text_len
    if not 1 <= i <= n + 1:
        raise RangeError(f"insert position {i} outside 1..{n + 1}")
    if k < 1 or src < 1 or src + k - 1 > n:
        raise RangeError(f"source range [{src}, {src + k - 1}] outside 1..{n}")
    store = enc.store
    with store.recording() as rec:
        pieces = []
        if i > 1:
            pieces.append(uniq_pow(enc, enc.start, 1, i - 1))
        pieces.append(uniq_pow(enc, enc.start, src, k))
        if i <= n:
            pieces.append(uniq_pow(enc, enc.start, i, n - i + 1))
        _replace(enc, pieces, [])
    return _delta(store, rec)


def gc(enc: Encoding) -> List[int]:
    return enc.store.gc()
