"""Deterministic locally consistent parsing.

A sequence of integers with no two equal neighbours is reduced to three
colours, landmark bits are placed on the coloured sequence, and the bits
cut the sequence into short blocks.  Every bit is a function of a bounded
window around its position, which is what makes the parse locally
consistent.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, NamedTuple, Sequence

ALL_ONES = (1 << 64) - 1


class ParseError(ValueError):
    pass


@dataclass(frozen=True)
class ParserParams:
    delta_l: int = 12
    delta_r: int = 6
    reduce_rounds: int = 6

    def __post_init__(self):
        if self.reduce_rounds < 1:
            raise ValueError("reduce_rounds must be positive")
        if self.delta_l < self.reduce_rounds + 6:
            raise ValueError("delta_l must be at least reduce_rounds + 6")
        if self.delta_r < 6:
            raise ValueError("delta_r must be at least 6")

    @property
    def margin(self) -> int:
        # stop size for common sequences and per-level seam width
        return self.delta_l + self.delta_r + 9


DEFAULT_PARAMS = ParserParams()


class Run(NamedTuple):
    symbol: int
    exponent: int


def _check_adjacent(p: Sequence[int]) -> None:
    for i in range(1, len(p)):
        if p[i] == p[i - 1]:
            raise ParseError(f"equal neighbours at positions {i} and {i + 1}")


def relabel(labels: Sequence[int]) -> List[int]:
    """One round: 2k + bit k of each label, k the lowest bit where it differs from its left neighbour."""
    prev = ALL_ONES
    out = [0] * len(labels)
    for i, x in enumerate(labels):
        diff = x ^ prev
        k = (diff & -diff).bit_length() - 1
        out[i] = 2 * k + ((x >> k) & 1)
        prev = x
    return out


def reduce_colors(p: Sequence[int], rounds: int = DEFAULT_PARAMS.reduce_rounds) -> List[int]:
    """Colour ``p`` with values in {0, 1, 2} so that neighbours differ."""
    if not p:
        raise ParseError("empty sequence")
    _check_adjacent(p)
    labels = list(p)
    n = len(labels)
    for _ in range(rounds):
        labels = relabel(labels)
    # after enough rounds the labels are in [0, 5]; squeeze 5, 4, 3 away.
    # positions sharing a colour are never adjacent, so one pass per colour
    # can update in place.
    last = n - 1
    for colour in (5, 4, 3):
        for i in range(n):
            if labels[i] != colour:
                continue
            left = labels[i - 1] if i > 0 else -1
            right = labels[i + 1] if i < last else -1
            c = 0
            while c == left or c == right:
                c += 1
            labels[i] = c
    if any(c > 2 for c in labels):
        raise ParseError("too few reduction rounds for the input range")
    return labels


def compute_landmarks(p: Sequence[int], params: ParserParams = DEFAULT_PARAMS) -> List[int]:
    n = len(p)
    if n == 0:
        raise ParseError("empty sequence")
    if n == 1:
        return [1]
    c = reduce_colors(p, params.reduce_rounds)
    last = n - 1
    peak = [0] * n
    for i in range(n):
        left = c[i - 1] if i > 0 else -1
        right = c[i + 1] if i < last else -1
        if c[i] > left and c[i] > right:
            peak[i] = 1
    bits = peak[:]
    for i in range(1, last):
        if c[i] < c[i - 1] and c[i] < c[i + 1] and not peak[i - 1] and not peak[i + 1]:
            bits[i] = 1
    bits[0] = 1
    bits[1] = 0
    # a mark on the last position would leave a block of length one
    bits[last] = 0
    return bits


def eblock(p: Sequence[int], d: Sequence[int]) -> List[List[int]]:
    if len(p) != len(d):
        raise ParseError("sequence and bits differ in length")
    if not p:
        return []
    if d[0] != 1:
        raise ParseError("first bit must be set")
    blocks: List[List[int]] = []
    cur: List[int] = []
    for x, bit in zip(p, d):
        if bit and cur:
            blocks.append(cur)
            cur = []
        cur.append(x)
    blocks.append(cur)
    return blocks


def epow(s: Sequence[int]) -> List[Run]:
    if not s:
        raise ParseError("empty sequence")
    runs: List[Run] = []
    cur, count = s[0], 0
    for x in s:
        if x == cur:
            count += 1
        else:
            runs.append(Run(cur, count))
            cur, count = x, 1
    runs.append(Run(cur, count))
    return runs


def check_landmarks(bits: Sequence[int]) -> bool:
    """True when ``bits`` satisfies the landmark invariants."""
    n = len(bits)
    if n == 0 or bits[0] != 1:
        return False
    for i in range(n - 1):
        if bits[i] and bits[i + 1]:
            return False
    # windows of four positions lying entirely before the last position
    for i in range(0, n - 4):
        if not any(bits[i:i + 4]):
            return False
    return True
