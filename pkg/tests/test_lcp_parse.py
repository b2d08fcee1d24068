import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigenc.lcp_parse import (DEFAULT_PARAMS, ParseError, ParserParams, Run, check_landmarks,
                              compute_landmarks, eblock, epow, reduce_colors, relabel)


def distinct_adjacent(rng, n, hi=2**20):
    out = [rng.randrange(hi)]
    while len(out) < n:
        x = rng.randrange(hi)
        if x != out[-1]:
            out.append(x)
    return out


adjacent_distinct = st.lists(st.integers(0, 2**62), min_size=1, max_size=200).map(
    lambda xs: [x for i, x in enumerate(xs) if i == 0 or x != xs[i - 1]])


def test_params_defaults_and_validation():
    p = ParserParams()
    assert (p.delta_l, p.delta_r, p.reduce_rounds) == (12, 6, 6)
    assert p.margin == 27
    with pytest.raises(ValueError):
        ParserParams(delta_l=11)
    with pytest.raises(ValueError):
        ParserParams(delta_r=5)


def test_reduce_single():
    assert reduce_colors([5])[0] in (0, 1, 2)


def test_relabel_first_round_by_hand():
    # 3 against the all-ones pad first differs at bit 2 (bit value 0) -> 4;
    # 7 against 3 first differs at bit 2 (bit value 1) -> 5
    assert relabel([3, 7]) == [4, 5]
    out = reduce_colors([3, 7])
    assert out[0] != out[1] and set(out) <= {0, 1, 2}


def test_reduce_random_is_a_colouring(rng):
    p = distinct_adjacent(rng, 256, 2**64)
    c = reduce_colors(p)
    assert len(c) == 256
    assert all(x in (0, 1, 2) for x in c)
    assert all(c[i] != c[i + 1] for i in range(255))


def test_reduce_rejects_equal_neighbours():
    with pytest.raises(ParseError):
        reduce_colors([1, 1])
    with pytest.raises(ParseError):
        compute_landmarks([])


def test_landmarks_trivial():
    assert compute_landmarks([5]) == [1]
    assert compute_landmarks([3, 7]) == [1, 0]


@settings(max_examples=200, deadline=None)
@given(adjacent_distinct)
def test_landmark_invariants(p):
    bits = compute_landmarks(p)
    assert len(bits) == len(p)
    assert check_landmarks(bits)
    blocks = eblock(p, bits)
    assert [x for b in blocks for x in b] == p
    if len(p) > 1:
        assert all(2 <= len(b) <= 4 for b in blocks[:-1])
        assert 2 <= len(blocks[-1]) <= 5


def test_planted_window_gives_equal_bits(rng):
    dl, dr = DEFAULT_PARAMS.delta_l, DEFAULT_PARAMS.delta_r
    for _ in range(50):
        p = distinct_adjacent(rng, 64)
        # copy the window around position 20 to around position 40 (0-based 19, 39);
        # both windows lie fully inside the sequence
        src = p[19 - dl:19 + dr + 1]
        p[39 - dl:39 + dr + 1] = src
        if any(p[i] == p[i + 1] for i in range(63)):
            continue
        bits = compute_landmarks(p)
        assert bits[19] == bits[39]


@settings(max_examples=100, deadline=None)
@given(adjacent_distinct, adjacent_distinct, adjacent_distinct)
def test_locality_across_sequences(left, mid, right):
    # the same interior window inside two different contexts
    dl, dr = DEFAULT_PARAMS.delta_l, DEFAULT_PARAMS.delta_r
    rng = random.Random(len(left) * 1000 + len(mid))
    core = distinct_adjacent(rng, dl + dr + 1, 2**30)
    # separators above every generated value keep neighbours distinct
    a = left + [2**63] + core + [2**63 + 1] + right
    b = right[::-1] + [2**63 + 2] + core + [2**63 + 3] + mid
    ia, ib = len(left) + 1 + dl, len(right) + 1 + dl
    assert compute_landmarks(a)[ia] == compute_landmarks(b)[ib]


def test_eblock_worked_example():
    p = [1, 2, 3, 2, 5, 7, 6, 4, 3, 4, 3, 4, 1, 2, 3, 4, 5]
    d = [1, 0, 0, 1, 0, 1, 0, 0, 1, 0, 0, 0, 1, 0, 1, 0, 0]
    assert eblock(p, d) == [[1, 2, 3], [2, 5], [7, 6, 4], [3, 4, 3, 4], [1, 2], [3, 4, 5]]


def test_eblock_small():
    assert eblock([3, 7], [1, 0]) == [[3, 7]]
    with pytest.raises(ParseError):
        eblock([3, 7], [1])


def test_eblock_random_partition(rng):
    p = distinct_adjacent(rng, 1000)
    blocks = eblock(p, compute_landmarks(p))
    assert [x for b in blocks for x in b] == p
    assert all(2 <= len(b) <= 4 for b in blocks[:-1]) and len(blocks[-1]) <= 5


def test_epow_worked_example():
    s = [ord(c) for c in "aabbbbbabb"]
    a, b = ord("a"), ord("b")
    assert epow(s) == [Run(a, 2), Run(b, 5), Run(a, 1), Run(b, 2)]


def test_epow_trivial():
    assert epow([9]) == [(9, 1)]
    assert epow([4, 4, 4, 4]) == [(4, 4)]
    with pytest.raises(ParseError):
        epow([])


@settings(max_examples=100, deadline=None)
@given(st.lists(st.integers(0, 3), min_size=1, max_size=100))
def test_epow_roundtrip(s):
    runs = epow(s)
    assert [x for r in runs for x in [r.symbol] * r.exponent] == s
    assert all(runs[i].symbol != runs[i + 1].symbol for i in range(len(runs) - 1))


def test_determinism(rng):
    p = distinct_adjacent(rng, 500)
    assert compute_landmarks(p) == compute_landmarks(list(p))
