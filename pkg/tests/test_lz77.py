import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigenc.encoder import RangeError, encode_into, encode_string
from sigenc.index import PatternHandle, build_index, left_part
from sigenc.lz77 import (FactorFormatError, Literal, Ref, compute_weights, expand_factors,
                         factorize, format_factors, from_factors, fst, fst_occ, parse_factors)

import oracles


def rand_text(rng, n, alpha="ab"):
    return "".join(rng.choice(alpha) for _ in range(n))


def as_factors(naive):
    return [Literal(f[1]) if f[0] == "L" else Ref(f[1], f[2]) for f in naive]


def setup(s):
    enc = encode_string(s)
    idx = build_index(enc)
    wmap = compute_weights(enc)
    idx.set_weights(wmap.weights)
    return enc, idx, wmap


def test_weights_on_paper_grammar(paper_enc):
    wmap = compute_weights(paper_enc)
    # the start node sits at 1; its weight is 1 plus its left part
    assert wmap[17] == 1 + left_part(paper_enc.store, 17)[1]
    # CAB first appears at 1; the block folds as (CA)B so its left part is CA
    assert wmap[9] == 3
    assert wmap.minpos[9] == 1


def test_weights_brute_force(rng):
    enc = encode_string(rand_text(rng, 800, "abc"))
    wmap = compute_weights(enc)
    first = {}
    for e, pos in oracles.tree_occurrences(enc.store, enc.start):
        first[e] = min(first.get(e, pos), pos)
    assert wmap.minpos == first
    for e, w in wmap.weights.items():
        assert w == first[e] + left_part(enc.store, e)[1]


def test_fst_occ_none_and_unary():
    enc, idx, wmap = setup("abcabc")
    assert fst(enc, idx, wmap, 4, 3) == 1
    # "cb" never occurs in the text
    assert fst_occ(enc, idx, wmap, PatternHandle(encode_into(enc.store, "cb"), 1, 2), 1) is None
    enc, idx, wmap = setup("aaaa")
    p = PatternHandle(enc.start, 2, 2)
    # the only point is the run itself; its weight is 1 + 1
    assert fst_occ(enc, idx, wmap, p, 1) == 2


def test_fst_basics():
    enc, idx, wmap = setup("aaaaa")
    assert fst(enc, idx, wmap, 1, 1) is None
    assert fst(enc, idx, wmap, 1, 3) is None
    assert fst(enc, idx, wmap, 2, 3) == 1
    with pytest.raises(RangeError):
        fst(enc, idx, wmap, 4, 3)


def test_fst_random(rng):
    for alpha in ("ab", "abc", "abcdefgh"):
        s = rand_text(rng, 1000, alpha)
        enc, idx, wmap = setup(s)
        for _ in range(150):
            j = rng.randint(1, len(s))
            k = rng.randint(1, min(40, len(s) - j + 1))
            assert fst(enc, idx, wmap, j, k) == oracles.leftmost_before(s, j, k)


def test_factorize_examples():
    assert factorize("") == []
    assert factorize("aabab") == [Literal("a"), Ref(1, 1), Literal("b"), Ref(2, 2)]
    assert factorize("aaaa") == [Literal("a"), Ref(1, 3)]
    assert factorize("abcd") == [Literal(c) for c in "abcd"]


def test_factorize_random(rng):
    for alpha in ("ab", "abc", "a", "abcdefghijklmnop"):
        for n in (1, 2, 50, 600):
            s = rand_text(rng, n, alpha)
            assert factorize(s) == as_factors(oracles.lz77(s))


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="abc", max_size=150))
def test_factorize_property(s):
    f = factorize(s)
    assert f == as_factors(oracles.lz77(s))
    assert expand_factors(f) == s


def test_from_factors_roundtrip(rng):
    for alpha in ("ab", "abc", "abcdefg"):
        s = rand_text(rng, 700, alpha)
        enc = from_factors(factorize(s))
        assert enc.text() == s
        # the same parse as encoding the text directly into that store
        assert encode_into(enc.store, s) == enc.start


def test_from_factors_unary_stays_small():
    for n in (10, 100, 1000):
        enc = from_factors([Literal("a"), Ref(1, n - 1)])
        assert enc.text() == "a" * n
        assert len(enc.store) == 2


def test_from_factors_errors():
    with pytest.raises(FactorFormatError):
        from_factors([Ref(1, 1)])
    with pytest.raises(FactorFormatError):
        from_factors([Literal("a"), Ref(2, 1)])
    with pytest.raises(FactorFormatError):
        from_factors([Literal("a"), Ref(1, 0)])
    with pytest.raises(FactorFormatError):
        from_factors([Literal("ab")])
    with pytest.raises(FactorFormatError):
        expand_factors([Ref(1, 1)])


def test_format_and_parse():
    f = [Literal("a"), Literal("\n"), Literal(" "), Ref(1, 12), Literal("\xff")]
    data = format_factors(f)
    assert data == b"L a\nL \n\nL  \nF 1 12\nL \xff\n"
    assert parse_factors(data) == f
    assert parse_factors(b"") == []


@pytest.mark.parametrize("bad", [b"X 1\n", b"L ab\n", b"L a", b"F 1\n", b"F 1 2", b"F a b\n",
                                 b"F 1 2 3\n"])
def test_parse_errors(bad):
    with pytest.raises(FactorFormatError):
        parse_factors(bad)
