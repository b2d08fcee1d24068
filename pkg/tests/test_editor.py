import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sigenc.cli import dump_encoding
from sigenc.editor import (MergeError, delete_range, gc, insert_copy, insert_str,
                           merge_pow)
from sigenc.encoder import Encoding, PowSeq, RangeError, audit, encode_into, encode_string, uniq_pow
from sigenc.grammar_store import RunOf

import oracles


def rand_text(rng, n, alpha="ab"):
    return "".join(rng.choice(alpha) for _ in range(n))


def canonical(enc):
    """The edited start equals a fresh parse inside the same store."""
    store = enc.store
    before = set(store.signatures())
    with store.recording() as rec:
        s = encode_into(store, enc.text())
    ok = s == enc.start and not rec.created
    assert set(store.signatures()) == before
    return ok


def check(enc, text):
    assert enc.text() == text
    audit(enc)
    enc.store.audit()
    if enc.start is not None:
        assert set(enc.store.signatures()) == oracles.reachable(enc.store, [enc.start])
    assert canonical(enc)


def test_insert_into_empty_matches_fresh_encoding():
    enc = Encoding()
    d = insert_str(enc, 1, "abracadabra")
    assert dump_encoding(enc) == dump_encoding(encode_string("abracadabra"))
    assert sorted(d.added) == enc.store.signatures() and d.removed == []


def test_insert_then_delete_restores_text(paper_enc):
    text = oracles.PAPER_TEXT
    insert_str(paper_enc, 5, "B")
    check(paper_enc, text[:4] + "B" + text[4:])
    delete_range(paper_enc, 5, 1)
    check(paper_enc, text)


def test_delete_everything():
    enc = encode_string("hello world")
    d = delete_range(enc, 1, 11)
    assert enc.start is None and enc.text_len == 0
    assert len(enc.store) == 0
    assert sorted(d.removed) == d.removed and len(d.removed) > 0 and d.added == []


def test_delete_inside_unary_run():
    enc = encode_string("a" * 50)
    delete_range(enc, 20, 1)
    a = enc.store.char_sig("a")
    assert enc.store.assgn(enc.start) == RunOf(a, 49)
    assert len(enc.store) == 2


def test_range_errors():
    enc = encode_string("abc")
    with pytest.raises(RangeError):
        insert_str(enc, 5, "x")
    with pytest.raises(RangeError):
        insert_str(enc, 0, "x")
    with pytest.raises(ValueError):
        insert_str(enc, 1, "")
    with pytest.raises(RangeError):
        delete_range(enc, 3, 2)
    with pytest.raises(RangeError):
        delete_range(enc, 1, 0)
    with pytest.raises(RangeError):
        insert_copy(enc, 1, 2, 3)
    assert enc.text() == "abc"


def test_merge_single_piece_is_identity(rng):
    enc = encode_string(rand_text(rng, 500, "abc"))
    u = uniq_pow(enc, enc.start, 1, enc.text_len)
    start, d = merge_pow(enc, [u])
    assert start == enc.start and not d


def test_merge_cab_twice(paper_enc):
    u = uniq_pow(paper_enc, 17, 1, 3)
    start, _ = merge_pow(paper_enc, [u, u])
    assert oracles.expand(paper_enc.store, start) == "CABCAB"


def test_merge_random_splits(rng):
    for _ in range(100):
        s = rand_text(rng, rng.randint(2, 400), rng.choice(["ab", "abc", "aab"]))
        enc = encode_string(s)
        cuts = sorted(rng.sample(range(1, len(s)), min(len(s) - 1, rng.randint(1, 4))))
        bounds = [0] + cuts + [len(s)]
        pieces = [uniq_pow(enc, enc.start, a + 1, b - a) for a, b in zip(bounds, bounds[1:])]
        start, d = merge_pow(enc, pieces)
        # same text in the same store: nothing new, same start
        assert start == enc.start and d.added == []


def test_merge_errors():
    enc = encode_string("abc")
    with pytest.raises(MergeError):
        merge_pow(enc, [])
    with pytest.raises(MergeError):
        merge_pow(enc, [PowSeq(())])


def test_gc_idempotent(rng):
    enc = encode_string(rand_text(rng, 300))
    encode_into(enc.store, "zzzzyx")  # unpinned garbage
    removed = gc(enc)
    assert removed
    assert gc(enc) == []
    assert set(enc.store.signatures()) == oracles.reachable(enc.store, [enc.start])


def test_delta_bookkeeping(rng):
    s = rand_text(rng, 2000, "abc")
    enc = encode_string(s)
    for _ in range(30):
        before = set(enc.store.signatures())
        if rng.random() < 0.5 or len(s) < 10:
            i = rng.randint(1, len(s) + 1)
            y = rand_text(rng, rng.randint(1, 20), "abc")
            d = insert_str(enc, i, y)
            s = s[:i - 1] + y + s[i - 1:]
        else:
            i = rng.randint(1, len(s) - 5)
            k = rng.randint(1, 5)
            d = delete_range(enc, i, k)
            s = s[:i - 1] + s[i - 1 + k:]
        after = set(enc.store.signatures())
        assert set(d.added) == after - before
        assert set(d.removed) == before - after
        assert d.removed == sorted(d.removed)
    check(enc, s)


def test_insert_copy_matches_string_insert(rng):
    s = rand_text(rng, 600, "ab")
    enc = encode_string(s)
    for _ in range(20):
        src = rng.randint(1, len(s))
        k = rng.randint(1, min(80, len(s) - src + 1))
        i = rng.randint(1, len(s) + 1)
        insert_copy(enc, i, src, k)
        piece = s[src - 1:src - 1 + k]
        s = s[:i - 1] + piece + s[i - 1:]
    check(enc, s)


ops = st.lists(st.tuples(st.booleans(), st.integers(0, 10**6), st.integers(1, 12),
                         st.text(alphabet="abc", min_size=1, max_size=12)), max_size=25)


@settings(max_examples=60, deadline=None)
@given(st.text(alphabet="abc", max_size=120), ops)
def test_random_edit_sequences(s, seq):
    enc = encode_string(s)
    for is_insert, pos, k, y in seq:
        if is_insert or not s:
            i = pos % (len(s) + 1) + 1
            insert_str(enc, i, y)
            s = s[:i - 1] + y + s[i - 1:]
        else:
            i = pos % len(s) + 1
            k = min(k, len(s) - i + 1)
            delete_range(enc, i, k)
            s = s[:i - 1] + s[i - 1 + k:]
    check(enc, s)
