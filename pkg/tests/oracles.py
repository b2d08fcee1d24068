"""Slow but obvious reference implementations used by the tests."""

import os

from sigenc.encoder import level_sequences
from sigenc.grammar_store import Char, GrammarStore, Pair, RunOf

MARGIN = 27


def find_all(t, p):
    out = []
    i = t.find(p)
    while i >= 0:
        out.append(i + 1)
        i = t.find(p, i + 1)
    return out


def lcp(a, b):
    return len(os.path.commonprefix([a, b]))


def lce_fwd(s, t, i, j):
    return lcp(s[i - 1:], t[j - 1:])


def lce_bwd(s, t, i, j):
    return lcp(s[:i][::-1], t[:j][::-1])


def lz77(t):
    """Greedy self-referential LZ77 with leftmost sources, by direct search."""
    out = []
    j = 0
    n = len(t)
    while j < n:
        best, pos = 0, -1
        l = 1
        while j + l <= n:
            # an occurrence starting before j, allowed to run past it
            p = t.find(t[j:j + l], 0, j + l - 1)
            if p < 0:
                break
            best, pos = l, p
            l += 1
        if best == 0:
            out.append(("L", t[j]))
            j += 1
        else:
            out.append(("F", pos + 1, best))
            j += best
    return out


def leftmost_before(t, j, k):
    p = t.find(t[j - 1:j - 1 + k], 0, j - 1 + k - 1)
    return p + 1 if p >= 0 else None


def expand(store, e, memo=None):
    memo = {} if memo is None else memo
    if e in memo:
        return memo[e]
    x = store.assgn(e)
    if isinstance(x, Char):
        s = chr(x.code)
    elif isinstance(x, Pair):
        s = expand(store, x.left, memo) + expand(store, x.right, memo)
    else:
        s = expand(store, x.base, memo) * x.exp
    memo[e] = s
    return s


def reachable(store, roots):
    seen = set()
    stack = [r for r in roots if r is not None]
    while stack:
        e = stack.pop()
        if e in seen:
            continue
        seen.add(e)
        x = store.assgn(e)
        if isinstance(x, Pair):
            stack += [x.left, x.right]
        elif isinstance(x, RunOf):
            stack.append(x.base)
    return seen


def tree_occurrences(store, root):
    """Every (signature, start) of the binary derivation tree, by full walk."""
    out = []
    stack = [(root, 1)]
    while stack:
        e, pos = stack.pop()
        out.append((e, pos))
        x = store.assgn(e)
        if isinstance(x, Pair):
            stack.append((x.left, pos))
            stack.append((x.right, pos + store.len_of(x.left)))
        elif isinstance(x, RunOf):
            bl = store.len_of(x.base)
            for c in range(x.exp):
                stack.append((x.base, pos + c * bl))
    return out


def naive_uniq(enc, a, b):
    """Common sequence of T[a..b] straight from the level lists of the derivation."""
    store = enc.store
    seqs = level_sequences(enc)[::-1]  # bottom level first
    spans = []
    for seq in seqs:
        pos = 1
        row = []
        for s in seq:
            row.append((s, pos, pos + store.len_of(s) - 1))
            pos += store.len_of(s)
        spans.append(row)
    left, right = [], []
    t = 0
    while True:
        runs = spans[2 * t + 1]
        nodes = [r for r in runs if r[2] >= a and r[1] <= b]
        if len(nodes) <= MARGIN:
            for s, st, en in nodes:
                base = store.assgn(s).base
                left.append((base, (min(en, b) - max(st, a) + 1) // store.len_of(base)))
            break
        starts = {st for _, st, _ in spans[2 * t + 2]}
        f, g = nodes[0], nodes[-1]
        fb, gb = store.assgn(f[0]).base, store.assgn(g[0]).base
        left.append((fb, (f[2] - a + 1) // store.len_of(fb)))
        right.append((gb, (b - g[1] + 1) // store.len_of(gb)))
        k = 1
        while True:
            left.append(tuple(store.assgn(nodes[k][0])))
            k += 1
            if k - 1 >= 12 and nodes[k][1] in starts:
                break
        m = len(nodes) - 2
        cnt = 0
        while True:
            right.append(tuple(store.assgn(nodes[m][0])))
            cnt += 1
            if cnt >= 7 and nodes[m][1] in starts:
                break
            m -= 1
        a, b = nodes[k][1], nodes[m][1] - 1
        t += 1
    items = left + right[::-1]
    merged = []
    for s, k in items:
        if merged and merged[-1][0] == s:
            merged[-1][1] += k
        else:
            merged.append([s, k])
    return [tuple(x) for x in merged]


PAPER_TEXT = "CABCABABABABABABABABABCCCC"


def paper_grammar():
    """The worked run-length grammar: 17 signatures over A, B, C."""
    st = GrammarStore()
    rules = [
        (1, Char(ord("A"))), (2, Char(ord("B"))), (3, Char(ord("C"))),
        (4, RunOf(3, 4)), (5, RunOf(1, 1)), (6, RunOf(2, 1)), (7, RunOf(3, 1)),
        (8, Pair(7, 5)), (9, Pair(8, 6)), (10, Pair(5, 6)), (11, Pair(10, 4)),
        (12, RunOf(9, 2)), (13, RunOf(10, 7)), (14, RunOf(11, 1)), (15, Pair(12, 13)),
        (16, Pair(15, 14)), (17, RunOf(16, 1)),
    ]
    for e, x in rules:
        st.intern_with_id(e, x)
    return st


EXAMPLE_SLP = (
    "SLP 1\nS 11\n1 C 65\n2 C 66\n3 C 67\n4 P 3 1\n5 P 4 2\n6 P 5 5\n"
    "7 P 2 3\n8 P 1 2\n9 P 7 8\n10 P 6 9\n11 P 10 6\n"
)
EXAMPLE_SLP_TEXT = "CABCABBCABCABCAB"
