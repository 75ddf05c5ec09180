import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from droms_sip.words import (AmbientMismatch, GroupWord, UnknownGenerator, WordError, abelianize,
                             ambient_for, canonical_word, invert, multiply, normal_form,
                             parse_word, project_central, render, words_equal)

from conftest import F2, P3, F2xZ_nested, Z2xF2, ZxF2_Z, graph

P3abc = graph("a b c | a-b b-c")     # centre b, factors a | c
SMALL = [F2, P3, graph("a b c d | a-b c-d"), graph("a b c d | a-d b-d c-d a-b"),
         graph("a b c | a-b b-c a-c")]


# -- brute-force rewriting oracle ----------------------------------------------

def _moves(G, w):
    for i in range(len(w) - 1):
        (x, e), (y, f) = w[i], w[i + 1]
        if x == y and e == -f:
            yield w[:i] + w[i + 2:]
        elif x != y and G.adjacent(x, y):
            yield w[:i] + (w[i + 1], w[i]) + w[i + 2:]


def brute_key(G, w):
    """Least shortest word reachable by commutation swaps and free cancellations."""
    seen = {w}
    stack = [w]
    while stack:
        u = stack.pop()
        for v in _moves(G, u):
            if v not in seen:
                seen.add(v)
                stack.append(v)
    n = min(len(u) for u in seen)
    return min(u for u in seen if len(u) == n)


def unit_words(G, n):
    letters = [(v, e) for v in G.vertices for e in (1, -1)]
    return itertools.product(letters, repeat=n)


def nf_key(G, w):
    return normal_form(GroupWord(G, w), ambient_for(G).tree)


@pytest.mark.parametrize("G", SMALL, ids=lambda g: str(g))
def test_normal_form_matches_rewriting(G):
    rng = random.Random(11)
    words = [w for n in range(5) for w in unit_words(G, n)]
    letters = [(v, e) for v in G.vertices for e in (1, -1)]
    words += [tuple(rng.choice(letters) for _ in range(rng.randint(5, 6))) for _ in range(1500)]
    by_nf, by_brute = {}, {}
    for w in words:
        a, b = nf_key(G, w), brute_key(G, w)
        assert by_nf.setdefault(a, b) == b
        assert by_brute.setdefault(b, a) == a


# -- examples -------------------------------------------------------------------

def test_parse_examples():
    G = graph("a b c")
    assert parse_word(G, "a b^-1 c^2").letters == (("a", 1), ("b", -1), ("c", 2))
    assert parse_word(G, "").letters == ()
    assert parse_word(G, "1").letters == ()
    with pytest.raises(UnknownGenerator):
        parse_word(G, "z")
    with pytest.raises(WordError):
        parse_word(G, "a^x")


def test_normal_form_p3():
    tree = ambient_for(P3abc).tree
    nf = normal_form(parse_word(P3abc, "a b c b^-1 a"), tree)
    assert nf.central == (0,)
    assert len(nf.syllables) == 3
    nf = normal_form(parse_word(P3abc, "b a b^-1"), tree)
    assert nf.central == (0,) and len(nf.syllables) == 1
    nf = normal_form(parse_word(P3abc, "a a^-1"), tree)
    assert nf.is_identity()


def test_central_exponents_add():
    tree = ambient_for(P3).tree
    u = parse_word(P3, "t^2 a")
    v = parse_word(P3, "t^-5 b")
    assert normal_form(multiply(u, v), tree).central == (-3,)


def test_multiply_ambient_mismatch():
    with pytest.raises(AmbientMismatch):
        multiply(parse_word(P3, "a"), parse_word(F2, "a"))


def test_project_central():
    tree = ambient_for(P3abc).tree
    vec, rest = project_central(parse_word(P3abc, "a b^2 c"), tree)
    assert vec == (2,) and words_equal(rest, parse_word(P3abc, "a c"))
    vec, rest = project_central(parse_word(P3abc, ""), tree)
    assert vec == (0,) and rest.letters == ()
    vec, rest = project_central(parse_word(P3abc, "b^5"), tree)
    assert vec == (5,) and rest.letters == ()


def test_abelianize_examples():
    assert abelianize(parse_word(F2, "a b a^-1")) == (0, 1)
    assert abelianize(parse_word(F2, "")) == (0, 0)
    assert abelianize(parse_word(F2, "a^2 b^-3")) == (2, -3)


def test_canonical_word_renders_nested_centres():
    w = canonical_word(parse_word(F2xZ_nested, "c a d t c^-1 t^-2"))
    assert str(w) == "t^-1 c a c^-1 d"


# -- properties -----------------------------------------------------------------

AMBIENTS = [F2, P3, Z2xF2, ZxF2_Z, F2xZ_nested]


@st.composite
def word_in(draw, G):
    n = draw(st.integers(0, 10))
    return GroupWord(G, tuple((draw(st.sampled_from(G.vertices)), draw(st.sampled_from([-2, -1, 1, 2])))
                              for _ in range(n)))


@st.composite
def ambient_and_words(draw, k=2):
    G = draw(st.sampled_from(AMBIENTS))
    return (G,) + tuple(draw(word_in(G)) for _ in range(k))


@settings(max_examples=200, deadline=None)
@given(ambient_and_words(1))
def test_normal_form_idempotent(data):
    G, u = data
    tree = ambient_for(G).tree
    nf = normal_form(u, tree)
    assert normal_form(GroupWord(G, render(nf, tree)), tree) == nf


@settings(max_examples=200, deadline=None)
@given(ambient_and_words(2))
def test_normal_form_respects_products(data):
    G, u, v = data
    tree = ambient_for(G).tree
    ru = GroupWord(G, render(normal_form(u, tree), tree))
    rv = GroupWord(G, render(normal_form(v, tree), tree))
    assert normal_form(multiply(u, v), tree) == normal_form(multiply(ru, rv), tree)
    assert normal_form(multiply(u, invert(u)), tree).is_identity()


@settings(max_examples=200, deadline=None)
@given(ambient_and_words(3))
def test_associativity(data):
    G, u, v, w = data
    assert words_equal(multiply(multiply(u, v), w), multiply(u, multiply(v, w)))


@settings(max_examples=200, deadline=None)
@given(ambient_and_words(2))
def test_abelianize_additive(data):
    G, u, v = data
    lhs = abelianize(multiply(u, v))
    assert lhs == tuple(x + y for x, y in zip(abelianize(u), abelianize(v)))
