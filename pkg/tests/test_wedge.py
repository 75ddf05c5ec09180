import random

import pytest

from droms_sip.expressions import evaluate
from droms_sip.oracle import enumerate_subgroup_ball
from droms_sip.solver import FactorOracle, Solver, make_subgroup, membership
from droms_sip.wedge import (NotReduced, PreconditionViolated, TransformationSpec, WedgeAutomaton,
                             WedgeError, apply_transformation, attach_thread, certificate,
                             flower_automaton, kurosh_decomposition, read_element, reduce, to_dot)
from droms_sip.words import GroupWord, ambient_for, canon, inv, mul

from conftest import F2, F3, F2_Z, P3, ZxF2_Z, graph, rand_letters, word

AB_BC = graph("a b c | b-c")      # Z * Z^2


def setup(G):
    root = ambient_for(G).root
    return root, FactorOracle(Solver(), root)


def flower(G, *texts):
    root = ambient_for(G).root
    return flower_automaton(root, [word(G, t).letters for t in texts])


def recognised(A, oracle):
    """Membership function of the subgroup read by A (after reducing a copy)."""
    B, cert = reduce(A, oracle)
    assert cert.reduced
    K = kurosh_decomposition(B, oracle)
    return B, K, (lambda elt: read_element(B, K, elt) is not None)


# -- flowers ---------------------------------------------------------------------

def test_flower_two_syllables():
    A = flower(F2, "a b")
    assert A.size() == {"primary": 2, "secondary": 2, "arcs": 4}
    labels = sorted(arc.label for arc in A.arcs.values())
    assert labels == [(), (), (("a", 1),), (("b", 1),)]


def test_flower_empty():
    A = flower(F2)
    assert A.size() == {"primary": 1, "secondary": 0, "arcs": 0}


def test_flower_single_syllable():
    A = flower(F2, "a")
    assert A.size() == {"primary": 1, "secondary": 1, "arcs": 2}
    assert {arc.p for arc in A.arcs.values()} == {A.bp}
    assert sorted(arc.label for arc in A.arcs.values()) == [(), (("a", 1),)]


def test_flower_needs_free_product():
    with pytest.raises(WedgeError):
        WedgeAutomaton(ambient_for(P3).root)


# -- elementary transformations ---------------------------------------------------

def test_closed_folding():
    root, oracle = setup(F2)
    A = flower(F2, "a")
    e1, e2 = sorted(A.arcs)
    B = apply_transformation(A, TransformationSpec("closed_folding", (e1, e2)))
    assert len(B.arcs) == 1 and B.arcs[e1].label == ()
    (q,) = B.secondaries
    assert B.secondaries[q].gens == [(("a", -1),)]


def test_adjustment_by_identity_is_noop():
    root, oracle = setup(F2)
    A = flower(F2, "a b", "b a")
    e = min(A.arcs)
    B = apply_transformation(A, TransformationSpec("adjustment", (e,), element=()), oracle)
    assert to_dot(B) == to_dot(A)


def test_adjustment_outside_label_rejected():
    root, oracle = setup(F2)
    A = flower(F2, "a")
    with pytest.raises(PreconditionViolated):
        apply_transformation(A, TransformationSpec("adjustment", (0,), element=(("a", 1),)), oracle)


def test_isolation_on_connected_is_noop():
    A = flower(F2, "a b^2", "b a^-1")
    assert to_dot(apply_transformation(A, TransformationSpec("isolation"))) == to_dot(A)


def test_folding_preconditions():
    A = flower(F2, "a b")
    with pytest.raises(PreconditionViolated):
        apply_transformation(A, TransformationSpec("closed_folding", (0, 0)))
    with pytest.raises(PreconditionViolated):
        apply_transformation(A, TransformationSpec("primary_open_folding", (0, 2)))
    with pytest.raises(PreconditionViolated):
        apply_transformation(A, TransformationSpec("teleport"))


# -- reduce ----------------------------------------------------------------------

def test_reduce_duplicate_generator():
    root, oracle = setup(F2)
    B, cert = reduce(flower(F2, "a", "a"), oracle)
    assert cert.reduced
    assert len(B.secondaries) == 1
    (sec,) = B.secondaries.values()
    assert sec.gens and all(abs(dict(g).get("a", 0)) == 1 for g in sec.gens)


def test_reduce_already_reduced_is_noop():
    root, oracle = setup(F2)
    B, _ = reduce(flower(F2, "a b", "b^2"), oracle)
    C, _ = reduce(B, oracle)
    assert to_dot(C) == to_dot(B)


def test_reduce_merges_common_prefix():
    # <ab, ac> in Z * Z^2: the a-wedges merge, then the two Z^2-wedges at the
    # new primary fold too, leaving the label <b c^-1>
    root, oracle = setup(AB_BC)
    B, cert = reduce(flower(AB_BC, "a b", "a c"), oracle)
    assert cert.reduced
    assert B.size() == {"primary": 2, "secondary": 2, "arcs": 4}
    labels = [s.gens for s in B.secondaries.values() if s.nu == 1]
    assert labels == [[canon(root, word(AB_BC, "b c^-1").letters)]]
    H = make_subgroup(AB_BC, [word(AB_BC, "a b"), word(AB_BC, "a c")])
    _, _, member = recognised(flower(AB_BC, "a b", "a c"), oracle)
    for elt in enumerate_subgroup_ball(H, 4).elements:
        assert member(elt)


def test_reduce_step_bound():
    rng = random.Random(5)
    for G in (F2, F3, F2_Z, ZxF2_Z):
        root, oracle = setup(G)
        for _ in range(25):
            gens = [rand_letters(rng, G.vertices, 5) for _ in range(rng.randint(1, 3))]
            A = flower_automaton(root, gens)
            n0 = len(A.arcs)
            from droms_sip.wedge import _reduce_in_place
            steps = _reduce_in_place(A, oracle)
            assert steps <= n0
            assert certificate(A, oracle).reduced


def test_kurosh_rejects_unreduced():
    root, oracle = setup(F2)
    with pytest.raises(NotReduced):
        kurosh_decomposition(flower(F2, "a", "a"), oracle)


# -- Kurosh ------------------------------------------------------------------------

def test_kurosh_single_vertex_group():
    root, oracle = setup(F2)
    A = WedgeAutomaton(root)
    a2 = (("a", 2),)
    q = A.add_secondary(0, [a2], taus=[((0, 1),)])
    A.add_arc(q, A.bp, ())
    K = kurosh_decomposition(A, oracle)
    assert K.free_part == []
    assert K.vertex_groups == [(q, (), 0, [a2])]
    assert K.basis == [a2]


def test_kurosh_extra_arc_gives_free_generator():
    root, oracle = setup(F2)
    A = WedgeAutomaton(root)
    a2, g = (("a", 2),), (("a", 1),)
    q = A.add_secondary(0, [a2], taus=[((0, 1),)])
    A.add_arc(q, A.bp, ())
    A.add_arc(q, A.bp, g, ((1, 1),))
    K = kurosh_decomposition(A, check=False)
    assert [x for _, x, _ in K.free_part] == [g]
    assert sorted(K.basis) == sorted([a2, g])


def test_kurosh_trivial():
    root, oracle = setup(F2)
    K = kurosh_decomposition(WedgeAutomaton(root), oracle)
    assert K.basis == [] and K.free_part == [] and K.vertex_groups == []


# -- threads ---------------------------------------------------------------------

def test_thread_identity():
    root, oracle = setup(F2)
    A, _ = reduce(flower(F2, "a^2"), oracle)
    B, end = attach_thread(A, (), oracle)
    assert end == B.bp and to_dot(B) == to_dot(A)


def test_thread_member_folds_in():
    root, oracle = setup(F2)
    A, _ = reduce(flower(F2, "a b", "b a^-1"), oracle)
    u = canon(root, word(F2, "a b b a^-1").letters)
    B, end = attach_thread(A, u, oracle)
    assert end == B.bp
    assert B.size() == A.size()


def test_thread_fresh_syllable_sticks_out():
    root, oracle = setup(F2)
    A, _ = reduce(flower(F2, "a^2"), oracle)
    B, end = attach_thread(A, (("b", 1),), oracle)
    assert end != B.bp
    a, b = A.size(), B.size()
    assert (b["primary"], b["secondary"], b["arcs"]) == \
        (a["primary"] + 1, a["secondary"] + 1, a["arcs"] + 2)


# -- properties --------------------------------------------------------------------

AMBIENTS = [F2, F3, F2_Z, ZxF2_Z]


@pytest.mark.parametrize("G", AMBIENTS, ids=str)
def test_ledger_soundness(G):
    rng = random.Random(17)
    root, oracle = setup(G)
    for _ in range(30):
        gens = [canon(root, rand_letters(rng, G.vertices, 4)) for _ in range(rng.randint(1, 3))]
        A = flower_automaton(root, gens)
        B, _ = reduce(A, oracle)
        K = kurosh_decomposition(B, oracle)
        for b, x in zip(K.basis, K.rewrite_out):
            assert evaluate(root, x, gens) == b


def _random_transformation(rng, A, root, oracle):
    kind = rng.choice(["conjugation", "adjustment", "fold"])
    if kind == "conjugation" and A.secondaries:
        q = rng.choice(sorted(A.secondaries))
        fac = A.factor(A.secondaries[q].nu)
        g = canon(fac, rand_letters(rng, sorted(fac.vertex_set), 3))
        return TransformationSpec("conjugation", vertex=q, element=g)
    if kind == "adjustment":
        cands = [a for a in sorted(A.arcs) if A.secondaries[A.arcs[a].q].gens]
        if cands:
            e = rng.choice(cands)
            gens = A.secondaries[A.arcs[e].q].gens
            c = mul(A.factor(A.secondaries[A.arcs[e].q].nu), rng.choice(gens))
            return TransformationSpec("adjustment", (e,), element=c if rng.random() < .5 else inv(c))
    for p in sorted(A.primaries):
        arcs = sorted(A.p_arcs[p])
        for i, e1 in enumerate(arcs):
            for e2 in arcs[i + 1:]:
                a1, a2 = A.arcs[e1], A.arcs[e2]
                if a1.q == a2.q:
                    return TransformationSpec("closed_folding", (e1, e2))
                if a1.label == a2.label and A.secondaries[a1.q].nu == A.secondaries[a2.q].nu:
                    return TransformationSpec("primary_open_folding", (e1, e2))
    return TransformationSpec("isolation")


@pytest.mark.parametrize("G", AMBIENTS, ids=str)
def test_transformations_preserve_subgroup(G):
    rng = random.Random(23)
    root, oracle = setup(G)
    for _ in range(15):
        gens = [canon(root, rand_letters(rng, G.vertices, 4)) for _ in range(rng.randint(1, 3))]
        H = make_subgroup(G, gens)
        A = flower_automaton(root, gens)
        for _ in range(4):
            A = apply_transformation(A, _random_transformation(rng, A, root, oracle), oracle)
        B, K, member = recognised(A, oracle)
        for g in gens:
            assert member(g)
        for b in K.basis:
            assert membership(H, GroupWord(G, b)) is not None
        for _ in range(50):
            w = canon(root, rand_letters(rng, G.vertices, 6, 0))
            assert member(w) == (membership(H, GroupWord(G, w)) is not None)


@pytest.mark.parametrize("G", AMBIENTS, ids=str)
def test_reduce_matches_ball(G):
    rng = random.Random(29)
    root, oracle = setup(G)
    for _ in range(15):
        gens = [canon(root, rand_letters(rng, G.vertices, 4)) for _ in range(rng.randint(1, 3))]
        _, _, member = recognised(flower_automaton(root, gens), oracle)
        for elt in enumerate_subgroup_ball(make_subgroup(G, gens), 3).elements:
            assert member(elt)


@pytest.mark.parametrize("G", AMBIENTS, ids=str)
def test_no_trivial_walks(G):
    # in a reduced automaton no nondegenerate elementary walk p -> q -> p' reads 1
    rng = random.Random(31)
    root, oracle = setup(G)
    for _ in range(20):
        gens = [canon(root, rand_letters(rng, G.vertices, 4)) for _ in range(rng.randint(1, 3))]
        B, _ = reduce(flower_automaton(root, gens), oracle)
        for q, sec in B.secondaries.items():
            fac = B.factor(sec.nu)
            arcs = sorted(B.q_arcs[q])
            for e in arcs:
                for f in arcs:
                    if e != f:
                        c = mul(fac, B.arcs[e].label, inv(B.arcs[f].label))
                        assert B.label_express(q, c, oracle) is None
