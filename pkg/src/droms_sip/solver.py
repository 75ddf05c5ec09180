"""Recursive subgroup bases and membership, plus (coset) intersections.

Dispatch is on the compiled decomposition tree:

* trivial node: everything is trivial;
* central node Z^m x G0: completion arithmetic over lattices, with the
  projected subgroups handled recursively in G0;
* free-product node: reduced wedge automata, Kurosh bases, and the junction.

A ``SubgroupData`` is the working form of a subgroup: a graphical basis, the
rewrite of each basis element in the original generators, and an ``express``
method writing any member over the basis (``None`` for non-members).
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

from . import junction as jn
from .expressions import (EMPTY, Expr, abelianize_expr, e_inv, e_mul, e_pow, evaluate,
                          format_expr, shift, substitute, sym)
from .graph_core import SimpleGraph, build_graph
from .junction import CosetAnswer, EMPTY_COSET, UNDECIDED
from .lattice import (AffineCoset, Lattice, affine_intersect, finite_index_and_reps,
                      lattice_from_generators, lattice_intersect,
                      lattice_member, lattice_sum, lattice_with_transform, mat_sub,
                      matrix_preimage, reduce_mod, solve, vec_add, vec_mat, vec_sub,
                      zero_lattice)
from .wedge import (flower_automaton, _reduce_in_place, kurosh_decomposition,
                    read_element)
from .words import (AmbientMismatch, Elt, GroupWord, Node, ambient_for, canon, commutator,
                    inv, mul, power, split_central, with_central)


# -- subgroup data -------------------------------------------------------------

class SubgroupData:
    node: Node
    gens: tuple[Elt, ...]
    basis: tuple[Elt, ...]
    rewrite_out: list[Expr]
    edges: frozenset

    def express(self, elt: Elt) -> Optional[Expr]:
        raise NotImplementedError

    def express_gens(self, elt: Elt) -> Optional[Expr]:
        x = self.express(elt)
        return None if x is None else substitute(x, self.rewrite_out)

    @property
    def rewrite_in(self) -> list[Expr]:
        return [self.express(g) for g in self.gens]

    def graph(self) -> SimpleGraph:
        return basis_graph(len(self.basis), self.edges)


def symbol_names(n: int) -> list[str]:
    width = len(str(max(n - 1, 0)))
    return [f"y{i:0{width}d}" for i in range(n)]


def basis_graph(n: int, edges) -> SimpleGraph:
    names = symbol_names(n)
    return build_graph(names, [(names[i], names[j]) for i, j in sorted(edges)])


class TrivialData(SubgroupData):
    def __init__(self, node: Node, gens):
        self.node = node
        self.gens = tuple(gens)
        self.basis = ()
        self.rewrite_out = []
        self.edges = frozenset()

    def express(self, elt):
        return EMPTY if not elt else None


class CentralData(SubgroupData):
    """H in Z^m x G0: H = L x {t^{a_j} u_j}, L = H ∩ Z^m, u_j a basis of the projection."""

    def __init__(self, solver: "Solver", node: Node, gens):
        self.node = node
        self.gens = tuple(gens)
        m, n = node.m, len(self.gens)
        split = [split_central(node, g) for g in self.gens]
        cs = [c for c, _ in split]
        self.child = solver.data(node.child, tuple(v for _, v in split))
        ch = self.child
        self.completions = [vec_mat(abelianize_expr(w, n), cs, m) for w in ch.rewrite_out]
        rels, rel_exprs = [], []
        for i, (_, v) in enumerate(split):
            rho = ch.express(v)
            if rho is None:
                raise AssertionError("projection of a generator is not in the projected subgroup")
            d = vec_mat(abelianize_expr(rho, len(ch.basis)), self.completions, m)
            rels.append(vec_sub(cs[i], d))
            rel_exprs.append(e_mul(sym(i), e_inv(substitute(rho, ch.rewrite_out))))
        self.lattice, T = lattice_with_transform(m, rels)
        r = self.lattice.rank
        self.basis = tuple(with_central(node, b, ()) for b in self.lattice.basis) + \
            tuple(with_central(node, a, u) for a, u in zip(self.completions, ch.basis))
        self.rewrite_out = [e_mul(*[e_pow(rel_exprs[i], k) for i, k in enumerate(row) if k])
                            for row in T] + list(ch.rewrite_out)
        edges = {(i, j) for i in range(r) for j in range(i + 1, r + len(ch.basis))}
        edges |= {(i + r, j + r) for i, j in ch.edges}
        self.edges = frozenset(edges)

    def completion(self, x: Elt) -> Optional[tuple[int, ...]]:
        """Some a with t^a x in H, for x in G0; None if x is not in the projection."""
        s = self.child.express(x)
        if s is None:
            return None
        return vec_mat(abelianize_expr(s, len(self.child.basis)), self.completions, self.node.m)

    def express(self, elt):
        e, x = split_central(self.node, elt)
        s = self.child.express(x)
        if s is None:
            return None
        f = vec_mat(abelianize_expr(s, len(self.child.basis)), self.completions, self.node.m)
        ok, k = lattice_member(self.lattice, vec_sub(e, f))
        if not ok:
            return None
        head = tuple((l, c) for l, c in enumerate(k) if c)
        return e_mul(head, shift(s, self.lattice.rank))


class FactorOracle:
    def __init__(self, solver: "Solver", node: Node):
        self.solver = solver
        self.node = node

    def data(self, nu: int, gens):
        return self.solver.data(self.node.children[nu], gens)


class FreeData(SubgroupData):
    def __init__(self, solver: "Solver", node: Node, gens):
        self.node = node
        self.gens = tuple(gens)
        self.oracle = FactorOracle(solver, node)
        A = flower_automaton(node, self.gens)
        self.fold_steps = _reduce_in_place(A, self.oracle)
        self.automaton = A
        self.kurosh = kurosh_decomposition(A, check=False)
        self.basis = tuple(self.kurosh.basis)
        self.rewrite_out = list(self.kurosh.rewrite_out)
        self.edges = self.kurosh.edges

    def express(self, elt):
        return read_element(self.automaton, self.kurosh, elt)


# -- intersection results --------------------------------------------------------

@dataclass(frozen=True)
class Intersection:
    fg: bool
    gens: tuple[Elt, ...] = ()
    witness: Optional[Elt] = None       # commutator certificate for not-fg
    detail: Optional[dict] = None


class Solver:
    """Memoising recursive solver; all results are pure functions of their inputs."""

    def __init__(self):
        self._data: dict = {}
        self._inter: dict = {}
        self._coset: dict = {}

    # bases
    def data(self, node: Node, gens) -> SubgroupData:
        gens = tuple(canon(node, g) for g in gens)
        key = (node, gens)
        hit = self._data.get(key)
        if hit is None:
            if node.kind == Node.TRIVIAL:
                hit = TrivialData(node, gens)
            elif node.kind == Node.CENTRAL:
                hit = CentralData(self, node, gens)
            else:
                hit = FreeData(self, node, gens)
            self._data[key] = hit
        return hit

    # intersections
    def intersect(self, node: Node, gH, gK) -> Intersection:
        gH = tuple(canon(node, g) for g in gH)
        gK = tuple(canon(node, g) for g in gK)
        key = (node, gH, gK)
        hit = self._inter.get(key)
        if hit is None:
            if node.kind == Node.TRIVIAL:
                hit = Intersection(True, ())
            elif node.kind == Node.CENTRAL:
                hit = self._intersect_central(node, gH, gK)
            else:
                hit = self._intersect_free(node, gH, gK)
            self._inter[key] = hit
        return hit

    def _intersect_free(self, node, gH, gK) -> Intersection:
        dH, dK = self.data(node, gH), self.data(node, gK)
        J = jn.build_junction(dH.automaton, dK.automaton, self, jn.STRICT_FG)
        if J.status != "ok":
            return Intersection(False, witness=J.reason.get("witness"),
                                detail={"junction": {k: v for k, v in J.reason.items()
                                                     if k != "witness"}})
        K = kurosh_decomposition(J.automaton, check=False)
        gens = tuple(g for g in K.basis if g)
        return Intersection(True, gens, detail={"junction": J.automaton.size()})

    def _central_setup(self, node, gH, gK):
        d1, d2 = self.data(node, gH), self.data(node, gK)
        W = self.intersect(node.child, d1.child.basis, d2.child.basis)
        return d1, d2, W

    def _w_matrices(self, node, d1, d2, dW):
        R1, R2 = [], []
        for w in dW.basis:
            c1, c2 = d1.completion(w), d2.completion(w)
            if c1 is None or c2 is None:
                raise AssertionError("intersection basis element outside a projection")
            R1.append(c1)
            R2.append(c2)
        return R1, R2, lattice_sum(d1.lattice, d2.lattice)

    def _intersect_central(self, node, gH, gK) -> Intersection:
        m = node.m
        d1, d2, W = self._central_setup(node, gH, gK)
        if not W.fg:
            return Intersection(False, witness=W.witness,
                                detail={"reason": "projected intersection not fg"})
        child = node.child
        dW = self.data(child, W.gens)
        n3 = len(dW.basis)
        R1, R2, S = self._w_matrices(node, d1, d2, dW)
        D = mat_sub(R1, R2)
        M = matrix_preimage(D, S, n3) if n3 else zero_lattice(0)
        adj = {i: set() for i in range(n3)}
        for i, j in dW.edges:
            adj[i].add(j)
            adj[j].add(i)
        zs = [i for i in range(n3) if len(adj[i]) == n3 - 1]
        ys = [i for i in range(n3) if len(adj[i]) != n3 - 1]
        n5 = len(ys)
        My = lattice_from_generators(n5, [[row[i] for i in ys] for row in M.basis])
        meet = lattice_intersect(d1.lattice, d2.lattice)
        detail = {"lattice_ranks": [d1.lattice.rank, d2.lattice.rank, meet.rank, M.rank],
                  "projected_rank": n3}
        if n5 and My.rank < n5:
            i = ys[0]
            j = next(k for k in ys if k != i and k not in adj[i])
            wit = commutator(child, dW.basis[i], dW.basis[j])
            detail["reason"] = "rank condition fails"
            return Intersection(False, witness=wit, detail=detail)

        lifted: list[tuple[Elt, tuple]] = []        # (element of W, its W-abelianisation)

        def w_elt(lam):
            acc: Elt = ()
            for i, k in enumerate(lam):
                if k:
                    acc = mul(child, acc, power(child, dW.basis[i], k))
            return acc

        Dz = [D[i] for i in zs]
        Dy = [D[i] for i in ys]
        # kernel part: elements of the central part of W
        for row in (matrix_preimage(Dz, S, len(zs)).basis if zs else []):
            lam = [0] * n3
            for i, k in zip(zs, row):
                lam[i] = k
            lifted.append((w_elt(lam), tuple(lam)))
        # Schreier generators over the non-central part, lifted through the z-part
        if n5:
            for g, yvec in _schreier_generators(child, [dW.basis[i] for i in ys], My):
                target = tuple(-x for x in vec_mat(yvec, Dy, m))
                x = solve(Dz + list(S.basis), target, m)
                if x is None:
                    raise AssertionError("Schreier generator does not lift")
                lam = [0] * n3
                for i, k in zip(zs, x[:len(zs)]):
                    lam[i] = k
                zpart = w_elt(lam)
                for i, k in zip(ys, yvec):
                    lam[i] = k
                lifted.append((mul(child, zpart, g), tuple(lam)))
        gens = []
        for w, lam in lifted:
            pt = affine_intersect(AffineCoset(vec_mat(lam, R1, m), d1.lattice),
                                  AffineCoset(vec_mat(lam, R2, m), d2.lattice))
            if pt is None:
                raise AssertionError("lifted element has no common completion")
            gens.append(with_central(node, pt.offset, w))
        gens.extend(with_central(node, b, ()) for b in meet.basis)
        return Intersection(True, tuple(g for g in gens if g), detail=detail)

    # cosets (right cosets H u ∩ K v)
    def coset(self, node: Node, gH, gK, u: Elt, v: Elt) -> CosetAnswer:
        gH = tuple(canon(node, g) for g in gH)
        gK = tuple(canon(node, g) for g in gK)
        u, v = canon(node, u), canon(node, v)
        key = (node, gH, gK, u, v)
        hit = self._coset.get(key)
        if hit is None:
            if node.kind == Node.TRIVIAL:
                hit = CosetAnswer("witness", ())
            elif node.kind == Node.CENTRAL:
                hit = self._coset_central(node, gH, gK, u, v)
            else:
                dH, dK = self.data(node, gH), self.data(node, gK)
                hit, _ = jn.coset_reachability(dH.automaton, dK.automaton, u, v, self,
                                               dH.oracle, dK.oracle, jn.TRIVIAL_LABELS)
            self._coset[key] = hit
        return hit

    def _coset_central(self, node, gH, gK, u, v) -> CosetAnswer:
        m = node.m
        child = node.child
        d1, d2, W = self._central_setup(node, gH, gK)
        a, x = split_central(node, u)
        a2, x2 = split_central(node, v)
        inner = self.coset(child, d1.child.basis, d2.child.basis, x, x2)
        if inner.kind != "witness":
            return inner
        if not W.fg:
            return UNDECIDED
        y0 = inner.witness
        dW = self.data(child, W.gens)
        R1, R2, S = self._w_matrices(node, d1, d2, dW)
        c1 = d1.completion(mul(child, y0, inv(x)))
        c2 = d2.completion(mul(child, y0, inv(x2)))
        target = vec_sub(vec_add(a2, c2), vec_add(a, c1))
        n3 = len(dW.basis)
        sol = solve(mat_sub(R1, R2) + list(S.basis), target, m)
        if sol is None:
            return EMPTY_COSET
        lam = sol[:n3]
        pt = affine_intersect(
            AffineCoset(vec_add(vec_add(a, c1), vec_mat(lam, R1, m)), d1.lattice),
            AffineCoset(vec_add(vec_add(a2, c2), vec_mat(lam, R2, m)), d2.lattice))
        if pt is None:
            raise AssertionError("affine system solvable but cosets disjoint")
        w: Elt = ()
        for i, k in enumerate(lam):
            if k:
                w = mul(child, w, power(child, dW.basis[i], k))
        return CosetAnswer("witness", with_central(node, pt.offset, mul(child, w, y0)))


def _schreier_generators(node: Node, ys: Sequence[Elt], My: Lattice):
    """Generators of the preimage of My under abelianisation of <ys> (finite index)."""
    n5 = len(ys)
    _, reps = finite_index_and_reps(My)
    path: dict[tuple, tuple[Elt, tuple]] = {reps[0]: ((), tuple([0] * n5))}
    tree = set()
    queue = deque([reps[0]])
    order = []
    while queue:
        r = queue.popleft()
        order.append(r)
        for j in range(n5):
            t = reduce_mod(My, tuple(x + (k == j) for k, x in enumerate(r)))
            if t not in path:
                pe, pv = path[r]
                path[t] = (mul(node, pe, ys[j]), tuple(x + (k == j) for k, x in enumerate(pv)))
                tree.add((r, j))
                queue.append(t)
    out = []
    for r in order:
        for j in range(n5):
            if (r, j) in tree:
                continue
            t = reduce_mod(My, tuple(x + (k == j) for k, x in enumerate(r)))
            pe, pv = path[r]
            te, tv = path[t]
            g = mul(node, pe, ys[j], inv(te))
            vec = tuple(x + (k == j) - y for k, (x, y) in enumerate(zip(pv, tv)))
            out.append((g, vec))
    return out


# -- public API ----------------------------------------------------------------

@lru_cache(maxsize=64)
def solver_for(graph: SimpleGraph) -> Solver:
    return Solver()


@dataclass(frozen=True)
class Subgroup:
    ambient: SimpleGraph
    generators: tuple[GroupWord, ...]

    @property
    def root(self) -> Node:
        return ambient_for(self.ambient).root

    def elts(self) -> tuple[Elt, ...]:
        root = self.root
        return tuple(canon(root, w.letters) for w in self.generators)


def make_subgroup(ambient: SimpleGraph, gens: Sequence) -> Subgroup:
    out = []
    for g in gens:
        if isinstance(g, GroupWord):
            if g.ambient != ambient:
                raise AmbientMismatch("generator from a different ambient")
            out.append(g)
        else:
            out.append(GroupWord(ambient, tuple(g)))
    return Subgroup(ambient, tuple(out))


@dataclass(frozen=True)
class GraphicalBasis:
    basis_words: tuple[GroupWord, ...]
    commutation_graph: SimpleGraph
    rewrite_out: tuple[Expr, ...]
    rewrite_in: tuple[Expr, ...]

    def to_json(self) -> dict:
        names = symbol_names(len(self.basis_words))
        gnames = [f"h{i}" for i in range(len(self.rewrite_in))]
        return {
            "basis": [str(w) for w in self.basis_words],
            "symbols": names,
            "commutation_graph": self.commutation_graph.to_json(),
            "rewrite_out": [format_expr(x, gnames) for x in self.rewrite_out],
            "rewrite_in": [format_expr(x, names) for x in self.rewrite_in],
        }


@dataclass(frozen=True)
class CompletionData:
    lattice: Lattice
    projected_basis: tuple[Elt, ...]
    completions: tuple[tuple[int, ...], ...]


@dataclass(frozen=True)
class IntersectionOutcome:
    status: str                                  # "fg" or "not_fg"
    generators: tuple[GroupWord, ...] = ()
    basis: Optional[GraphicalBasis] = None
    coset: Optional[CosetAnswer] = None
    coset_witness: Optional[GroupWord] = None
    commutator_witness: Optional[GroupWord] = None
    stats: dict = field(default_factory=dict)

    @property
    def fg(self) -> bool:
        return self.status == "fg"

    def to_json(self) -> dict:
        out = {"status": self.status, "generators": [str(g) for g in self.generators],
               "stats": self.stats}
        if self.coset is None:
            out["coset"] = None
        elif self.coset.kind == "witness":
            out["coset"] = {"witness": str(self.coset_witness)}
        else:
            out["coset"] = {self.coset.kind: True}
        if self.commutator_witness is not None:
            out["commutator_witness"] = str(self.commutator_witness)
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


def _ctx(H: Subgroup):
    return solver_for(H.ambient), H.root


def subgroup_data(H: Subgroup) -> SubgroupData:
    s, root = _ctx(H)
    return s.data(root, H.elts())


def subgroup_basis(H: Subgroup) -> GraphicalBasis:
    d = subgroup_data(H)
    return GraphicalBasis(
        tuple(GroupWord(H.ambient, b) for b in d.basis),
        d.graph(),
        tuple(d.rewrite_out),
        tuple(d.rewrite_in),
    )


def completion_data(H: Subgroup) -> CompletionData:
    d = subgroup_data(H)
    if not isinstance(d, CentralData):
        raise ValueError("ambient has no central vertices")
    return CompletionData(d.lattice, tuple(d.child.basis), tuple(d.completions))


def membership(H: Subgroup, w: GroupWord) -> Optional[Expr]:
    """Expression of w over H's generators (symbol i = generator i), or None."""
    if w.ambient != H.ambient:
        raise AmbientMismatch("word and subgroup live in different ambients")
    d = subgroup_data(H)
    return d.express_gens(canon(H.root, w.letters))


def membership_by_coset(H: Subgroup, w: GroupWord) -> bool:
    """w ∈ H decided as the coset question w·1 ∩ 1·H ≠ ∅."""
    out = esip(make_subgroup(H.ambient, []), H, w, GroupWord(H.ambient, ()))
    return out.coset is not None and out.coset.kind == "witness"


def evaluate_expr(H: Subgroup, x: Expr) -> GroupWord:
    return GroupWord(H.ambient, evaluate(H.root, x, H.elts()))


def _check_pair(H: Subgroup, K: Subgroup) -> None:
    if H.ambient != K.ambient:
        raise AmbientMismatch("subgroups live in different ambients")


def _outcome(H: Subgroup, res: Intersection, coset: Optional[CosetAnswer],
             stats: dict) -> IntersectionOutcome:
    s, root = _ctx(H)
    amb = H.ambient
    cw = None
    if coset is not None and coset.kind == "witness":
        # the solver works with right cosets; convert back to wH ∩ w'K
        cw = GroupWord(amb, canon(root, inv(coset.witness)))
    if not res.fg:
        wit = GroupWord(amb, res.witness) if res.witness is not None else None
        return IntersectionOutcome("not_fg", coset=coset, coset_witness=cw,
                                   commutator_witness=wit, stats=stats)
    d = s.data(root, res.gens)
    basis = GraphicalBasis(tuple(GroupWord(amb, b) for b in d.basis), d.graph(),
                           tuple(d.rewrite_out), tuple(d.rewrite_in))
    return IntersectionOutcome("fg", basis.basis_words, basis, coset, cw, stats=stats)


def _stats(root: Node, res: Intersection, dH, dK) -> dict:
    stats = {"recursion_depth": root.height(), "root": root.kind}
    if isinstance(dH, FreeData):
        stats["automaton_sizes"] = {"H": dH.automaton.size(), "K": dK.automaton.size()}
        if res.detail and isinstance(res.detail.get("junction"), dict) and res.fg:
            stats["automaton_sizes"]["junction"] = res.detail["junction"]
    if isinstance(dH, CentralData):
        stats["lattice_ranks"] = {"H": dH.lattice.rank, "K": dK.lattice.rank}
        if res.detail and "lattice_ranks" in res.detail:
            stats["lattice_ranks"]["meet"] = res.detail["lattice_ranks"][2]
            stats["lattice_ranks"]["preimage"] = res.detail["lattice_ranks"][3]
    return stats


def esip(H: Subgroup, K: Subgroup, w: Optional[GroupWord] = None,
         w2: Optional[GroupWord] = None) -> IntersectionOutcome:
    """Decide whether H ∩ K is fg (with generators) and, given w, w', whether wH ∩ w'K is empty."""
    _check_pair(H, K)
    s, root = _ctx(H)
    gH, gK = H.elts(), K.elts()
    res = s.intersect(root, gH, gK)
    coset = None
    if w is not None or w2 is not None:
        u = canon(root, inv(w.letters if w is not None else ()))
        v = canon(root, inv(w2.letters if w2 is not None else ()))
        coset = s.coset(root, gH, gK, u, v)
    return _outcome(H, res, coset, _stats(root, res, s.data(root, gH), s.data(root, gK)))


def esip_direct(H: Subgroup, K: Subgroup, w=None, w2=None) -> IntersectionOutcome:
    if H.root.kind != Node.CENTRAL:
        raise ValueError("esip_direct needs an ambient with central vertices")
    return esip(H, K, w, w2)


def esip_free(H: Subgroup, K: Subgroup, w=None, w2=None) -> IntersectionOutcome:
    if H.root.kind != Node.FREE:
        raise ValueError("esip_free needs a free-product ambient")
    return esip(H, K, w, w2)


def kurosh(H: Subgroup):
    d = subgroup_data(H)
    if not isinstance(d, FreeData):
        raise ValueError("Kurosh data needs a free-product ambient")
    return d
