"""Junction (product) automaton of two reduced wedge automata.

Primary vertices of the junction are pairs (p, p') of primaries.  For each
pair and each factor type nu with a nu-arc on both sides we create one
secondary class, anchored at the first pair that needs it.  Its label is the
intersection of the two conjugated vertex labels, and it gets an arc to every
pair (p_f, p'_f') whose factor-level coset intersection is nonempty.  The
result recognises H ∩ K.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .wedge import WedgeAutomaton, attach_thread, spanning_tree, to_dot
from .words import Elt, inv, mul

STRICT_FG = "strict_fg"
TRIVIAL_LABELS = "trivial_labels"


@dataclass(frozen=True)
class CosetAnswer:
    """Outcome of a coset intersection query: kind is empty, witness or undecided."""

    kind: str
    witness: Optional[Elt] = None

    @property
    def empty(self) -> bool:
        return self.kind == "empty"


EMPTY_COSET = CosetAnswer("empty")
UNDECIDED = CosetAnswer("undecided")


@dataclass
class Junction:
    status: str                       # "ok", "not_fg" or "undecided"
    automaton: Optional[WedgeAutomaton]
    vertex_of_pair: dict = field(default_factory=dict)
    pair_of_vertex: dict = field(default_factory=dict)
    reason: Optional[dict] = None

    def tags(self) -> dict:
        return {v: f"({a},{b})" for v, (a, b) in self.pair_of_vertex.items()}


def nu_arc(A: WedgeAutomaton, p: int, nu: int) -> Optional[int]:
    for a in sorted(A.p_arcs[p]):
        if A.secondaries[A.arcs[a].q].nu == nu:
            return a
    return None


def conjugated_label(A: WedgeAutomaton, e: int) -> tuple[Elt, ...]:
    """l(e)^-1 C_q l(e) as a generator tuple."""
    arc = A.arcs[e]
    sec = A.secondaries[arc.q]
    fac = A.factor(sec.nu)
    return tuple(mul(fac, inv(arc.label), c, arc.label) for c in sec.gens)


def secondary_label(solver, A_H: WedgeAutomaton, e: int, A_K: WedgeAutomaton, e2: int):
    """Intersection of the two conjugated labels at a distinguished pair of arcs."""
    nu = A_H.secondaries[A_H.arcs[e].q].nu
    return solver.intersect(A_H.factor(nu), conjugated_label(A_H, e), conjugated_label(A_K, e2))


def adjacency_witness(solver, A_H: WedgeAutomaton, e: int, f: int,
                      A_K: WedgeAutomaton, e2: int, f2: int) -> CosetAnswer:
    """Decide l(e)^-1 C l(f)  ∩  l(e')^-1 C' l(f') via the factor's coset solver."""
    if e == f and e2 == f2:
        return CosetAnswer("witness", ())
    nu = A_H.secondaries[A_H.arcs[e].q].nu
    fac = A_H.factor(nu)
    u = mul(fac, inv(A_H.arcs[e].label), A_H.arcs[f].label)
    v = mul(fac, inv(A_K.arcs[e2].label), A_K.arcs[f2].label)
    return solver.coset(fac, conjugated_label(A_H, e), conjugated_label(A_K, e2), u, v)


def build_junction(A_H: WedgeAutomaton, A_K: WedgeAutomaton, solver, mode: str = STRICT_FG) -> Junction:
    J = WedgeAutomaton(A_H.node, ledger=False)
    start = (A_H.bp, A_K.bp)
    vid = {start: J.bp}
    pair_of = {J.bp: start}
    queue = deque([start])
    while queue:
        X = queue.popleft()
        p, p2 = X
        x = vid[X]
        nus_h = {A_H.secondaries[A_H.arcs[a].q].nu for a in A_H.p_arcs[p]}
        nus_k = {A_K.secondaries[A_K.arcs[a].q].nu for a in A_K.p_arcs[p2]}
        for nu in sorted(nus_h & nus_k):
            if any(J.secondaries[J.arcs[a].q].nu == nu for a in J.p_arcs[x]):
                continue
            e, e2 = nu_arc(A_H, p, nu), nu_arc(A_K, p2, nu)
            q, q2 = A_H.arcs[e].q, A_K.arcs[e2].q
            fac = A_H.factor(nu)
            if mode == STRICT_FG:
                res = secondary_label(solver, A_H, e, A_K, e2)
                if not res.fg:
                    reason = {"pair": list(X), "factor": nu}
                    if res.witness is not None:
                        # move the factor-level certificate back to the basepoint
                        z, _, _ = spanning_tree(J)
                        reason["witness"] = mul(J.node, inv(z[x]), res.witness, z[x])
                    return Junction("not_fg", None, vid, pair_of, reason)
                d = solver.data(fac, res.gens)
                Q = J.add_secondary(nu, d.basis, data=d)
            else:
                Q = J.add_secondary(nu)
            pair_of[Q] = (q, q2)
            for f in sorted(A_H.q_arcs[q]):
                for f2 in sorted(A_K.q_arcs[q2]):
                    ans = adjacency_witness(solver, A_H, e, f, A_K, e2, f2)
                    if ans.kind == "undecided":
                        return Junction("undecided", None, vid, pair_of,
                                        {"pair": list(X), "factor": nu})
                    if ans.kind == "empty":
                        continue
                    Y = (A_H.arcs[f].p, A_K.arcs[f2].p)
                    if Y not in vid:
                        vid[Y] = J.add_primary()
                        pair_of[vid[Y]] = Y
                        queue.append(Y)
                    J.add_arc(Q, vid[Y], ans.witness)
    return Junction("ok", J, vid, pair_of)


def coset_reachability(A_H: WedgeAutomaton, A_K: WedgeAutomaton, u: Elt, v: Elt,
                       solver, oracle_H, oracle_K, mode: str = TRIVIAL_LABELS) -> tuple[CosetAnswer, Junction]:
    """Decide Hu ∩ Kv for the subgroups recognised by A_H and A_K."""
    B_H, end_H = attach_thread(A_H, u, oracle_H)
    B_K, end_K = attach_thread(A_K, v, oracle_K)
    J = build_junction(B_H, B_K, solver, mode)
    if J.status == "undecided":
        return UNDECIDED, J
    if J.status != "ok":
        return UNDECIDED, J
    target = J.vertex_of_pair.get((end_H, end_K))
    if target is None:
        return EMPTY_COSET, J
    z, _, _ = spanning_tree(J.automaton)
    return CosetAnswer("witness", mul(J.automaton.node, inv(z[target]))), J


def junction_dot(J: Junction, name: str = "junction") -> str:
    if J.automaton is None:
        return f"digraph {name} {{\n}}\n"
    return to_dot(J.automaton, name, J.tags())
