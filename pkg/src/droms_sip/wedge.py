"""Wedge automata over the factors of a free-product node.

Secondary vertices have a factor type ``nu`` (an index into the free
product's children) and a label subgroup of that factor; arcs run from a
secondary q to a primary p and carry an element of factor ``nu``.  A walk
p -> q -> p' through arcs e, f reads  l(e)^-1 c l(f)  for c in the label of q.

Witness ledger.  Along with every arc label we keep an expression ``sigma``
in the original generator symbols, and along with every label generator an
expression ``tau``, such that for a (never materialised) potential pi on the
vertices with pi(basepoint) = 1:

    eval(sigma(e)) = pi(q) l(e) pi(p)^-1        for an arc e: q -> p
    eval(tau(c))   = pi(q) c pi(q)^-1           for a generator c of q

Every transformation below updates sigma/tau so this stays true; the Kurosh
basis then comes with words in the original generators for free.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field
from typing import Optional

from .expressions import EMPTY, Expr, e_conj, e_inv, e_mul, substitute, sym
from .words import Elt, Node, format_word, inv, mul, syllables


class WedgeError(ValueError):
    pass


class PreconditionViolated(WedgeError):
    def __init__(self, kind: str, why: str):
        self.kind = kind
        super().__init__(f"{kind}: {why}")


class NotReduced(WedgeError):
    pass


class OracleFailure(RuntimeError):
    pass


@dataclass
class Secondary:
    nu: int
    gens: list[Elt] = field(default_factory=list)
    taus: list[Optional[Expr]] = field(default_factory=list)
    # subgroup data whose basis is exactly ``gens`` (set once compacted)
    data: object = None


@dataclass
class Arc:
    q: int
    p: int
    label: Elt
    sigma: Optional[Expr] = EMPTY


@dataclass(frozen=True)
class ReducedCertificate:
    connected: bool
    deterministic: bool
    no_trivial_walks: bool

    @property
    def reduced(self) -> bool:
        return self.connected and self.deterministic and self.no_trivial_walks


@dataclass(frozen=True)
class TransformationSpec:
    """kind is one of adjustment, conjugation, isolation, primary_open_folding,
    secondary_open_folding, closed_folding."""

    kind: str
    arcs: tuple[int, ...] = ()
    vertex: Optional[int] = None
    element: Elt = ()


class WedgeAutomaton:
    def __init__(self, node: Node, ledger: bool = True):
        if node.kind != Node.FREE:
            raise WedgeError("wedge automata live over a free-product node")
        self.node = node
        self.ledger = ledger
        self.bp = 0
        self.primaries: set[int] = {0}
        self.secondaries: dict[int, Secondary] = {}
        self.arcs: dict[int, Arc] = {}
        self.p_arcs: dict[int, set[int]] = {0: set()}
        self.q_arcs: dict[int, set[int]] = {}
        self.alias: dict[int, int] = {}
        self._next_vertex = 1
        self._next_arc = 0
        self._dirty: set[int] = set()

    # -- construction helpers -------------------------------------------------

    def copy(self) -> "WedgeAutomaton":
        out = copy.copy(self)
        out.primaries = set(self.primaries)
        out.secondaries = {k: Secondary(s.nu, list(s.gens), list(s.taus), s.data)
                           for k, s in self.secondaries.items()}
        out.arcs = {k: Arc(a.q, a.p, a.label, a.sigma) for k, a in self.arcs.items()}
        out.p_arcs = {k: set(v) for k, v in self.p_arcs.items()}
        out.q_arcs = {k: set(v) for k, v in self.q_arcs.items()}
        out.alias = dict(self.alias)
        out._dirty = set()
        return out

    def factor(self, nu: int) -> Node:
        return self.node.children[nu]

    def add_primary(self) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        self.primaries.add(v)
        self.p_arcs[v] = set()
        return v

    def add_secondary(self, nu: int, gens=(), taus=None, data=None) -> int:
        v = self._next_vertex
        self._next_vertex += 1
        gens = list(gens)
        taus = list(taus) if taus is not None else [None] * len(gens)
        self.secondaries[v] = Secondary(nu, gens, taus, data)
        self.q_arcs[v] = set()
        return v

    def add_arc(self, q: int, p: int, label: Elt, sigma: Optional[Expr] = EMPTY) -> int:
        a = self._next_arc
        self._next_arc += 1
        self.arcs[a] = Arc(q, p, label, sigma if self.ledger else None)
        self.p_arcs[p].add(a)
        self.q_arcs[q].add(a)
        return a

    def remove_arc(self, a: int) -> None:
        arc = self.arcs.pop(a)
        self.p_arcs[arc.p].discard(a)
        self.q_arcs[arc.q].discard(a)

    def resolve(self, p: int) -> int:
        while p in self.alias:
            p = self.alias[p]
        return p

    def arcs_at(self, v: int) -> list[int]:
        if v in self.primaries:
            return sorted(self.p_arcs[v])
        return sorted(self.q_arcs[v])

    def nu_arcs_at(self, p: int, nu: int) -> list[int]:
        return sorted(a for a in self.p_arcs[p] if self.secondaries[self.arcs[a].q].nu == nu)

    def size(self) -> dict:
        return {"primary": len(self.primaries), "secondary": len(self.secondaries),
                "arcs": len(self.arcs)}

    # -- ledger helpers ------------------------------------------------------

    def _lm(self, *xs):
        return e_mul(*xs) if self.ledger else None

    def _tau_of(self, q: int, expr_over_gens: Expr) -> Optional[Expr]:
        if not self.ledger:
            return None
        return substitute(expr_over_gens, self.secondaries[q].taus)

    # -- the elementary transformations (in place) -----------------------------

    def _adjust(self, a: int, c: Elt, expr_over_gens: Expr) -> None:
        arc = self.arcs[a]
        nu = self.secondaries[arc.q].nu
        arc.label = mul(self.factor(nu), c, arc.label)
        if self.ledger:
            arc.sigma = e_mul(self._tau_of(arc.q, expr_over_gens), arc.sigma)
        self._dirty.add(arc.q)

    def _conjugate(self, q: int, g: Elt) -> None:
        """C_q -> g C_q g^-1 and l(f) -> g l(f) for every arc f at q."""
        sec = self.secondaries[q]
        fac = self.factor(sec.nu)
        sec.gens = [mul(fac, g, c, inv(g)) for c in sec.gens]
        sec.data = None
        for a in self.q_arcs[q]:
            self.arcs[a].label = mul(fac, g, self.arcs[a].label)
        self._dirty.add(q)

    def _primary_fold(self, e1: int, e2: int) -> None:
        """Merge q(e2) into q(e1); both arcs end at one primary with one label."""
        a1, a2 = self.arcs[e1], self.arcs[e2]
        q1, q2 = a1.q, a2.q
        delta = self._lm(a1.sigma, e_inv(a2.sigma)) if self.ledger else None
        self.remove_arc(e2)
        for f in sorted(self.q_arcs[q2]):
            arc = self.arcs[f]
            self.q_arcs[q2].discard(f)
            arc.q = q1
            self.q_arcs[q1].add(f)
            if self.ledger:
                arc.sigma = e_mul(delta, arc.sigma)
        s1, s2 = self.secondaries[q1], self.secondaries.pop(q2)
        del self.q_arcs[q2]
        if s2.gens:
            s1.gens = s1.gens + s2.gens
            s1.taus = s1.taus + [e_conj(t, e_inv(delta)) if self.ledger else None for t in s2.taus]
            s1.data = None
        self._dirty.discard(q2)
        self._dirty.add(q1)

    def _secondary_fold(self, e1: int, e2: int) -> None:
        """Identify the primaries at the ends of two equal-labelled arcs from one secondary."""
        keep, drop = e1, e2
        if self.arcs[drop].p == self.bp:
            keep, drop = drop, keep
        p_keep, p_drop = self.arcs[keep].p, self.arcs[drop].p
        if self.ledger:
            corr = e_mul(e_inv(self.arcs[drop].sigma), self.arcs[keep].sigma)
        self.remove_arc(drop)
        for f in sorted(self.p_arcs[p_drop]):
            arc = self.arcs[f]
            if self.ledger:
                arc.sigma = e_mul(arc.sigma, corr)
            arc.p = p_keep
            self.p_arcs[p_keep].add(f)
        del self.p_arcs[p_drop]
        self.primaries.discard(p_drop)
        self.alias[p_drop] = p_keep

    def _closed_fold(self, e1: int, e2: int) -> None:
        a1, a2 = self.arcs[e1], self.arcs[e2]
        q = a1.q
        sec = self.secondaries[q]
        fac = self.factor(sec.nu)
        c = mul(fac, a1.label, inv(a2.label))
        tau = self._lm(a1.sigma, e_inv(a2.sigma))
        self.remove_arc(e2)
        if c:
            sec.gens = sec.gens + [c]
            sec.taus = sec.taus + [tau]
            sec.data = None
        self._dirty.add(q)

    def _isolate(self) -> None:
        seen = self._component_of(self.bp)
        for q in [q for q in self.secondaries if q not in seen]:
            for a in list(self.q_arcs[q]):
                self.remove_arc(a)
            del self.secondaries[q]
            del self.q_arcs[q]
        for p in [p for p in self.primaries if p not in seen]:
            self.primaries.discard(p)
            del self.p_arcs[p]

    def _component_of(self, start: int) -> set[int]:
        seen = {start}
        stack = [start]
        while stack:
            v = stack.pop()
            for a in self.arcs_at(v):
                arc = self.arcs[a]
                w = arc.q if v == arc.p else arc.p
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return seen

    # -- label data ------------------------------------------------------------

    def label_data(self, q: int, oracle):
        sec = self.secondaries[q]
        if sec.data is None:
            self._compact(q, oracle)
        return sec.data

    def _compact(self, q: int, oracle) -> None:
        """Replace the label generators by a graphical basis of the same subgroup."""
        sec = self.secondaries[q]
        d = oracle.data(sec.nu, tuple(sec.gens))
        if self.ledger:
            sec.taus = [substitute(w, sec.taus) for w in d.rewrite_out]
        else:
            sec.taus = [None] * len(d.basis)
        sec.gens = list(d.basis)
        sec.data = d

    def label_express(self, q: int, c: Elt, oracle) -> Optional[Expr]:
        """Expression of c over the current generators of q, or None."""
        sec = self.secondaries[q]
        if not sec.gens:
            return EMPTY if not c else None
        d = self.label_data(q, oracle)
        return d.express(c)


# -- flower ---------------------------------------------------------------------

def flower_automaton(node: Node, gens, ledger: bool = True) -> WedgeAutomaton:
    """One petal per nontrivial generator, all sharing the basepoint."""
    A = WedgeAutomaton(node, ledger)
    for i, g in enumerate(gens):
        g = mul(node, g)
        if not g:
            continue
        _attach_chain(A, syllables(node, g), A.bp, A.bp, sym(i))
    return A


def _attach_chain(A: WedgeAutomaton, sylls, start: int, end: Optional[int],
                  last_sigma: Expr) -> int:
    """Chain of wedges spelling the syllables; returns the final primary."""
    p = start
    for k, (nu, s) in enumerate(sylls):
        last = k == len(sylls) - 1
        nxt = end if (last and end is not None) else A.add_primary()
        q = A.add_secondary(nu)
        A.add_arc(q, p, ())
        A.add_arc(q, nxt, s, last_sigma if (last and end is not None) else EMPTY)
        p = nxt
    return p


# -- reduction ---------------------------------------------------------------

def _fold_step(A: WedgeAutomaton) -> bool:
    """Steps (I) and (II): make primaries type-deterministic."""
    for p in sorted(A.primaries):
        by_nu: dict[int, list[int]] = {}
        for a in sorted(A.p_arcs[p]):
            by_nu.setdefault(A.secondaries[A.arcs[a].q].nu, []).append(a)
        for nu in sorted(by_nu):
            arcs = by_nu[nu]
            if len(arcs) < 2:
                continue
            e1, e2 = arcs[0], arcs[1]
            a1, a2 = A.arcs[e1], A.arcs[e2]
            if a1.q == a2.q:
                A._closed_fold(e1, e2)
            else:
                fac = A.factor(nu)
                g = mul(fac, a1.label, inv(a2.label))
                if g:
                    A._conjugate(a2.q, g)
                A._primary_fold(e1, e2)
            return True
    return False


def _step_three(A: WedgeAutomaton, q: int, oracle) -> bool:
    sec = A.secondaries[q]
    fac = A.factor(sec.nu)
    arcs = sorted(A.q_arcs[q])
    for i, e1 in enumerate(arcs):
        for e2 in arcs[i + 1:]:
            a1, a2 = A.arcs[e1], A.arcs[e2]
            if a1.p == a2.p:
                continue
            c = mul(fac, a1.label, inv(a2.label))
            expr = A.label_express(q, c, oracle)
            if expr is None:
                continue
            if c:
                A._adjust(e2, c, expr)
            A._secondary_fold(e1, e2)
            return True
    return False


def _reduce_in_place(A: WedgeAutomaton, oracle) -> int:
    steps = 0
    A._dirty = set(A.secondaries)
    while True:
        if _fold_step(A):
            steps += 1
            continue
        fired = False
        for q in sorted(A._dirty):
            if q not in A.secondaries:
                A._dirty.discard(q)
                continue
            if _step_three(A, q, oracle):
                steps += 1
                fired = True
                break
            A._dirty.discard(q)
        if not fired:
            break
    for q in sorted(A.secondaries):
        if A.secondaries[q].gens:
            A.label_data(q, oracle)
    A._isolate()
    return steps


def certificate(A: WedgeAutomaton, oracle) -> ReducedCertificate:
    connected = A._component_of(A.bp) == set(A.primaries) | set(A.secondaries)
    deterministic = True
    for p in A.primaries:
        nus = [A.secondaries[A.arcs[a].q].nu for a in A.p_arcs[p]]
        if len(nus) != len(set(nus)):
            deterministic = False
    clean = True
    for q in sorted(A.secondaries):
        fac = A.factor(A.secondaries[q].nu)
        arcs = sorted(A.q_arcs[q])
        for i, e1 in enumerate(arcs):
            for e2 in arcs[i + 1:]:
                c = mul(fac, A.arcs[e1].label, inv(A.arcs[e2].label))
                if A.label_express(q, c, oracle) is not None:
                    clean = False
    return ReducedCertificate(connected, deterministic, clean)


def reduce(A: WedgeAutomaton, oracle) -> tuple[WedgeAutomaton, ReducedCertificate]:
    B = A.copy()
    _reduce_in_place(B, oracle)
    return B, certificate(B, oracle)


def apply_transformation(A: WedgeAutomaton, t: TransformationSpec, oracle=None) -> WedgeAutomaton:
    """Apply one elementary transformation to a copy of A, checking its side conditions."""
    B = A.copy()
    kind = t.kind

    def arc(i):
        if i not in B.arcs:
            raise PreconditionViolated(kind, f"no arc {i}")
        return B.arcs[i]

    if kind == "isolation":
        B._isolate()
    elif kind == "adjustment":
        (e,) = t.arcs
        a = arc(e)
        if oracle is None:
            raise PreconditionViolated(kind, "needs a factor membership oracle")
        expr = B.label_express(a.q, mul(B.factor(B.secondaries[a.q].nu), t.element), oracle)
        if expr is None:
            raise PreconditionViolated(kind, "element is not in the vertex label")
        B._adjust(e, mul(B.factor(B.secondaries[a.q].nu), t.element), expr)
    elif kind == "conjugation":
        if t.vertex not in B.secondaries:
            raise PreconditionViolated(kind, f"no secondary vertex {t.vertex}")
        B._conjugate(t.vertex, mul(B.factor(B.secondaries[t.vertex].nu), t.element))
    elif kind in ("primary_open_folding", "secondary_open_folding", "closed_folding"):
        e1, e2 = t.arcs
        a1, a2 = arc(e1), arc(e2)
        if e1 == e2:
            raise PreconditionViolated(kind, "the two arcs coincide")
        if kind == "closed_folding":
            if a1.q != a2.q or a1.p != a2.p:
                raise PreconditionViolated(kind, "arcs must share both endpoints")
            B._closed_fold(e1, e2)
        elif a1.label != a2.label:
            raise PreconditionViolated(kind, "arc labels differ")
        elif kind == "primary_open_folding":
            if a1.p != a2.p or a1.q == a2.q or \
                    B.secondaries[a1.q].nu != B.secondaries[a2.q].nu:
                raise PreconditionViolated(kind, "need same-type secondaries at one primary")
            B._primary_fold(e1, e2)
        else:
            if a1.q != a2.q or a1.p == a2.p:
                raise PreconditionViolated(kind, "need one secondary and two primaries")
            B._secondary_fold(e1, e2)
    else:
        raise PreconditionViolated(kind, "unknown transformation")
    return B


# -- threads -------------------------------------------------------------------

def attach_thread(A: WedgeAutomaton, u: Elt, oracle) -> tuple[WedgeAutomaton, int]:
    """Glue a chain spelling u at the basepoint and fold; returns (automaton, end)."""
    B = A.copy()
    u = mul(B.node, u)
    if not u:
        return B, B.bp
    end = _attach_chain(B, syllables(B.node, u), B.bp, None, EMPTY)
    _reduce_in_place(B, oracle)
    return B, B.resolve(end)


# -- Kurosh decomposition ------------------------------------------------------

@dataclass
class KuroshData:
    free_part: list[tuple[int, Elt, Optional[Expr]]]
    vertex_groups: list[tuple[int, Elt, int, list[Elt]]]
    basis: list[Elt]
    rewrite_out: list[Optional[Expr]]
    edges: frozenset
    z: dict[int, Elt]
    paths: dict[int, Optional[Expr]]
    tree_arcs: frozenset
    symbol_of_arc: dict[int, int]
    symbol_offset: dict[int, int]


def spanning_tree(A: WedgeAutomaton):
    node = A.node
    z: dict[int, Elt] = {A.bp: ()}
    S: dict[int, Optional[Expr]] = {A.bp: EMPTY if A.ledger else None}
    tree: set[int] = set()
    order = [A.bp]
    k = 0
    while k < len(order):
        v = order[k]
        k += 1
        for a in A.arcs_at(v):
            arc = A.arcs[a]
            if v == arc.p and arc.q not in z:
                z[arc.q] = mul(node, arc.label, z[v])
                S[arc.q] = e_mul(arc.sigma, S[v]) if A.ledger else None
                w = arc.q
            elif v == arc.q and arc.p not in z:
                z[arc.p] = mul(node, inv(arc.label), z[v])
                S[arc.p] = e_mul(e_inv(arc.sigma), S[v]) if A.ledger else None
                w = arc.p
            else:
                continue
            tree.add(a)
            order.append(w)
    return z, S, frozenset(tree)


def kurosh_decomposition(A: WedgeAutomaton, oracle=None, check: bool = True) -> KuroshData:
    if check and oracle is not None and not certificate(A, oracle).reduced:
        raise NotReduced("automaton is not reduced")
    node = A.node
    z, S, tree = spanning_tree(A)
    if len(z) != len(A.primaries) + len(A.secondaries):
        raise NotReduced("automaton is not connected")
    basis: list[Elt] = []
    rw: list[Optional[Expr]] = []
    edges: set[tuple[int, int]] = set()
    free_part = []
    symbol_of_arc: dict[int, int] = {}
    for a in sorted(A.arcs):
        if a in tree:
            continue
        arc = A.arcs[a]
        x = mul(node, inv(z[arc.q]), arc.label, z[arc.p])
        expr = e_mul(e_inv(S[arc.q]), arc.sigma, S[arc.p]) if A.ledger else None
        symbol_of_arc[a] = len(basis)
        free_part.append((a, x, expr))
        basis.append(x)
        rw.append(expr)
    groups = []
    offsets: dict[int, int] = {}
    for q in sorted(A.secondaries):
        sec = A.secondaries[q]
        if not sec.gens:
            continue
        off = len(basis)
        offsets[q] = off
        groups.append((q, z[q], sec.nu, list(sec.gens)))
        for c, tau in zip(sec.gens, sec.taus):
            basis.append(mul(node, inv(z[q]), c, z[q]))
            rw.append(e_mul(e_inv(S[q]), tau, S[q]) if A.ledger else None)
        data = sec.data
        if data is not None:
            for i, j in data.edges:
                edges.add((off + i, off + j))
        elif len(sec.gens) > 1:
            raise NotReduced("label has not been compacted to a graphical basis")
    return KuroshData(free_part, groups, basis, rw, frozenset(edges), z, S, tree,
                      symbol_of_arc, offsets)


def read_element(A: WedgeAutomaton, K: KuroshData, elt: Elt) -> Optional[Expr]:
    """Express elt over the Kurosh basis by reading it from the basepoint."""
    node = A.node
    out: list = []
    p = A.bp
    for nu, s in syllables(node, mul(node, elt)):
        fac = node.children[nu]
        e = next((a for a in A.p_arcs[p] if A.secondaries[A.arcs[a].q].nu == nu), None)
        if e is None:
            return None
        q = A.arcs[e].q
        sec = A.secondaries[q]
        hit = None
        for f in sorted(A.q_arcs[q]):
            c = mul(fac, A.arcs[e].label, s, inv(A.arcs[f].label))
            if not sec.gens:
                if not c:
                    hit = (f, EMPTY)
                    break
                continue
            x = sec.data.express(c)
            if x is not None:
                hit = (f, x)
                break
        if hit is None:
            return None
        f, x = hit
        if e not in K.tree_arcs:
            out.append((K.symbol_of_arc[e], -1))
        if x:
            off = K.symbol_offset[q]
            out.extend((off + i, k) for i, k in x)
        if f not in K.tree_arcs:
            out.append((K.symbol_of_arc[f], 1))
        p = A.arcs[f].p
    if p != A.bp:
        return None
    return e_mul(tuple(out))


# -- DOT -----------------------------------------------------------------------

def to_dot(A: WedgeAutomaton, name: str = "wedge", tags: Optional[dict] = None) -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;"]
    for p in sorted(A.primaries):
        shape = "doublecircle" if p == A.bp else "circle"
        tag = f"\\n{tags[p]}" if tags and p in tags else ""
        lines.append(f'  v{p} [shape={shape} label="v{p}{tag}"];')
    for q in sorted(A.secondaries):
        sec = A.secondaries[q]
        gens = ", ".join(format_word(g) for g in sec.gens) or "1"
        tag = f"\\n{tags[q]}" if tags and q in tags else ""
        lines.append(f'  v{q} [shape=box label="v{q} nu={sec.nu}\\n<{gens}>{tag}"];')
    for a in sorted(A.arcs):
        arc = A.arcs[a]
        lines.append(f'  v{arc.q} -> v{arc.p} [label="e{a}: {format_word(arc.label)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
