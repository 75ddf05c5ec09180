"""Brute-force ground truth at desk scale.

Balls are built from normal forms alone, so the enumeration never touches the
solver.  ``check_against_solver`` then compares a solver outcome with the
balls, using solver membership only to confirm the certificates it returns.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .expressions import evaluate
from .words import Elt, GroupWord, Node, ambient_for, canon, inv, mul

DEFAULT_DEPTH = 6
DEFAULT_CAP = 200_000


class CapExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Ball:
    ambient: object
    radius: int
    elements: frozenset

    def __len__(self):
        return len(self.elements)

    def __contains__(self, elt):
        return elt in self.elements


def _ball(root: Node, gens: tuple[Elt, ...], depth: int, cap: int) -> tuple[frozenset, dict]:
    """All products of at most ``depth`` generators or inverses; elt -> first length."""
    steps = []
    for g in gens:
        g = canon(root, g)
        if g:
            steps.append(g)
            steps.append(canon(root, inv(g)))
    seen = {(): 0}
    frontier = [()]
    for r in range(1, depth + 1):
        nxt = []
        for x in frontier:
            for s in steps:
                y = mul(root, x, s)
                if y not in seen:
                    seen[y] = r
                    nxt.append(y)
                    if len(seen) > cap:
                        raise CapExceeded(f"ball exceeds {cap} elements at radius {r}")
        frontier = nxt
        if not frontier:
            break
    return frozenset(seen), seen


def enumerate_subgroup_ball(H, depth: int = DEFAULT_DEPTH, cap: int = DEFAULT_CAP,
                            max_depth: int = 12) -> Ball:
    if depth > max_depth:
        raise CapExceeded(f"depth {depth} exceeds the configured cap {max_depth}")
    root = ambient_for(H.ambient).root
    elems, _ = _ball(root, H.elts(), depth, cap)
    return Ball(H.ambient, depth, elems)


def brute_intersection(H, K, depth: int = DEFAULT_DEPTH, cap: int = DEFAULT_CAP) -> frozenset:
    return enumerate_subgroup_ball(H, depth, cap).elements & enumerate_subgroup_ball(K, depth, cap).elements


def brute_coset_meet(H, K, w: Elt, w2: Elt, depth: int = DEFAULT_DEPTH,
                     cap: int = DEFAULT_CAP) -> Optional[Elt]:
    """Some element of wH ∩ w'K found inside the two balls, or None."""
    root = ambient_for(H.ambient).root
    bh = enumerate_subgroup_ball(H, depth, cap).elements
    bk = enumerate_subgroup_ball(K, depth, cap).elements
    left = {mul(root, w, h) for h in bh}
    hits = sorted((g for g in (mul(root, w2, k) for k in bk) if g in left),
                  key=lambda g: (len(g), g))
    return hits[0] if hits else None


@dataclass
class Report:
    violations: list[str] = field(default_factory=list)
    checked_elements: int = 0
    generators_in_ball: int = 0
    generators_certified: int = 0
    notes: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def certified_member(H, elt: Elt) -> bool:
    """Solver membership, accepted only if its witness word evaluates back to elt."""
    from .solver import membership

    root = ambient_for(H.ambient).root
    x = membership(H, GroupWord(H.ambient, elt))
    if x is None:
        return False
    return evaluate(root, x, H.elts()) == canon(root, elt)


def check_against_solver(H, K, outcome, depth: int = DEFAULT_DEPTH, cap: int = DEFAULT_CAP,
                         w: Optional[GroupWord] = None, w2: Optional[GroupWord] = None) -> Report:
    from .solver import make_subgroup

    rep = Report()
    root = ambient_for(H.ambient).root
    brute = brute_intersection(H, K, depth, cap)
    rep.checked_elements = len(brute)
    if outcome.fg:
        claimed = make_subgroup(H.ambient, outcome.generators)
        # (a) brute-force intersection elements lie in the claimed subgroup
        for x in sorted(brute, key=lambda g: (len(g), g)):
            if not certified_member(claimed, x):
                rep.violations.append(f"missing from claimed intersection: {x}")
        # (b) claimed generators lie in both subgroups
        for g in outcome.generators:
            elt = canon(root, g.letters)
            if elt in brute:
                rep.generators_in_ball += 1
            if certified_member(H, elt) and certified_member(K, elt):
                rep.generators_certified += 1
            else:
                rep.violations.append(f"claimed generator not in both subgroups: {g}")
    else:
        wit = outcome.commutator_witness
        if wit is not None:
            elt = canon(root, wit.letters)
            if not elt:
                rep.violations.append("commutator witness is trivial")
            elif not (certified_member(H, elt) and certified_member(K, elt)):
                rep.violations.append("commutator witness not in both subgroups")
    # (c) coset answers
    if outcome.coset is not None and (w is not None or w2 is not None):
        we = canon(root, w.letters if w is not None else ())
        we2 = canon(root, w2.letters if w2 is not None else ())
        if outcome.coset.kind == "witness":
            g = canon(root, outcome.coset_witness.letters)
            if not certified_member(H, mul(root, inv(we), g)):
                rep.violations.append("coset witness not in wH")
            if not certified_member(K, mul(root, inv(we2), g)):
                rep.violations.append("coset witness not in w'K")
        elif outcome.coset.kind == "empty":
            found = brute_coset_meet(H, K, we, we2, depth, cap)
            if found is not None:
                rep.violations.append(f"coset reported empty but ball finds {found}")
        else:
            rep.notes.append("coset undecided")
    return rep
