"""Box brute force for integer lattices, independent of droms_sip.lattice.

``reach`` flood-fills the points of ⟨gens⟩ inside [-R, R]^m from the origin
by steps ±g.  By the Steinitz lemma any representation of v can be reordered
so that partial sums stay within m·max|g| of the segment [0, v], so the fill
is exact for every |v| <= R - m·max|g|.
"""

import numpy as np

R = 30


class Reach:
    def __init__(self, m, gens, radius=R):
        self.m = m
        self.radius = radius
        self.cmax = max([abs(x) for g in gens for x in g] + [0])
        size = 2 * radius + 1
        grid = np.zeros((size,) * m, dtype=bool)
        grid[(radius,) * m] = True
        steps = [tuple(g) for g in gens if any(g)]
        steps += [tuple(-x for x in g) for g in steps]
        while True:
            new = grid.copy()
            for s in steps:
                src = tuple(slice(max(0, -d), size - max(0, d)) for d in s)
                dst = tuple(slice(max(0, d), size - max(0, -d)) for d in s)
                new[dst] |= grid[src]
            if (new == grid).all():
                break
            grid = new
        self.grid = grid

    @property
    def exact(self):
        return self.radius - self.m * self.cmax

    def __contains__(self, v):
        if any(abs(x) > self.exact for x in v):
            raise ValueError(f"{v} outside the exact region")
        return bool(self.grid[tuple(x + self.radius for x in v)])


def box(m, r):
    import itertools
    return itertools.product(range(-r, r + 1), repeat=m)


def random_gens(rng, m, k, lo=-5, hi=5):
    return [tuple(rng.randint(lo, hi) for _ in range(m)) for _ in range(k)]


def check_case(rng, inner=6):
    """One random case over sum / intersect / preimage / affine_intersect.

    Returns a list of mismatch descriptions (empty when everything agrees).
    """
    from droms_sip.lattice import (AffineCoset, affine_intersect, lattice_from_generators,
                                   lattice_intersect, lattice_member, lattice_sum,
                                   matrix_preimage)

    m = rng.randint(1, 3)
    g1 = random_gens(rng, m, rng.randint(0, 3))
    g2 = random_gens(rng, m, rng.randint(0, 3))
    L1, L2 = lattice_from_generators(m, g1), lattice_from_generators(m, g2)
    r1, r2 = Reach(m, g1), Reach(m, g2)
    rs = Reach(m, g1 + g2)
    S, M = lattice_sum(L1, L2), lattice_intersect(L1, L2)
    bad = []
    for v in box(m, inner):
        a, b = v in r1, v in r2
        if lattice_member(L1, v)[0] != a:
            bad.append(("member", g1, v))
        if lattice_member(S, v)[0] != (v in rs):
            bad.append(("sum", g1, g2, v))
        if lattice_member(M, v)[0] != (a and b):
            bad.append(("intersect", g1, g2, v))
    # preimage of L1 under a small n x m matrix
    n = rng.randint(1, 3)
    A = random_gens(rng, m, n, -2, 2)
    P = matrix_preimage(A, L1, n)
    for d in box(n, 2):
        img = tuple(sum(d[i] * A[i][j] for i in range(n)) for j in range(m))
        if lattice_member(P, d)[0] != (img in r1):
            bad.append(("preimage", A, g1, d))
    # affine cosets
    o1 = tuple(rng.randint(-5, 5) for _ in range(m))
    o2 = tuple(rng.randint(-5, 5) for _ in range(m))
    C = affine_intersect(AffineCoset(o1, L1), AffineCoset(o2, L2))
    for v in box(m, inner):
        brute = tuple(x - y for x, y in zip(v, o1)) in r1 and tuple(x - y for x, y in zip(v, o2)) in r2
        mine = C is not None and lattice_member(C.lattice, tuple(x - y for x, y in zip(v, C.offset)))[0]
        if brute != mine:
            bad.append(("affine", o1, g1, o2, g2, v))
    return bad
