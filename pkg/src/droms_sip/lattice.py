"""Exact subgroups and cosets of Z^m.

Everything rests on one routine, ``hnf``: integer row reduction to Hermite
normal form (row-echelon, positive pivots, entries above a pivot reduced into
[0, pivot)), returning the unimodular transform as well.  Rows of the
transform past the rank span the left kernel.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Optional, Sequence

Vector = tuple[int, ...]
Matrix = list[list[int]]


class DimensionMismatch(ValueError):
    pass


def hnf(rows: Sequence[Sequence[int]], ncols: int) -> tuple[Matrix, Matrix, int]:
    """Return (H, U, rank) with U unimodular, U·A = H, H in Hermite normal form.

    H has the same number of rows as A; rows past ``rank`` are zero.
    """
    n = len(rows)
    a = [list(r) for r in rows]
    for r in a:
        if len(r) != ncols:
            raise DimensionMismatch(f"row of length {len(r)} in a {ncols}-column matrix")
    u = [[int(i == j) for j in range(n)] for i in range(n)]
    r = 0
    pivots = []
    for c in range(ncols):
        if r >= n:
            break
        while True:
            nz = [i for i in range(r, n) if a[i][c]]
            if not nz:
                break
            k = min(nz, key=lambda i: (abs(a[i][c]), i))
            if k != r:
                a[r], a[k] = a[k], a[r]
                u[r], u[k] = u[k], u[r]
            done = True
            for i in range(r + 1, n):
                if a[i][c]:
                    q = a[i][c] // a[r][c]
                    _axpy(a[i], a[r], -q)
                    _axpy(u[i], u[r], -q)
                    if a[i][c]:
                        done = False
            if done:
                break
        if not a[r][c]:
            continue
        if a[r][c] < 0:
            a[r] = [-x for x in a[r]]
            u[r] = [-x for x in u[r]]
        p = a[r][c]
        for i in range(r):
            q = a[i][c] // p
            if q:
                _axpy(a[i], a[r], -q)
                _axpy(u[i], u[r], -q)
        pivots.append(c)
        r += 1
    return a, u, r


def _axpy(y: list[int], x: Sequence[int], k: int) -> None:
    for j, xv in enumerate(x):
        if xv:
            y[j] += k * xv


def _pivot_cols(basis: Sequence[Sequence[int]]) -> list[int]:
    out = []
    for row in basis:
        out.append(next(j for j, x in enumerate(row) if x))
    return out


def vec_add(a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(x + y for x, y in zip(a, b))


def vec_sub(a: Sequence[int], b: Sequence[int]) -> Vector:
    return tuple(x - y for x, y in zip(a, b))


def vec_scale(a: Sequence[int], k: int) -> Vector:
    return tuple(k * x for x in a)


def vec_mat(v: Sequence[int], rows: Sequence[Sequence[int]], ncols: int) -> Vector:
    out = [0] * ncols
    for k, row in zip(v, rows):
        if k:
            _axpy(out, row, k)
    return tuple(out)


def mat_sub(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    return [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(a, b)]


def _echelon_solve(basis: Sequence[Sequence[int]], pivots: Sequence[int],
                   target: Sequence[int]) -> Optional[list[int]]:
    """Coefficients z with z·basis = target, or None."""
    v = list(target)
    coeffs = []
    for row, c in zip(basis, pivots):
        if any(v[j] for j in range(c)):
            return None
        k, rem = divmod(v[c], row[c])
        if rem:
            return None
        coeffs.append(k)
        if k:
            _axpy(v, row, -k)
    if any(v):
        return None
    return coeffs


def solve(rows: Sequence[Sequence[int]], target: Sequence[int], ncols: int) -> Optional[Vector]:
    """Integer x with x·rows = target, or None."""
    if len(target) != ncols:
        raise DimensionMismatch("target length does not match the matrix")
    if not rows:
        return () if not any(target) else None
    h, u, rank = hnf(rows, ncols)
    basis = h[:rank]
    z = _echelon_solve(basis, _pivot_cols(basis), target)
    if z is None:
        return None
    return vec_mat(z, u[:rank], len(rows))


def left_kernel(rows: Sequence[Sequence[int]], ncols: int) -> Matrix:
    """Basis of {y : y·rows = 0}."""
    if not rows:
        return []
    h, u, rank = hnf(rows, ncols)
    return [list(r) for r in u[rank:]]


# -- lattices ---------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    m: int
    basis: tuple[Vector, ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @property
    def pivots(self) -> list[int]:
        return _pivot_cols(self.basis)

    def to_json(self) -> dict:
        return {"rank": self.rank, "basis": [list(r) for r in self.basis]}


@dataclass(frozen=True)
class AffineCoset:
    offset: Vector
    lattice: Lattice


def _check(m: int, vecs) -> None:
    for v in vecs:
        if len(v) != m:
            raise DimensionMismatch(f"vector {tuple(v)} does not have length {m}")


def lattice_with_transform(m: int, gens: Sequence[Sequence[int]]) -> tuple[Lattice, Matrix]:
    """Canonical lattice plus T with basis row l = sum_i T[l][i] gens[i]."""
    _check(m, gens)
    if not gens:
        return Lattice(m, ()), []
    h, u, rank = hnf(gens, m)
    return Lattice(m, tuple(tuple(r) for r in h[:rank])), [list(r) for r in u[:rank]]


def lattice_from_generators(m: int, gens: Sequence[Sequence[int]]) -> Lattice:
    return lattice_with_transform(m, gens)[0]


def zero_lattice(m: int) -> Lattice:
    return Lattice(m, ())


def full_lattice(m: int) -> Lattice:
    return Lattice(m, tuple(tuple(int(i == j) for j in range(m)) for i in range(m)))


def lattice_member(L: Lattice, v: Sequence[int]) -> tuple[bool, Optional[Vector]]:
    _check(L.m, [v])
    z = _echelon_solve(L.basis, L.pivots, v)
    if z is None:
        return False, None
    return True, tuple(z)


def reduce_mod(L: Lattice, v: Sequence[int]) -> Vector:
    """Canonical representative of v + L."""
    _check(L.m, [v])
    w = list(v)
    for row, c in zip(L.basis, L.pivots):
        k = w[c] // row[c]
        if k:
            _axpy(w, row, -k)
    return tuple(w)


def lattice_sum(L1: Lattice, L2: Lattice) -> Lattice:
    if L1.m != L2.m:
        raise DimensionMismatch("lattices of different ambient rank")
    return lattice_from_generators(L1.m, list(L1.basis) + list(L2.basis))


def lattice_intersect(L1: Lattice, L2: Lattice) -> Lattice:
    if L1.m != L2.m:
        raise DimensionMismatch("lattices of different ambient rank")
    if not L1.basis or not L2.basis:
        return zero_lattice(L1.m)
    stacked = list(L1.basis) + [vec_scale(r, -1) for r in L2.basis]
    ker = left_kernel(stacked, L1.m)
    k1 = L1.rank
    gens = [vec_mat(y[:k1], L1.basis, L1.m) for y in ker]
    return lattice_from_generators(L1.m, gens)


def matrix_preimage(A: Sequence[Sequence[int]], L: Lattice, n: Optional[int] = None) -> Lattice:
    """{d in Z^n : d·A in L} for an n x m matrix A."""
    if n is None:
        n = len(A)
    if len(A) != n:
        raise DimensionMismatch("matrix row count does not match n")
    _check(L.m, A)
    if n == 0:
        return zero_lattice(0)
    stacked = [list(r) for r in A] + [list(vec_scale(r, -1)) for r in L.basis]
    ker = left_kernel(stacked, L.m)
    return lattice_from_generators(n, [y[:n] for y in ker])


def affine_intersect(c1: AffineCoset, c2: AffineCoset) -> Optional[AffineCoset]:
    L1, L2 = c1.lattice, c2.lattice
    if L1.m != L2.m or len(c1.offset) != L1.m or len(c2.offset) != L2.m:
        raise DimensionMismatch("cosets of different ambient rank")
    m = L1.m
    target = vec_sub(c2.offset, c1.offset)
    stacked = list(L1.basis) + [vec_scale(r, -1) for r in L2.basis]
    x = solve(stacked, target, m)
    if x is None:
        return None
    point = vec_add(c1.offset, vec_mat(x[:L1.rank], L1.basis, m))
    meet = lattice_intersect(L1, L2)
    return AffineCoset(reduce_mod(meet, point), meet)


def finite_index_and_reps(L: Lattice) -> tuple[Optional[int], list[Vector]]:
    """(index, representatives) or (None, []) when the index is infinite."""
    if L.rank < L.m:
        return None, []
    diag = [L.basis[i][i] for i in range(L.m)]
    index = 1
    for p in diag:
        index *= p
    reps = []
    for digits in product(*[range(p) for p in reversed(diag)]):
        reps.append(tuple(reversed(digits)))
    return index, reps
