"""Exact integer-lattice algebra on Z^d.

Lattices are sublattices of Z^d held in row Hermite normal form (HNF), the
unique canonical basis: pivots positive, entries above each pivot reduced to
[0, pivot).  All arithmetic is exact (Python ints / Fractions); no floating
point enters this module.  Values are immutable and all operations are pure,
so everything here is safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    """Return (g, x, y) with g = gcd(a, b) = a*x + b*y."""
    x, nx = 1, 0
    y, ny = 0, 1
    g, ng = a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    return g, x, y


def _echelonize(mat: list[list[int]], carry: Optional[list[list[int]]] = None) -> int:
    """Reduce `mat` in place to row HNF; mirror the row ops on `carry`.

    Zero rows end up at the bottom.  Returns the rank.  The transform carried
    on `carry` (when it starts as the identity) stays unimodular: every step
    is a swap, a negation, or an xgcd 2x2 block of determinant +-1.
    """
    if not mat:
        return 0
    m, n = len(mat), len(mat[0])

    def combine(i: int, j: int, col: int) -> None:
        # zero mat[j][col] against mat[i][col] via a unimodular 2x2 block
        a, b = mat[i][col], mat[j][col]
        g, x, y = _xgcd(a, b)
        u, v = a // g, b // g
        for target in (mat, carry) if carry is not None else (mat,):
            ri, rj = target[i], target[j]
            for k in range(len(ri)):
                s, t = ri[k], rj[k]
                ri[k] = x * s + y * t
                rj[k] = v * s - u * t

    rank = 0
    for col in range(n):
        pivot = next((i for i in range(rank, m) if mat[i][col] != 0), None)
        if pivot is None:
            continue
        if pivot != rank:
            mat[rank], mat[pivot] = mat[pivot], mat[rank]
            if carry is not None:
                carry[rank], carry[pivot] = carry[pivot], carry[rank]
        for i in range(rank + 1, m):
            if mat[i][col] != 0:
                combine(rank, i, col)
        if mat[rank][col] < 0:
            mat[rank] = [-v for v in mat[rank]]
            if carry is not None:
                carry[rank] = [-v for v in carry[rank]]
        rank += 1
    # reduce entries above each pivot into [0, pivot)
    for k in range(rank - 1, -1, -1):
        pcol = next(c for c in range(n) if mat[k][c] != 0)
        p = mat[k][pcol]
        for i in range(k):
            q = mat[i][pcol] // p
            if q:
                mat[i] = [u - q * v for u, v in zip(mat[i], mat[k])]
                if carry is not None:
                    carry[i] = [u - q * v for u, v in zip(carry[i], carry[k])]
    return rank


@dataclass(frozen=True)
class Lattice:
    """A sublattice of Z^dim with basis rows in Hermite normal form."""

    dim: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_full(self) -> bool:
        return self.rank == self.dim

    def is_zero(self) -> bool:
        return self.rank == 0

    def _pivots(self) -> tuple[int, ...]:
        return tuple(next(c for c, v in enumerate(row) if v) for row in self.basis)

    def sort_key(self) -> tuple:
        return (self.dim, self.rank, self.basis)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "basis": [list(r) for r in self.basis]}

    @staticmethod
    def from_dict(obj: dict) -> "Lattice":
        return hnf(obj["basis"], dim=obj["dim"])


def hnf(rows: Iterable[Sequence[int]], dim: Optional[int] = None) -> Lattice:
    """Lattice generated by `rows`, in canonical HNF.

    `dim` is required when `rows` is empty.  Raises ValueError on ragged
    input.
    """
    rows = [list(map(int, r)) for r in rows]
    if dim is None:
        if not rows:
            raise ValueError("dim is required for an empty generating set")
        dim = len(rows[0])
    for r in rows:
        if len(r) != dim:
            raise ValueError(f"row of length {len(r)} in Z^{dim}")
    mat = [r for r in rows if any(r)]
    rank = _echelonize(mat)
    return Lattice(dim, tuple(tuple(r) for r in mat[:rank]))


def zero_lattice(dim: int) -> Lattice:
    return Lattice(dim, ())


def full_lattice(dim: int) -> Lattice:
    return Lattice(dim, tuple(tuple(1 if i == j else 0 for j in range(dim)) for i in range(dim)))


def member(lat: Lattice, v: Sequence[int]) -> bool:
    """Exact membership by back-substitution against the HNF basis."""
    if len(v) != lat.dim:
        raise ValueError("dimension mismatch")
    w = list(map(int, v))
    for row in lat.basis:
        pcol = next(c for c, x in enumerate(row) if x)
        if w[pcol] % row[pcol] != 0:
            return False
        q = w[pcol] // row[pcol]
        if q:
            w = [u - q * x for u, x in zip(w, row)]
    return not any(w)


def reduce_mod(lat: Lattice, v: Sequence[int]) -> tuple[int, ...]:
    """Canonical coset representative of v modulo the lattice.

    Pivot coordinates are brought into [0, pivot); two vectors are congruent
    iff they reduce identically.
    """
    if len(v) != lat.dim:
        raise ValueError("dimension mismatch")
    w = list(map(int, v))
    for row in lat.basis:
        pcol = next(c for c, x in enumerate(row) if x)
        q = w[pcol] // row[pcol]
        if q:
            w = [u - q * x for u, x in zip(w, row)]
    return tuple(w)


def _kernel_rows(mat: Sequence[Sequence[int]]) -> list[list[int]]:
    """Basis of the left kernel {w : w @ mat = 0} of an integer matrix."""
    m = len(mat)
    if m == 0:
        return []
    work = [list(map(int, r)) for r in mat]
    carry = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    rank = _echelonize(work, carry)
    return [carry[i] for i in range(rank, m)]


def kernel(mat: Sequence[Sequence[int]], dim: Optional[int] = None) -> Lattice:
    """Integer right kernel {v in Z^dim : mat @ v = 0} as a lattice.

    Rows of `mat` are linear forms on Z^dim.  The kernel of any integer
    matrix is saturated.
    """
    rows = [list(map(int, r)) for r in mat]
    if dim is None:
        if not rows:
            raise ValueError("dim is required for an empty matrix")
        dim = len(rows[0])
    if not rows:
        return full_lattice(dim)
    transposed = [[rows[i][j] for i in range(len(rows))] for j in range(dim)]
    return hnf(_kernel_rows(transposed), dim=dim)


def solve_left(mat: Sequence[Sequence[int]], target: Sequence[int]) -> Optional[list[int]]:
    """One integer solution x of x @ mat = target, or None.

    `mat` is m x n; x has length m.  Solved exactly through the HNF
    transform.
    """
    m = len(mat)
    n = len(target)
    if m == 0:
        return [] if not any(target) else None
    work = [list(map(int, r)) for r in mat]
    carry = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    rank = _echelonize(work, carry)
    resid = list(map(int, target))
    y = [0] * m
    for k in range(rank):
        pcol = next(c for c, x in enumerate(work[k]) if x)
        if resid[pcol] % work[k][pcol] != 0:
            return None
        y[k] = resid[pcol] // work[k][pcol]
        if y[k]:
            resid = [u - y[k] * x for u, x in zip(resid, work[k])]
    if any(resid):
        return None
    return [sum(y[k] * carry[k][i] for k in range(m)) for i in range(m)]


def intersect(a: Lattice, b: Lattice) -> Lattice:
    """Intersection sublattice, in HNF.

    Intersections of saturated lattices are saturated: each is the integer
    points of a rational subspace, and so is their intersection.
    """
    if a.dim != b.dim:
        raise ValueError("ambient dimension mismatch")
    if a.is_full():
        return b
    if b.is_full():
        return a
    stacked = [list(r) for r in a.basis] + [[-x for x in r] for r in b.basis]
    vecs = []
    for w in _kernel_rows(stacked):
        vecs.append([sum(w[i] * a.basis[i][j] for i in range(a.rank)) for j in range(a.dim)])
    return hnf(vecs, dim=a.dim)


class EmptyCoset:
    """The empty intersection of two lattice cosets (a value, not an error)."""

    _instance: Optional["EmptyCoset"] = None

    def __new__(cls) -> "EmptyCoset":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "EmptyCoset()"

    def __bool__(self) -> bool:
        return False


EMPTY = EmptyCoset()


@dataclass(frozen=True)
class LatticeCoset:
    """offset + lattice, with the offset stored canonically reduced."""

    offset: tuple[int, ...]
    lattice: Lattice

    @staticmethod
    def of(offset: Sequence[int], lattice: Lattice) -> "LatticeCoset":
        return LatticeCoset(reduce_mod(lattice, offset), lattice)

    @property
    def dim(self) -> int:
        return self.lattice.dim

    def contains(self, v: Sequence[int]) -> bool:
        return member(self.lattice, [x - o for x, o in zip(v, self.offset)])

    def sort_key(self) -> tuple:
        return (self.lattice.sort_key(), self.offset)

    def to_dict(self) -> dict:
        d = self.lattice.to_dict()
        d["offset"] = list(self.offset)
        return d

    @staticmethod
    def from_dict(obj: dict) -> "LatticeCoset":
        return LatticeCoset.of(obj["offset"], Lattice.from_dict(obj))


def coset_intersect(c1: LatticeCoset, c2: LatticeCoset):
    """(xi1 + L1) & (xi2 + L2): a LatticeCoset, or EMPTY when disjoint.

    Nonempty iff xi2 - xi1 lies in L1 + L2, decided exactly over Z.
    """
    if c1.dim != c2.dim:
        raise ValueError("ambient dimension mismatch")
    a, b = c1.lattice, c2.lattice
    stacked = [list(r) for r in a.basis] + [[-x for x in r] for r in b.basis]
    target = [y - x for x, y in zip(c1.offset, c2.offset)]
    sol = solve_left(stacked, target)
    if sol is None:
        return EMPTY
    point = list(c1.offset)
    for i in range(a.rank):
        if sol[i]:
            point = [p + sol[i] * x for p, x in zip(point, a.basis[i])]
    return LatticeCoset.of(point, intersect(a, b))


def snf_divisors(lat: Lattice) -> tuple[int, ...]:
    """Smith normal form elementary divisors of the basis matrix."""
    if lat.rank == 0:
        return ()
    mat = [list(r) for r in lat.basis]
    m, n = len(mat), len(mat[0])
    divisors = []
    top = 0
    while top < m:
        # locate the smallest nonzero entry in the remaining block
        best = None
        for i in range(top, m):
            for j in range(top, n):
                if mat[i][j] and (best is None or abs(mat[i][j]) < abs(mat[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        bi, bj = best
        mat[top], mat[bi] = mat[bi], mat[top]
        for row in mat:
            row[top], row[bj] = row[bj], row[top]
        pivot = mat[top][top]
        clean = True
        for i in range(top + 1, m):
            q = mat[i][top] // pivot
            if q:
                mat[i] = [u - q * v for u, v in zip(mat[i], mat[top])]
            if mat[i][top]:
                clean = False
        for j in range(top + 1, n):
            q = mat[top][j] // pivot
            if q:
                for i in range(m):
                    mat[i][j] -= q * mat[i][top]
            if mat[top][j]:
                clean = False
        if not clean:
            continue
        # pivot must divide the rest of the block
        offender = None
        for i in range(top + 1, m):
            for j in range(top + 1, n):
                if mat[i][j] % pivot != 0:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            mat[top] = [u + v for u, v in zip(mat[top], mat[offender])]
            continue
        divisors.append(abs(pivot))
        top += 1
    return tuple(divisors)


def is_saturated(lat: Lattice) -> bool:
    """True iff Z^d / lattice is torsion-free (all SNF divisors are 1)."""
    return all(d == 1 for d in snf_divisors(lat))


def saturate(lat: Lattice) -> Lattice:
    """Smallest saturated lattice containing `lat` (same rational span)."""
    if lat.rank == 0:
        return lat
    # integer points of the span = kernel of the kernel
    return kernel(cokernel_basis(lat), dim=lat.dim)


@lru_cache(maxsize=None)
def cokernel_basis(lat: Lattice) -> tuple[tuple[int, ...], ...]:
    """HNF basis of {v in Z^d : row . v = 0 for every basis row}.

    For a saturated lattice this is the cocharacter lattice of its
    annihilator subtorus.
    """
    return kernel(lat.basis, dim=lat.dim).basis


@dataclass(frozen=True)
class Subtorus:
    """Connected subtorus of T^dim: the annihilator of a saturated lattice.

    `cobasis` generates the cocharacter lattice: the subtorus is the image of
    the real span of these integer vectors in T^dim.
    """

    dim: int
    lattice: Lattice
    cobasis: tuple[tuple[int, ...], ...]

    @property
    def torus_dim(self) -> int:
        return len(self.cobasis)

    def contains_point(self, point: Sequence[Fraction]) -> bool:
        """Whether a rational torus point lies on the subtorus."""
        for row in self.lattice.basis:
            if sum(r * Fraction(p) for r, p in zip(row, point)) % 1 != 0:
                return False
        return True

    def dual_lattice(self) -> Lattice:
        """Characters pairing trivially with the subtorus; round-trips."""
        return kernel(self.cobasis, dim=self.dim)


def annihilator(lat: Lattice) -> Subtorus:
    """The subtorus {x in T^d : v . x in Z for all v in the lattice}.

    Requires a saturated lattice, where the annihilator is connected of
    dimension d - rank.
    """
    if not is_saturated(lat):
        raise ValueError("annihilator requires a saturated lattice; saturate first")
    return Subtorus(lat.dim, lat, cokernel_basis(lat))
