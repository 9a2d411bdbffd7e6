"""Coset-atom measures on T^d.

An atom is (lattice, offset, phase, coeff): on the Fourier side it is the
function chi -> coeff * e^{-2 pi i (chi - offset) . phase} on the coset
offset + lattice (zero elsewhere); on the primal side it is
coeff * e^{2 pi i offset . x} times the unit Haar measure of the translated
subtorus phase + annihilator(lattice).  A Measure is a finite canonical sum
of atoms.  Lattice data, offsets and phases are exact; coefficients are
complex doubles.  Phases are rational turns; the canonical phase is the
representative modulo the rational points of the annihilator subtorus, so
equal measures have identical stored fields.

Measures are immutable after canon and every operation is pure.
"""

from __future__ import annotations

import math
import cmath
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import lcm
from typing import Iterable, Optional, Sequence

from .lattice import (
    EMPTY,
    Lattice,
    LatticeCoset,
    cokernel_basis,
    coset_intersect,
    full_lattice,
    is_saturated,
    member,
    reduce_mod,
    zero_lattice,
)
from .quadrature import QuadSpec, l1_of_trig_sum

PRUNE_EPS = 1e-12
COEFF_TOL = 1e-9


def cis(turn: Fraction) -> complex:
    """e^{2 pi i turn} with exact values at quarter turns."""
    t = turn % 1
    if t == 0:
        return complex(1.0, 0.0)
    if t.denominator == 2:
        return complex(-1.0, 0.0)
    if t.denominator == 4:
        return complex(0.0, 1.0) if t.numerator == 1 else complex(0.0, -1.0)
    x = 2.0 * math.pi * (t.numerator / t.denominator)
    return complex(math.cos(x), math.sin(x))


def _dot(ints: Sequence[int], turns: Sequence[Fraction]) -> Fraction:
    return sum((Fraction(a) * int(i) for i, a in zip(ints, turns)), Fraction(0))


@lru_cache(maxsize=None)
def _saturated(lat: Lattice) -> bool:
    return is_saturated(lat)


@lru_cache(maxsize=None)
def _phase_data(lat: Lattice):
    """Reduction data for phases modulo the annihilator's rational points.

    The cocharacter rows M span the subtorus; eliminating their pivot
    coordinates projects along span_Q(M), and the image of Z^d under that
    projection is a rational lattice against which the remainder is reduced.
    """
    rows = cokernel_basis(lat)
    d = lat.dim
    pivots = tuple(next(c for c, v in enumerate(row) if v) for row in rows)
    nonpivots = tuple(c for c in range(d) if c not in pivots)

    def eliminate(vec: list[Fraction]) -> list[Fraction]:
        out = list(vec)
        for row, p in zip(rows, pivots):
            t = out[p] / row[p]
            if t:
                out = [x - t * r for x, r in zip(out, row)]
        return out

    gens = []
    denom = 1
    for j in range(d):
        unit = [Fraction(int(i == j)) for i in range(d)]
        proj = eliminate(unit)
        img = [proj[c] for c in nonpivots]
        gens.append(img)
        for x in img:
            denom = lcm(denom, x.denominator)
    from .lattice import hnf

    scaled = [[int(x * denom) for x in row] for row in gens]
    red = hnf(scaled, dim=len(nonpivots)) if nonpivots else None
    return rows, pivots, nonpivots, red, denom


def reduce_phase(lat: Lattice, phase: Sequence[Fraction]) -> tuple[Fraction, ...]:
    """Canonical representative of a phase modulo the subtorus relations."""
    rows, pivots, nonpivots, red, denom = _phase_data(lat)
    out = [Fraction(p) for p in phase]
    for row, p in zip(rows, pivots):
        t = out[p] / row[p]
        if t:
            out = [x - t * Fraction(r) for x, r in zip(out, row)]
    if not nonpivots:
        return (Fraction(0),) * lat.dim
    z = [out[c] * denom for c in nonpivots]
    for row in red.basis:
        pcol = next(c for c, v in enumerate(row) if v)
        q = math.floor(z[pcol] / row[pcol])
        if q:
            z = [x - q * r for x, r in zip(z, row)]
    result = [Fraction(0)] * lat.dim
    for c, v in zip(nonpivots, z):
        result[c] = v / denom
    return tuple(result)


@dataclass(frozen=True)
class SpectralAtom:
    lattice: Lattice
    offset: tuple[int, ...]
    phase: tuple[Fraction, ...]
    coeff: complex

    def key(self) -> tuple:
        return (
            self.lattice.sort_key(),
            self.offset,
            tuple((p.numerator, p.denominator) for p in self.phase),
        )

    def coset(self) -> LatticeCoset:
        return LatticeCoset(self.offset, self.lattice)

    def fourier_on_coset(self, chi: Sequence[int]) -> complex:
        """Value at chi, assuming chi lies on the atom's coset."""
        shift = tuple(c - o for c, o in zip(chi, self.offset))
        return self.coeff * cis(-_dot(shift, self.phase))

    def to_dict(self) -> dict:
        return {
            "lattice": self.lattice.to_dict(),
            "offset": list(self.offset),
            "phase": [f"{p.numerator}/{p.denominator}" for p in self.phase],
            "coeff": [self.coeff.real, self.coeff.imag],
        }


def make_atom(
    lattice: Lattice,
    offset: Sequence[int],
    phase: Sequence,
    coeff: complex,
) -> SpectralAtom:
    """Canonical atom: offset reduced (rebasing the coefficient), phase reduced."""
    if not _saturated(lattice):
        raise ValueError("atom lattices must be saturated")
    offset = tuple(map(int, offset))
    phase = tuple(Fraction(p) for p in phase)
    if len(offset) != lattice.dim or len(phase) != lattice.dim:
        raise ValueError("dimension mismatch")
    red = reduce_mod(lattice, offset)
    c = complex(coeff)
    if red != offset:
        shift = tuple(r - o for r, o in zip(red, offset))
        c = c * cis(-_dot(shift, phase))
    return SpectralAtom(lattice, red, reduce_phase(lattice, phase), c)


@dataclass(frozen=True)
class Measure:
    """A finite canonical sum of spectral atoms on T^dim."""

    dim: int
    atoms: tuple[SpectralAtom, ...]

    def is_zero(self) -> bool:
        return not self.atoms

    def __add__(self, other: "Measure") -> "Measure":
        if self.dim != other.dim:
            raise ValueError("dimension mismatch")
        return canon(self.atoms + other.atoms, dim=self.dim)

    def __sub__(self, other: "Measure") -> "Measure":
        return self + (-1.0) * other

    def __neg__(self) -> "Measure":
        return (-1.0) * self

    def __rmul__(self, scalar: complex) -> "Measure":
        scaled = [
            SpectralAtom(a.lattice, a.offset, a.phase, complex(scalar) * a.coeff)
            for a in self.atoms
        ]
        return canon(scaled, dim=self.dim)

    def isclose(self, other: "Measure", tol: float = COEFF_TOL) -> bool:
        """Identical canonical atom keys, coefficients within tol."""
        if self.dim != other.dim or len(self.atoms) != len(other.atoms):
            return False
        return all(
            a.key() == b.key() and abs(a.coeff - b.coeff) <= tol
            for a, b in zip(self.atoms, other.atoms)
        )

    def to_dict(self) -> dict:
        return {"dim": self.dim, "atoms": [a.to_dict() for a in self.atoms]}

    @staticmethod
    def from_dict(obj: dict) -> "Measure":
        dim = obj["dim"]
        raw = []
        for a in obj["atoms"]:
            lat = Lattice.from_dict(a["lattice"])
            raw.append(
                make_atom(
                    lat,
                    a["offset"],
                    [Fraction(p) for p in a["phase"]],
                    complex(a["coeff"][0], a["coeff"][1]),
                )
            )
        return canon(raw, dim=dim)


def canon(atoms: Iterable[SpectralAtom], dim: Optional[int] = None) -> Measure:
    """Group, merge, prune and order atoms into the canonical form.

    Canonicalizing a canonical measure is a no-op bit for bit.
    """
    atoms = list(atoms)
    if dim is None:
        if not atoms:
            raise ValueError("dim is required for an empty measure")
        dim = atoms[0].lattice.dim
    for a in atoms:
        if a.lattice.dim != dim:
            raise ValueError("mixed ambient dimensions")
    normalized = [make_atom(a.lattice, a.offset, a.phase, a.coeff) for a in atoms]
    merged: dict[tuple, list] = {}
    for a in normalized:
        entry = merged.setdefault(a.key(), [a, 0.0 + 0.0j])
        entry[1] += a.coeff
    out = []
    for key in sorted(merged):
        proto, total = merged[key]
        if abs(total) >= PRUNE_EPS:
            out.append(SpectralAtom(proto.lattice, proto.offset, proto.phase, total))
    return Measure(dim, tuple(out))


# ---------------------------------------------------------------------------
# constructors

def zero_measure(dim: int) -> Measure:
    return Measure(dim, ())


def point_mass(point: Sequence, dim: Optional[int] = None, coeff: complex = 1.0) -> Measure:
    """Dirac mass at a rational torus point."""
    point = tuple(Fraction(p) for p in point)
    dim = dim or len(point)
    return canon([make_atom(full_lattice(dim), (0,) * dim, point, coeff)], dim=dim)


def haar(dim: int, coeff: complex = 1.0) -> Measure:
    """Normalized Haar measure of the whole torus."""
    zero = (Fraction(0),) * dim
    return canon([make_atom(zero_lattice(dim), (0,) * dim, zero, coeff)], dim=dim)


def annihilator_haar(lat: Lattice, coeff: complex = 1.0) -> Measure:
    """Haar measure of the annihilator subtorus; transform = 1 on the lattice."""
    zero = (Fraction(0),) * lat.dim
    return canon([make_atom(lat, (0,) * lat.dim, zero, coeff)], dim=lat.dim)


def from_density(coeffs: dict, dim: int) -> Measure:
    """Absolutely continuous measure f dx for a trig-polynomial density f."""
    zero = (Fraction(0),) * dim
    atoms = [
        make_atom(zero_lattice(dim), tuple(freq), zero, c) for freq, c in coeffs.items()
    ]
    return canon(atoms, dim=dim)


# ---------------------------------------------------------------------------
# core operations

def fourier_at(mu: Measure, chi: Sequence[int]) -> complex:
    """mu-hat at a frequency: exact phase arithmetic, double coefficients."""
    chi = tuple(map(int, chi))
    if len(chi) != mu.dim:
        raise ValueError("dimension mismatch")
    total = 0.0 + 0.0j
    for a in mu.atoms:
        if member(a.lattice, tuple(c - o for c, o in zip(chi, a.offset))):
            total += a.fourier_on_coset(chi)
    return total


def translate(mu: Measure, t: Sequence) -> Measure:
    """The translation action: (T_t mu)(A) = mu(A + t) for rational t.

    On transforms, (T_t mu)-hat(chi) = e^{2 pi i chi . t} mu-hat(chi).
    """
    t = tuple(Fraction(x) for x in t)
    if len(t) != mu.dim:
        raise ValueError("dimension mismatch")
    moved = [
        make_atom(
            a.lattice,
            a.offset,
            tuple(p - s for p, s in zip(a.phase, t)),
            a.coeff * cis(_dot(a.offset, t)),
        )
        for a in mu.atoms
    ]
    return canon(moved, dim=mu.dim)


def convolve(mu: Measure, nu: Measure) -> Measure:
    """Convolution; transforms multiply pointwise."""
    if mu.dim != nu.dim:
        raise ValueError("dimension mismatch")
    out = []
    for a in mu.atoms:
        for b in nu.atoms:
            meet = coset_intersect(a.coset(), b.coset())
            if meet is EMPTY:
                continue
            xi = meet.offset
            c = (
                a.coeff
                * b.coeff
                * cis(-_dot(tuple(x - o for x, o in zip(xi, a.offset)), a.phase))
                * cis(-_dot(tuple(x - o for x, o in zip(xi, b.offset)), b.phase))
            )
            out.append(
                make_atom(meet.lattice, xi, tuple(p + q for p, q in zip(a.phase, b.phase)), c)
            )
    return canon(out, dim=mu.dim)


def support(mu: Measure) -> list[LatticeCoset]:
    """Cosets carrying the transform, after canonicalization.

    Exact whenever each (lattice, coset) pair holds a single phase class;
    with several phase classes the union may over-approximate the true
    support on a proper sub-coset.
    """
    seen: dict[tuple, LatticeCoset] = {}
    for a in mu.atoms:
        c = a.coset()
        seen.setdefault(c.sort_key(), c)
    return [seen[k] for k in sorted(seen)]


def support_groups(mu: Measure) -> list[tuple[LatticeCoset, list[SpectralAtom]]]:
    """Atoms bucketed by (lattice, coset), in canonical order."""
    buckets: dict[tuple, list] = {}
    for a in mu.atoms:
        buckets.setdefault(a.coset().sort_key(), []).append(a)
    return [(buckets[k][0].coset(), buckets[k]) for k in sorted(buckets)]


def lebesgue_decompose(mu: Measure) -> tuple[Measure, Measure]:
    """(absolutely continuous, singular) parts against Haar on T^d.

    Rank-0 atoms are densities; atoms on proper subtorus cosets are
    Haar-null.  The parts sum back to the input exactly.
    """
    ac = [a for a in mu.atoms if a.lattice.rank == 0]
    sing = [a for a in mu.atoms if a.lattice.rank >= 1]
    return Measure(mu.dim, tuple(ac)), Measure(mu.dim, tuple(sing))


def pair(mu: Measure, poly) -> complex:
    """Integral of a trig polynomial against the measure: a finite exact sum."""
    total = 0.0 + 0.0j
    for freq, c in poly.coeffs.items():
        total += c * fourier_at(mu, tuple(-x for x in freq))
    return total


@dataclass(frozen=True)
class TVResult:
    value: float
    error: float
    converged: bool

    def __float__(self) -> float:
        return self.value


def total_variation(mu: Measure, quad: QuadSpec = QuadSpec()) -> TVResult:
    """Total variation norm.

    Atoms sharing (lattice, phase class) live on one translated subtorus and
    are integrated together; distinct groups are mutually singular (their
    carrying cosets intersect in lower-dimensional, hence null, sets), so the
    norm is the sum of the group integrals.  Single-atom groups are |coeff|
    exactly; the rest use doubling quadrature.
    """
    groups: dict[tuple, list[SpectralAtom]] = {}
    for a in mu.atoms:
        key = (a.lattice.sort_key(), tuple((p.numerator, p.denominator) for p in a.phase))
        groups.setdefault(key, []).append(a)
    value = 0.0
    error = 0.0
    converged = True
    for key in sorted(groups):
        members = groups[key]
        if len(members) == 1:
            value += abs(members[0].coeff)
            continue
        rows = cokernel_basis(members[0].lattice)
        if not rows:
            value += abs(sum(a.coeff for a in members))
            continue
        freqs = [tuple(sum(r * o for r, o in zip(row, a.offset)) for row in rows) for a in members]
        coeffs = [a.coeff * cis(_dot(a.offset, a.phase)) for a in members]
        v, e, ok = l1_of_trig_sum(freqs, coeffs, quad)
        value += v
        error += e
        converged = converged and ok
    return TVResult(value, error, converged)
