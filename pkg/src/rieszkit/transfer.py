"""Homomorphism calculus: pushforward of measures and norm transference.

An integer matrix on the frequency side has the torus map given by its
transpose as adjoint.  Pushforward composes transforms with the matrix, so
an atom maps to the preimage coset of its carrier, with the phase point
pulled through the adjoint and the coefficient rebased exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .lattice import LatticeCoset, hnf, solve_left, reduce_mod
from .measure import (
    Measure,
    canon,
    cis,
    convolve,
    fourier_at,
    make_atom,
    support,
    total_variation,
    _dot,
)
from .hardy import TrigPoly, l1_norm, require_analytic
from .order import OrderChain
from .quadrature import QuadSpec


@dataclass(frozen=True)
class Homomorphism:
    """Frequency-side map Z^{dim_from} -> Z^{dim_to} and its torus adjoint."""

    matrix: tuple[tuple[int, ...], ...]

    @staticmethod
    def of(rows: Sequence[Sequence[int]]) -> "Homomorphism":
        rows = tuple(tuple(map(int, r)) for r in rows)
        if not rows or len({len(r) for r in rows}) != 1:
            raise ValueError("matrix must be rectangular and nonempty")
        return Homomorphism(rows)

    @property
    def dim_from(self) -> int:
        return len(self.matrix[0])

    @property
    def dim_to(self) -> int:
        return len(self.matrix)

    def apply(self, chi: Sequence[int]) -> tuple[int, ...]:
        return tuple(sum(r * c for r, c in zip(row, chi)) for row in self.matrix)

    def adjoint_point(self, t: Sequence[Fraction]) -> tuple[Fraction, ...]:
        """Torus map: column pairings of the matrix with a point of T^{dim_to}."""
        return tuple(
            sum((Fraction(t[i]) * self.matrix[i][j] for i in range(self.dim_to)), Fraction(0))
            for j in range(self.dim_from)
        )

    def to_dict(self) -> dict:
        return {"matrix": [list(r) for r in self.matrix]}

    @staticmethod
    def from_dict(obj: dict) -> "Homomorphism":
        return Homomorphism.of(obj["matrix"])


def _preimage_data(hom: Homomorphism, lat_basis: tuple[tuple[int, ...], ...]):
    """Stacked system whose row solutions realize psi(chi) inside the lattice."""
    d1, d2 = hom.dim_from, hom.dim_to
    transpose = [[hom.matrix[i][j] for i in range(d2)] for j in range(d1)]
    stacked = transpose + [[-x for x in row] for row in lat_basis]
    return stacked, d1


def pushforward(nu: Measure, hom: Homomorphism) -> Measure:
    """The measure on the target torus whose transform is nu-hat after the matrix.

    Each atom's carrier pulls back to a coset of the (saturated) preimage
    lattice, or to nothing when the offset equation has no integer solution.
    """
    if nu.dim != hom.dim_to:
        raise ValueError("measure lives on the wrong torus for this map")
    out = []
    for a in nu.atoms:
        stacked, d1 = _preimage_data(hom, a.lattice.basis)
        # preimage lattice: chi-parts of the solution space of the homogeneous system
        lat1 = _preimage_lattice(hom, a.lattice.basis)
        sol = solve_left(stacked, a.offset)
        if sol is None:
            continue
        xi1 = tuple(sol[:d1])
        phase1 = hom.adjoint_point(a.phase)
        shift = tuple(x - o for x, o in zip(hom.apply(xi1), a.offset))
        coeff = a.coeff * cis(-_dot(shift, a.phase))
        out.append(make_atom(lat1, xi1, phase1, coeff))
    return canon(out, dim=hom.dim_from)


def _preimage_lattice(hom: Homomorphism, lat_basis: tuple[tuple[int, ...], ...]):
    """{chi : psi(chi) in the lattice}, computed through the stacked kernel."""
    from .lattice import _kernel_rows

    stacked, d1 = _preimage_data(hom, lat_basis)
    vecs = [w[:d1] for w in _kernel_rows(stacked)]
    return hnf(vecs, dim=d1)


def convolve_via_phi(nu: Measure, mu: Measure, hom: Homomorphism) -> Measure:
    """Convolution of mu by nu through the adjoint torus map."""
    return convolve(pushforward(nu, hom), mu)


def spec_pushforward(mu: Measure, hom: Homomorphism) -> list[LatticeCoset]:
    """Images of the support cosets under the frequency-side matrix."""
    if mu.dim != hom.dim_from:
        raise ValueError("measure lives on the wrong torus for this map")
    out = []
    seen = set()
    for coset in support(mu):
        image_lat = hnf([hom.apply(row) for row in coset.lattice.basis], dim=hom.dim_to)
        image = LatticeCoset(reduce_mod(image_lat, hom.apply(coset.offset)), image_lat)
        key = image.sort_key()
        if key not in seen:
            seen.add(key)
            out.append(image)
    return sorted(out, key=lambda c: c.sort_key())


def convolve_poly(nu: Measure, f: TrigPoly) -> TrigPoly:
    """nu * f: coefficients multiply by the transform of nu."""
    if nu.dim != f.dim:
        raise ValueError("dimension mismatch")
    return TrigPoly.of(
        {k: fourier_at(nu, k) * v for k, v in f.coeffs.items()}, dim=f.dim
    )


def empirical_convolver_bound(
    nu: Measure,
    polys: Sequence[TrigPoly],
    chain: OrderChain,
    quad: QuadSpec = QuadSpec(),
) -> float:
    """Largest observed L1 -> L1 ratio of convolution by nu on analytic polynomials."""
    worst = 0.0
    for f in polys:
        require_analytic(f, chain)
        base, _, _ = l1_norm(f, quad)
        if base == 0:
            continue
        out, _, _ = l1_norm(convolve_poly(nu, f), quad)
        worst = max(worst, out / base)
    return worst


def transference_report(
    nu: Measure,
    hom: Homomorphism,
    corpus: Sequence[Measure],
    bound: Optional[float] = None,
    polys: Optional[Sequence[TrigPoly]] = None,
    chain: Optional[OrderChain] = None,
    quad: QuadSpec = QuadSpec(),
    tol: float = 1e-3,
) -> dict:
    """Compare pushforward-convolution ratios against a convolver bound.

    With a caller-supplied bound the comparison is asserted (pass/fail); with
    only an empirical estimate from an analytic polynomial corpus the
    comparison is flagged, never asserted.
    """
    if bound is None:
        if polys is None or chain is None:
            raise ValueError("either a bound or an estimation corpus (polys + chain) is required")
        mode = "empirical"
        bound_value = empirical_convolver_bound(nu, polys, chain, quad)
    else:
        mode = "supplied"
        bound_value = float(bound)
    pushed = pushforward(nu, hom)
    rows = []
    max_ratio = 0.0
    converged = True
    for idx, mu in enumerate(corpus):
        tv_mu = total_variation(mu, quad)
        tv_conv = total_variation(convolve(pushed, mu), quad)
        converged = converged and tv_mu.converged and tv_conv.converged
        ratio = tv_conv.value / tv_mu.value if tv_mu.value > 0 else 0.0
        rows.append({"index": idx, "tv": tv_mu.value, "tv_conv": tv_conv.value, "ratio": ratio})
        max_ratio = max(max_ratio, ratio)
    ok = max_ratio <= bound_value * (1 + tol)
    report = {
        "mode": mode,
        "bound": bound_value,
        "max_ratio": max_ratio,
        "rows": rows,
        "quadrature_converged": converged,
    }
    if mode == "supplied":
        report["pass"] = ok
    else:
        report["within_bound"] = ok
    return report
