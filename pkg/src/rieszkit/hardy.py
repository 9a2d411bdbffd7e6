"""Trigonometric-polynomial laboratory for the martingale inequalities.

Conditional expectation with respect to a subgroup filtration is a Fourier
coefficient mask; the block differences form a martingale difference
sequence once read from the smallest subgroup up.  The inequality checks
(Jensen, pointwise conditional-expectation bound, Burkholder running-maximum
comparison, Doob, unconditionality of block sums) are evaluated on offset
uniform grids via the FFT.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .lattice import Lattice, cokernel_basis, member
from .order import OrderChain, in_P
from .quadrature import QuadSpec, grid_values, l1_of_trig_sum

JENSEN_LOG_CLIP = -40.0
JENSEN_CLIP_BUDGET = 1e-4


@dataclass(frozen=True)
class TrigPoly:
    """Finite frequency -> coefficient map on Z^dim."""

    dim: int
    coeffs: dict

    @staticmethod
    def of(coeffs: dict, dim: Optional[int] = None) -> "TrigPoly":
        items = {tuple(map(int, k)): complex(v) for k, v in coeffs.items() if v != 0}
        if dim is None:
            if not items:
                raise ValueError("dim is required for the zero polynomial")
            dim = len(next(iter(items)))
        for k in items:
            if len(k) != dim:
                raise ValueError("frequency dimension mismatch")
        return TrigPoly(dim, items)

    def is_zero(self) -> bool:
        return not self.coeffs

    def coefficient(self, freq: Sequence[int]) -> complex:
        return self.coeffs.get(tuple(freq), 0.0 + 0.0j)

    def degree(self) -> int:
        if not self.coeffs:
            return 0
        return max(max(abs(x) for x in k) for k in self.coeffs)

    def __add__(self, other: "TrigPoly") -> "TrigPoly":
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            out[k] = out.get(k, 0.0) + v
        return TrigPoly.of(out, dim=self.dim)

    def __sub__(self, other: "TrigPoly") -> "TrigPoly":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "TrigPoly":
        return TrigPoly.of({k: scalar * v for k, v in self.coeffs.items()}, dim=self.dim)

    def __mul__(self, other: "TrigPoly") -> "TrigPoly":
        out: dict = {}
        for k1, v1 in self.coeffs.items():
            for k2, v2 in other.coeffs.items():
                k = tuple(a + b for a, b in zip(k1, k2))
                out[k] = out.get(k, 0.0) + v1 * v2
        return TrigPoly.of(out, dim=self.dim)

    def conjugate(self) -> "TrigPoly":
        return TrigPoly.of(
            {tuple(-x for x in k): v.conjugate() for k, v in self.coeffs.items()}, dim=self.dim
        )

    def grid(self, n: int, offset: float = 0.5) -> np.ndarray:
        return grid_values(list(self.coeffs), list(self.coeffs.values()), n, self.dim, offset)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "coeffs": [
                {"freq": list(k), "c": [v.real, v.imag]} for k, v in sorted(self.coeffs.items())
            ],
        }

    @staticmethod
    def from_dict(obj: dict) -> "TrigPoly":
        return TrigPoly.of(
            {tuple(e["freq"]): complex(e["c"][0], e["c"][1]) for e in obj["coeffs"]},
            dim=obj["dim"],
        )


def l1_norm(f: TrigPoly, quad: QuadSpec = QuadSpec()) -> tuple[float, float, bool]:
    """(value, error_estimate, converged) for the L1 norm of f."""
    return l1_of_trig_sum(list(f.coeffs), list(f.coeffs.values()), quad)


def require_analytic(f: TrigPoly, chain: OrderChain) -> None:
    """f must have no frequency in (-P) \\ {0}."""
    for k in f.coeffs:
        if any(k) and not in_P(chain, k):
            raise ValueError(f"frequency {k} lies in -P minus 0")


def cond_exp(f: TrigPoly, lat: Lattice) -> TrigPoly:
    """Conditional expectation for the subgroup filtration: keep frequencies in the lattice."""
    kept = {k: v for k, v in f.coeffs.items() if member(lat, k)}
    return TrigPoly(f.dim, kept)


def martingale_blocks(f: TrigPoly, chain: OrderChain) -> list[TrigPoly]:
    """Block differences per stage; blocks plus the mean reconstruct f."""
    if f.dim != chain.dim:
        raise ValueError("dimension mismatch")
    out = []
    for j in range(1, chain.length + 1):
        upper = cond_exp(f, chain.stage_lattice(j))
        lower = cond_exp(f, chain.stage_lattice(j + 1))
        out.append(upper - lower)
    return out


def _grid_size(f: TrigPoly, requested: Optional[int]) -> int:
    n = max(32, 2 * f.degree() + 2)
    p = 1
    while p < n:
        p *= 2
    return max(requested or 0, p)


def _subtorus_average_pow(
    f: TrigPoly,
    lat: Lattice,
    power: float,
    grid_n: int,
    sub_n: int,
) -> np.ndarray:
    """Grid values of (Haar of annihilator(lat)) * |f|^power.

    The convolution is the average of |f|^power over the subtorus through
    each grid point.  f composed with the subtorus chart is a trig polynomial
    on T^{d+m}, so one FFT on the joint grid supplies every sample.
    """
    rows = cokernel_basis(lat)
    m = len(rows)
    if m == 0:
        vals = f.grid(grid_n)
        return np.abs(vals) ** power
    freqs = []
    coeffs = []
    for k, v in f.coeffs.items():
        pairings = tuple(-sum(r * x for r, x in zip(row, k)) for row in rows)
        freqs.append(tuple(k) + pairings)
        coeffs.append(v)
    joint_dim = f.dim + m
    # joint grid: grid_n per x-axis, sub_n per subtorus axis
    shape = (grid_n,) * f.dim + (sub_n,) * m
    c = np.zeros(shape, dtype=complex)
    for k, v in zip(freqs, coeffs):
        phase = 0.5 * (sum(k[: f.dim]) / grid_n + sum(k[f.dim :]) / sub_n)
        idx = tuple(ki % grid_n for ki in k[: f.dim]) + tuple(ki % sub_n for ki in k[f.dim :])
        c[idx] += v * np.exp(2j * math.pi * phase)
    vals = np.fft.ifftn(c) * (grid_n**f.dim) * (sub_n**m)
    mags = np.abs(vals) ** power
    return mags.mean(axis=tuple(range(f.dim, joint_dim)))


def lemma53_check(
    f: TrigPoly,
    lat: Lattice,
    p,
    grid_n: Optional[int] = None,
    sub_n: int = 128,
) -> dict:
    """Pointwise |E f|^p <= E |f|^p on a grid; exact conditional expectations."""
    p = float(p)
    if p not in (0.5, 1.0, 2.0):
        raise ValueError("p must be one of 1/2, 1, 2")
    n = _grid_size(f, grid_n)
    lhs = np.abs(cond_exp(f, lat).grid(n)) ** p
    rhs = _subtorus_average_pow(f, lat, p, n, sub_n)
    violation = float(np.max(lhs - rhs))
    return {
        "pass": violation <= 1e-9,
        "max_violation": violation,
        "grid": n,
        "subtorus_grid": sub_n,
        "p": p,
    }


def jensen_check(f: TrigPoly, chain: OrderChain, quad: QuadSpec = QuadSpec(rel_tol=1e-5)) -> dict:
    """|mean of f| against exp of the mean of log |f|, with singularity clipping.

    Nodes where log|f| falls below the clip threshold are floored; when more
    than a small fraction of nodes clip, the verdict is "inconclusive"
    rather than a pass/fail call.
    """
    require_analytic(f, chain)
    if f.is_zero():
        raise ValueError("f must be nonzero")
    lhs = abs(f.coefficient((0,) * f.dim))
    n = _grid_size(f, quad.start or 256)
    cap = max(quad.cap(f.dim), n)
    prev_mean = None
    clipped_fraction = 0.0
    mean = 0.0
    converged = False
    while True:
        vals = np.log(np.maximum(np.abs(f.grid(n)), 1e-300))
        clipped = vals < JENSEN_LOG_CLIP
        clipped_fraction = float(np.mean(clipped))
        vals = np.where(clipped, JENSEN_LOG_CLIP, vals)
        mean = float(np.mean(vals))
        if prev_mean is not None and abs(mean - prev_mean) <= max(quad.rel_tol, 1e-6):
            converged = True
            break
        if n >= cap:
            break
        prev_mean = mean
        n *= 2
    rhs = math.exp(mean)
    report = {
        "lhs": lhs,
        "rhs": rhs,
        "grid": n,
        "clipped_fraction": clipped_fraction,
        "quadrature_converged": converged,
    }
    if clipped_fraction > JENSEN_CLIP_BUDGET:
        report["verdict"] = "inconclusive"
    else:
        report["verdict"] = "pass" if lhs <= rhs + 1e-3 * max(1.0, rhs) else "fail"
    return report


def _p_norm(vals: np.ndarray, p: float) -> float:
    return float(np.mean(np.abs(vals) ** p) ** (1.0 / p))


def burkholder_scan(
    f: TrigPoly,
    chain: OrderChain,
    p,
    signs: Optional[Sequence[Sequence[int]]] = None,
    grid_n: Optional[int] = None,
) -> dict:
    """Running-maximum comparison between signed and plain block partial sums.

    Partial sums run from the smallest subgroup up (the martingale order).
    Reports the ratio per sign pattern and the maximum over patterns.
    """
    p = float(p)
    if p not in (0.5, 1.0, 2.0):
        raise ValueError("p must be one of 1/2, 1, 2")
    blocks = list(reversed(martingale_blocks(f, chain)))
    k = len(blocks)
    if k > 12:
        raise ValueError("sign enumeration capped at 12 blocks")
    n = _grid_size(f, grid_n)
    block_vals = [b.grid(n) for b in blocks]

    def running_max(eps: Sequence[int]) -> np.ndarray:
        total = np.zeros_like(block_vals[0])
        peak = np.zeros(block_vals[0].shape, dtype=float)
        for e, bv in zip(eps, block_vals):
            total = total + e * bv
            peak = np.maximum(peak, np.abs(total))
        return peak

    rhs = _p_norm(running_max([1] * k), p)
    patterns = [tuple(s) for s in signs] if signs is not None else list(itertools.product((1, -1), repeat=k))
    rows = []
    max_ratio = 0.0
    argmax = None
    for eps in patterns:
        lhs = _p_norm(running_max(eps), p)
        ratio = lhs / rhs if rhs > 0 else 0.0
        rows.append({"signs": list(eps), "lhs": lhs, "ratio": ratio})
        if ratio > max_ratio or argmax is None:
            max_ratio = ratio
            argmax = list(eps)
    return {"p": p, "rhs": rhs, "rows": rows, "max_ratio": max_ratio, "argmax_signs": argmax, "grid": n}


def doob_check(
    f: TrigPoly,
    chain: OrderChain,
    grid_n: Optional[int] = None,
    sub_n: int = 128,
    quad: QuadSpec = QuadSpec(),
) -> dict:
    """Doob bound for the running maximum of conditional expectations of |f|^(1/2)."""
    if f.is_zero():
        raise ValueError("f must be nonzero")
    if f.dim != chain.dim:
        raise ValueError("dimension mismatch")
    n = _grid_size(f, grid_n)
    peak = None
    for j in range(1, chain.length + 1):
        level = _subtorus_average_pow(f, chain.stage_lattice(j), 0.5, n, sub_n)
        peak = level if peak is None else np.maximum(peak, level)
    lhs = float(np.mean(peak**2))
    norm1, err, converged = l1_norm(f, quad)
    rhs = 4.0 * norm1
    return {
        "lhs": lhs,
        "rhs": rhs,
        "l1_norm": norm1,
        "pass": lhs <= rhs * (1 + 1e-6),
        "grid": n,
        "subtorus_grid": sub_n,
        "quadrature_converged": converged,
    }


def h1_unconditionality_scan(
    f: TrigPoly,
    chain: OrderChain,
    quad: QuadSpec = QuadSpec(),
) -> dict:
    """Max over sign/zero patterns of the L1 norm of signed block sums, over ||f||_1."""
    require_analytic(f, chain)
    blocks = martingale_blocks(f, chain)
    k = len(blocks)
    norm_f, _, conv_f = l1_norm(f, quad)
    if norm_f == 0:
        raise ValueError("f must be nonzero")
    rows = []
    max_ratio = 0.0
    argmax = None
    converged = conv_f
    for eps in itertools.product((0, 1, -1), repeat=k):
        combo = TrigPoly(f.dim, {})
        for e, b in zip(eps, blocks):
            if e:
                combo = combo + (float(e) * b)
        val, _, ok = l1_norm(combo, quad)
        converged = converged and ok
        ratio = val / norm_f
        rows.append({"signs": list(eps), "l1": val, "ratio": ratio})
        if ratio > max_ratio or argmax is None:
            max_ratio = ratio
            argmax = list(eps)
    return {
        "max_ratio": max_ratio,
        "argmax_signs": argmax,
        "l1_norm": norm_f,
        "rows": rows,
        "quadrature_converged": converged,
    }


def random_analytic_poly(
    chain: OrderChain,
    rng,
    degree: int = 8,
    terms: int = 6,
    include_mean: bool = True,
) -> TrigPoly:
    """Seeded random polynomial with all frequencies in P, unit-disk coefficients."""
    coeffs: dict = {}
    if include_mean:
        r = math.sqrt(rng.random())
        theta = rng.random()
        coeffs[(0,) * chain.dim] = 1.0 + r * complex(
            math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta)
        )
    attempts = 0
    while len(coeffs) < terms and attempts < 200 * terms:
        attempts += 1
        k = tuple(rng.randint(-degree, degree) for _ in range(chain.dim))
        if not any(k) or not in_P(chain, k):
            continue
        r = math.sqrt(rng.random())
        theta = rng.random()
        coeffs[k] = r * complex(math.cos(2 * math.pi * theta), math.sin(2 * math.pi * theta))
    return TrigPoly.of(coeffs, dim=chain.dim)
