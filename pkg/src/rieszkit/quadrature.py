"""Uniform-grid quadrature for trigonometric sums on tori.

Grids are tensor products with a half-cell offset (nodes never sit on the
lattice of cell corners), refined by doubling until the relative change
drops below tolerance or the per-axis cap is reached.  Evaluation goes
through the FFT, which is exact for any grid size: aliasing only folds
frequencies onto equal grid values.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

_DEFAULT_CAPS = {1: 1 << 16, 2: 1 << 10, 3: 160}


@dataclass(frozen=True)
class QuadSpec:
    """Refinement policy: relative tolerance, starting grid, per-axis cap."""

    rel_tol: float = 1e-6
    start: Optional[int] = None
    max_per_axis: Optional[int] = None

    def cap(self, ndim: int) -> int:
        if self.max_per_axis is not None:
            return self.max_per_axis
        return _DEFAULT_CAPS.get(ndim, 64)


def _next_pow2(n: int) -> int:
    p = 1
    while p < n:
        p *= 2
    return p


def grid_values(
    freqs: Sequence[Sequence[int]],
    coeffs: Sequence[complex],
    n: int,
    ndim: int,
    offset: float = 0.5,
) -> np.ndarray:
    """Values of sum_i c_i e^{2 pi i k_i . x} on the offset n^ndim grid.

    Node j has coordinates (j + offset) / n per axis.  Exact up to float
    rounding for every n.
    """
    shape = (n,) * ndim
    c = np.zeros(shape, dtype=complex)
    for k, a in zip(freqs, coeffs):
        twist = cmath.exp(2j * math.pi * (offset * sum(k) / n))
        idx = tuple(int(ki) % n for ki in k)
        c[idx] += a * twist
    return np.fft.ifftn(c) * (n**ndim)


def _grid_l1(freqs, coeffs, n: int, ndim: int) -> float:
    vals = grid_values(freqs, coeffs, n, ndim)
    return float(np.mean(np.abs(vals)))


def l1_of_trig_sum(
    freqs: Sequence[Sequence[int]],
    coeffs: Sequence[complex],
    spec: QuadSpec = QuadSpec(),
) -> tuple[float, float, bool]:
    """Integral of |sum_i c_i e^{2 pi i k_i . x}| over the torus.

    Returns (value, error_estimate, converged).  The error estimate is the
    change across the last doubling; non-convergence at the cap is reported
    through the flag, never silently.
    """
    freqs = [tuple(map(int, k)) for k in freqs]
    coeffs = list(coeffs)
    if not freqs:
        return 0.0, 0.0, True
    ndim = len(freqs[0])
    if ndim == 0:
        return abs(sum(coeffs)), 0.0, True
    if len(freqs) == 1:
        return abs(coeffs[0]), 0.0, True
    span = max(max(abs(k[ax]) for k in freqs) for ax in range(ndim))
    n = spec.start or _next_pow2(max(16, 2 * span + 2))
    cap = max(spec.cap(ndim), n)
    value = _grid_l1(freqs, coeffs, n, ndim)
    err = math.inf
    while n < cap:
        n *= 2
        new = _grid_l1(freqs, coeffs, n, ndim)
        err = abs(new - value)
        value = new
        if err <= spec.rel_tol * max(abs(value), 1e-300) or err < 1e-15:
            return value, err, True
    if err is math.inf:
        err = abs(value)
    return value, err, err <= spec.rel_tol * max(abs(value), 1e-300)


def mean_of_grid(values: np.ndarray) -> float:
    """Rectangle-rule integral over the torus of pre-evaluated grid values."""
    return float(np.mean(values))
