"""Order chains on the dual lattice Z^d.

A chain is built from a list of rational linear functionals: stage j pairs
the subgroup C_j with the functional psi_j, where C_1 = Z^d and
C_{j+1} = C_j intersected with ker psi_j.  The chain must terminate at {0},
which makes the sign-of-first-nonzero-functional rule a total order.  All
comparisons are exact rational arithmetic.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Callable, Iterable, Optional, Sequence

from .lattice import (
    Lattice,
    LatticeCoset,
    full_lattice,
    hnf,
    kernel,
    member,
    zero_lattice,
)


def _as_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x)
    return Fraction(x)


@dataclass(frozen=True)
class LinearFunctional:
    """A nonzero rational linear form on Z^d."""

    weights: tuple[Fraction, ...]

    def __post_init__(self):
        if not any(self.weights):
            raise ValueError("functional must be nonzero")

    @staticmethod
    def of(weights: Sequence) -> "LinearFunctional":
        return LinearFunctional(tuple(_as_fraction(w) for w in weights))

    @property
    def dim(self) -> int:
        return len(self.weights)

    def __call__(self, chi: Sequence[int]) -> Fraction:
        return sum((w * int(c) for w, c in zip(self.weights, chi)), Fraction(0))

    def integer_form(self) -> tuple[int, ...]:
        """The form scaled to integers; only signs matter for the order."""
        scale = lcm(*(w.denominator for w in self.weights))
        return tuple(int(w * scale) for w in self.weights)

    def to_json(self) -> list[str]:
        return [f"{w.numerator}/{w.denominator}" for w in self.weights]


@dataclass(frozen=True)
class OrderChain:
    """Chain data (C_j, psi_j) for j = 1..k, with terminal subgroup {0}."""

    dim: int
    stages: tuple[tuple[Lattice, LinearFunctional], ...]

    @property
    def length(self) -> int:
        return len(self.stages)

    def lattices(self) -> tuple[Lattice, ...]:
        """C_1, ..., C_k, C_{k+1} = {0} (the terminal subgroup)."""
        return tuple(c for c, _ in self.stages) + (zero_lattice(self.dim),)

    def stage_lattice(self, j: int) -> Lattice:
        """C_j for 1 <= j <= k+1 (k+1 addresses the terminal {0})."""
        if not 1 <= j <= self.length + 1:
            raise ValueError(f"stage index {j} out of range")
        return self.lattices()[j - 1]

    def functional(self, j: int) -> LinearFunctional:
        return self.stages[j - 1][1]

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "functionals": [psi.to_json() for _, psi in self.stages],
        }

    @staticmethod
    def from_dict(obj: dict, window_radius: Optional[int] = None) -> "OrderChain":
        ws = [LinearFunctional.of(w) for w in obj["functionals"]]
        return order_from_functionals(obj["dim"], ws, window_radius=window_radius)


def _kernel_within(lat: Lattice, psi: LinearFunctional) -> Lattice:
    """{chi in lat : psi(chi) = 0}, exact and saturated."""
    if lat.rank == 0:
        return lat
    form = psi.integer_form()
    # solve on coordinates of lat: x @ basis in ker(form)
    vals = [sum(f * b for f, b in zip(form, row)) for row in lat.basis]
    coeff_kernel = kernel([vals], dim=lat.rank)
    vecs = [
        [sum(w[i] * lat.basis[i][j] for i in range(lat.rank)) for j in range(lat.dim)]
        for w in coeff_kernel.basis
    ]
    return hnf(vecs, dim=lat.dim)


def order_from_functionals(
    dim: int,
    weights: Iterable,
    window_radius: Optional[int] = None,
) -> OrderChain:
    """Build the chain for a functional list.

    Kernels must strictly decrease and reach {0}; otherwise the induced
    relation is not a total order and a ValueError is raised.  With
    `window_radius` set, a nonzero terminal kernel of rank 1 is tolerated
    when its shortest vector lies outside [-W, W]^d: this admits
    high-denominator rational surrogates for irrational forms, which realize
    the intended order on every window of that size.  The surrogate's true
    kernel is then truncated to {0} in the stored chain.
    """
    ws = [w if isinstance(w, LinearFunctional) else LinearFunctional.of(w) for w in weights]
    if not ws:
        raise ValueError("at least one functional is required")
    for w in ws:
        if w.dim != dim:
            raise ValueError("functional dimension mismatch")
    stages = []
    current = full_lattice(dim)
    for psi in ws:
        nxt = _kernel_within(current, psi)
        if nxt.rank >= current.rank:
            raise ValueError("functional does not cut the chain down; order would not be total")
        stages.append((current, psi))
        current = nxt
    if current.rank > 0:
        if window_radius is None:
            raise ValueError("kernels do not reach {0}; order would not be total")
        if current.rank > 1:
            raise ValueError("surrogate relaxation supports only rank-1 residual kernels")
        shortest = min(max(abs(x) for x in row) for row in current.basis)
        if shortest <= window_radius:
            raise ValueError(
                f"residual kernel vector within window radius {window_radius}; "
                "order would not be total on the window"
            )
    return OrderChain(dim, tuple(stages))


def lexicographic(dim: int) -> OrderChain:
    """The lexicographic order on Z^dim (coordinate functionals in order)."""
    ws = [tuple(Fraction(int(i == j)) for j in range(dim)) for i in range(dim)]
    return order_from_functionals(dim, ws)


def halfline() -> OrderChain:
    """The nonnegative order on Z."""
    return order_from_functionals(1, [(1,)])


def in_P(chain: OrderChain, chi: Sequence[int]) -> bool:
    """chi = 0, or the first nonzero psi_j(chi) along the chain is > 0."""
    if len(chi) != chain.dim:
        raise ValueError("dimension mismatch")
    for _, psi in chain.stages:
        v = psi(chi)
        if v > 0:
            return True
        if v < 0:
            return False
    return True


class BlockPosition(enum.Enum):
    S_PLUS = "S_plus"
    S_MINUS = "S_minus"
    D = "D"
    OUTSIDE = "outside"


def block_membership(chain: OrderChain, j: int, chi: Sequence[int]) -> BlockPosition:
    """Position of chi relative to the block C_j \\ D_j."""
    if not 1 <= j <= chain.length:
        raise ValueError(f"stage index {j} out of range")
    cj, psi = chain.stages[j - 1]
    if not member(cj, chi):
        return BlockPosition.OUTSIDE
    v = psi(chi)
    if v > 0:
        return BlockPosition.S_PLUS
    if v < 0:
        return BlockPosition.S_MINUS
    return BlockPosition.D


class CosetPosition(enum.Enum):
    INSIDE_P = "inside_P"
    INSIDE_MINUS_P = "inside_minus_P"
    MIXED = "mixed"
    ZERO = "zero"


def _lattice_in_kernel(lat: Lattice, psi: LinearFunctional) -> bool:
    return all(psi(row) == 0 for row in lat.basis)


def classify_coset(chain: OrderChain, coset: LatticeCoset) -> CosetPosition:
    """Exact position of a whole coset relative to P.

    Walks the chain to the first stage that does not vanish identically on
    the coset: if the lattice sits inside the kernel there, the constant sign
    of psi_j(offset) decides every element at once; otherwise the coset meets
    both P \\ {0} and (-P) \\ {0}.
    """
    if coset.dim != chain.dim:
        raise ValueError("dimension mismatch")
    for cj, psi in chain.stages:
        lat_in_ker = _lattice_in_kernel(coset.lattice, psi)
        v = psi(coset.offset)
        if lat_in_ker and v == 0:
            continue
        if lat_in_ker:
            return CosetPosition.INSIDE_P if v > 0 else CosetPosition.INSIDE_MINUS_P
        return CosetPosition.MIXED
    return CosetPosition.ZERO


@dataclass(frozen=True)
class AxiomReport:
    passed: bool
    axiom: Optional[str] = None
    counterexample: Optional[tuple] = None

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "axiom": self.axiom,
            "counterexample": list(map(list, self.counterexample)) if self.counterexample else None,
        }


def _window_points(dim: int, radius: int) -> list[tuple[int, ...]]:
    pts = list(itertools.product(range(-radius, radius + 1), repeat=dim))
    pts.sort(key=lambda p: (sum(abs(x) for x in p), p))
    return pts


def validate_axioms(
    order,
    window_radius: int,
    dim: Optional[int] = None,
) -> AxiomReport:
    """Exhaustively check the order axioms on the window [-N, N]^d.

    `order` is an OrderChain or a bare membership predicate (with `dim`
    supplied).  Closure under addition is checked for sums that stay in the
    window.  Points and pairs are scanned by increasing l1 size so the
    reported counterexample is deterministic.
    """
    if window_radius < 1:
        raise ValueError("window_radius must be >= 1")
    if isinstance(order, OrderChain):
        dim = order.dim
        pred: Callable[[tuple[int, ...]], bool] = lambda chi: in_P(order, chi)
    else:
        if dim is None:
            raise ValueError("dim is required for a bare predicate")
        pred = order
    pts = _window_points(dim, window_radius)
    zero = (0,) * dim
    membership = {p: pred(p) for p in pts}
    positives = [p for p in pts if membership[p]]
    for p, q in itertools.combinations_with_replacement(positives, 2):
        s = tuple(a + b for a, b in zip(p, q))
        if max(abs(x) for x in s) > window_radius:
            continue
        if not membership[s]:
            return AxiomReport(False, "P + P inside P", (p, q, s))
    for p in pts:
        neg = tuple(-x for x in p)
        if not membership[p] and not membership[neg]:
            return AxiomReport(False, "P or -P covers the window", (p,))
        if p != zero and membership[p] and membership[neg]:
            return AxiomReport(False, "P and -P meet only at 0", (p,))
    return AxiomReport(True)
