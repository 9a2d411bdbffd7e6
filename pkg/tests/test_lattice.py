import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rieszkit.lattice import (
    EMPTY,
    Lattice,
    LatticeCoset,
    annihilator,
    coset_intersect,
    full_lattice,
    hnf,
    intersect,
    is_saturated,
    kernel,
    member,
    reduce_mod,
    snf_divisors,
    zero_lattice,
)

from conftest import window


def spanned_points(rows, radius=20, coeff=6):
    """Brute-force set of integer combinations of the rows inside a window."""
    dim = len(rows[0])
    pts = set()
    for combo in itertools.product(range(-coeff, coeff + 1), repeat=len(rows)):
        v = tuple(sum(c * r[i] for c, r in zip(combo, rows)) for i in range(dim))
        if all(abs(x) <= radius for x in v):
            pts.add(v)
    return pts


def test_hnf_already_canonical():
    lat = hnf([(0, 1)])
    assert lat.basis == ((0, 1),)
    assert lat.rank == 1


def test_hnf_empty_is_zero_lattice():
    assert hnf([], dim=2) == zero_lattice(2)
    assert zero_lattice(2).rank == 0


def test_hnf_parity_lattice_membership():
    # oracle: enumerate a(2,0)+b(1,1) and compare against member() on a window
    lat = hnf([(2, 0), (1, 1)])
    assert lat.rank == 2
    reachable = spanned_points([(2, 0), (1, 1)], radius=8, coeff=12)
    for v in window(2, 8):
        assert member(lat, v) == (v in reachable)
        assert member(lat, v) == ((v[0] - v[1]) % 2 == 0)


def test_hnf_rejects_ragged_rows():
    with pytest.raises(ValueError):
        hnf([(1, 0), (1, 0, 0)])


def test_member_axis_lattice():
    lat = hnf([(0, 1)])
    assert member(lat, (0, -7))
    assert not member(lat, (1, 0))


def test_member_parity_example():
    lat = hnf([(2, 0), (1, 1)])
    assert member(lat, (3, 5))
    assert not member(lat, (3, 4))


def test_intersect_axis_and_diagonal():
    axis = hnf([(0, 1)])
    diag = hnf([(1, 1)])
    assert intersect(axis, diag) == zero_lattice(2)


def test_intersect_with_full_is_identity():
    lat = hnf([(1, 3), (0, 7)])
    assert intersect(lat, full_lattice(2)) == lat


def test_intersect_two_kernels():
    k1 = kernel([(1, 0, 0)], dim=3)
    k2 = kernel([(0, 1, 0)], dim=3)
    meet = intersect(k1, k2)
    assert meet.basis == ((0, 0, 1),)
    # oracle: windowed enumeration
    for v in window(3, 4):
        assert member(meet, v) == (member(k1, v) and member(k2, v))


def test_coset_intersect_single_point():
    c1 = LatticeCoset.of((1, 0), hnf([(0, 1)]))
    c2 = LatticeCoset.of((1, 0), hnf([(1, 1)]))
    meet = coset_intersect(c1, c2)
    assert meet.lattice.rank == 0
    assert meet.offset == (1, 0)
    # oracle: enumerate both cosets in a window
    pts1 = {v for v in window(2, 8) if c1.contains(v)}
    pts2 = {v for v in window(2, 8) if c2.contains(v)}
    assert pts1 & pts2 == {(1, 0)}


def test_coset_intersect_identity():
    lat = hnf([(1, 2)])
    c = LatticeCoset.of((0, 0), lat)
    assert coset_intersect(c, c) == c


def test_coset_intersect_disjoint_parallel():
    lat = hnf([(0, 1)])
    c1 = LatticeCoset.of((1, 0), lat)
    c2 = LatticeCoset.of((0, 0), lat)
    assert coset_intersect(c1, c2) is EMPTY


def test_annihilator_axis():
    # characters (0, n) annihilate exactly the circle T x {0}
    sub = annihilator(hnf([(0, 1)]))
    assert sub.cobasis == ((1, 0),)
    assert sub.torus_dim == 1
    from fractions import Fraction

    assert sub.contains_point((Fraction(1, 3), Fraction(0)))
    assert not sub.contains_point((Fraction(0), Fraction(1, 3)))


def test_annihilator_extremes():
    assert annihilator(zero_lattice(2)).torus_dim == 2
    assert annihilator(full_lattice(2)).torus_dim == 0


def test_annihilator_roundtrip_and_pairing():
    for rows in [[(0, 1)], [(1, 2)], [(1, 0, 3), (0, 1, 5)]]:
        lat = hnf(rows)
        sub = annihilator(lat)
        assert sub.dual_lattice() == lat
        assert sub.torus_dim + lat.rank == lat.dim
        for b in sub.cobasis:
            for row in lat.basis:
                assert sum(x * y for x, y in zip(b, row)) == 0


def test_annihilator_rejects_unsaturated():
    with pytest.raises(ValueError):
        annihilator(hnf([(2, 0), (1, 1)]))


def test_is_saturated_examples():
    assert not is_saturated(hnf([(2, 0), (1, 1)]))
    assert snf_divisors(hnf([(2, 0), (1, 1)])) == (1, 2)
    assert is_saturated(hnf([(0, 1)]))
    assert is_saturated(full_lattice(2))
    assert is_saturated(zero_lattice(3))


def test_reduce_mod_is_canonical():
    lat = hnf([(1, 2), (0, 5)])
    for v in window(2, 6):
        r = reduce_mod(lat, v)
        assert member(lat, tuple(a - b for a, b in zip(v, r)))
        assert reduce_mod(lat, r) == r


small_vectors = st.lists(
    st.lists(st.integers(-10, 10), min_size=2, max_size=2), min_size=1, max_size=3
)


@settings(max_examples=60, deadline=None)
@given(small_vectors)
def test_hnf_idempotent_and_order_independent(rows):
    lat = hnf(rows, dim=2)
    assert hnf(lat.basis, dim=2) == lat
    assert hnf(list(reversed(rows)), dim=2) == lat


@settings(max_examples=30, deadline=None)
@given(small_vectors)
def test_member_matches_enumeration(rows):
    lat = hnf(rows, dim=2)
    reachable = spanned_points(rows, radius=5, coeff=8)
    for v in window(2, 5):
        if v in reachable:
            assert member(lat, v)
        elif member(lat, v):
            # membership beyond the enumeration budget must still be spanned
            assert v in spanned_points(lat.basis, radius=5, coeff=25)


@settings(max_examples=30, deadline=None)
@given(small_vectors, small_vectors)
def test_intersect_matches_pointwise(rows1, rows2):
    a, b = hnf(rows1, dim=2), hnf(rows2, dim=2)
    meet = intersect(a, b)
    for v in window(2, 5):
        assert member(meet, v) == (member(a, v) and member(b, v))


@settings(max_examples=30, deadline=None)
@given(small_vectors, small_vectors, st.tuples(st.integers(-4, 4), st.integers(-4, 4)),
       st.tuples(st.integers(-4, 4), st.integers(-4, 4)))
def test_coset_intersect_matches_pointwise(rows1, rows2, off1, off2):
    c1 = LatticeCoset.of(off1, hnf(rows1, dim=2))
    c2 = LatticeCoset.of(off2, hnf(rows2, dim=2))
    meet = coset_intersect(c1, c2)
    for v in window(2, 5):
        both = c1.contains(v) and c2.contains(v)
        if meet is EMPTY:
            assert not both
        else:
            assert meet.contains(v) == both


def test_coset_json_roundtrip():
    c = LatticeCoset.of((3, -2), hnf([(1, 4)]))
    again = LatticeCoset.from_dict(c.to_dict())
    assert again == c


def test_lattice_json_enforces_canonical_form():
    loaded = Lattice.from_dict({"dim": 2, "basis": [[2, 0], [1, 1], [1, 1]]})
    assert loaded == hnf([(2, 0), (1, 1)])
