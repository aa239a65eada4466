"""Unit tests for orbit simulation and the periodic-component oracle."""
from fractions import Fraction

import pytest

from app.errors import CapExceeded, EmptyInput, OrbitHalted, OutOfRange, PreconditionViolation
from app.iet import Direction, SignedPermutation, as_scalars, build_iet
from app.models import CapsConfig
from app.orbits import (
    clip,
    gaps,
    measure,
    merge_intervals,
    minimal_support_estimate,
    nontrivial_saddle_connections,
    orbit,
    periodic_components_oracle,
    periodic_profile,
    push_forward,
    rigid_partition,
    saddle_connections,
    support_distance,
)


def _ivs(*pairs):
    return [tuple(as_scalars(pair)) for pair in pairs]


# ---------------------------------------------------------------------------
# Interval unions
# ---------------------------------------------------------------------------


def test_merge_touching_and_overlapping():
    assert merge_intervals(_ivs((3, 4), (0, 1), (1, 2), (Fraction(3, 2), 2))) == _ivs((0, 2), (3, 4))


def test_merge_drops_empty():
    assert merge_intervals(_ivs((1, 1))) == []


def test_measure():
    assert measure(_ivs((0, 1), (Fraction(1, 2), 2), (3, 4))) == 3
    with pytest.raises(EmptyInput):
        measure([])


def test_clip_and_gaps():
    assert clip(_ivs((0, 2), (3, 5)), tuple(as_scalars((1, 4)))) == _ivs((1, 2), (3, 4))
    assert gaps(tuple(as_scalars((0, 4))), _ivs((1, 2))) == _ivs((0, 1), (2, 4))
    assert gaps(tuple(as_scalars((0, 1))), _ivs((0, 1))) == []


def test_push_forward(flip_2iet, q2):
    assert push_forward(flip_2iet, [(q2.zero(), q2.one())]) == [(q2.sqrt(2), 1 + q2.sqrt(2))]


# ---------------------------------------------------------------------------
# Orbits
# ---------------------------------------------------------------------------


def test_orbit_single_flip(flip_1iet):
    traced = orbit(flip_1iet, Fraction(1, 3), 4)
    assert traced.points == [Fraction(1, 3), Fraction(2, 3)] * 2 + [Fraction(1, 3)]
    assert not traced.halted
    assert traced.halt_point is None


def test_orbit_two_intervals(flip_2iet, q2):
    half = q2.rational(Fraction(1, 2))
    assert orbit(flip_2iet, half, 3).points == [half, half + q2.sqrt(2)] * 2


def test_orbit_halts_at_singular_point(swap_2iet):
    traced = orbit(swap_2iet, 1, 10)
    assert traced.halted
    assert traced.points == [1]
    assert traced.halt_point == 1


def test_orbit_halts_after_reaching_singular_point(flip_2iet):
    # T(1) = sqrt 2 is a breakpoint
    traced = orbit(flip_2iet, 1, 10)
    assert traced.halted
    assert len(traced.points) == 2


def test_backward_orbit(flip_2iet, q2):
    traced = orbit(flip_2iet, q2.sqrt(2), 3, Direction.BACKWARD)
    assert traced.points == [q2.sqrt(2), 1]
    assert traced.halted


@pytest.mark.parametrize("x", [-1, 5])
def test_orbit_out_of_range(flip_2iet, x):
    with pytest.raises(OutOfRange):
        orbit(flip_2iet, x, 3)


# ---------------------------------------------------------------------------
# Saddle connections
# ---------------------------------------------------------------------------


def test_saddle_connections_single_flip(flip_1iet):
    found = saddle_connections(flip_1iet, 10)
    assert [(c.start, c.side, c.end, c.length) for c in found] == [(0, "+", 1, 1), (1, "-", 0, 1)]
    assert all(c.is_trivial(1) for c in found)


def test_saddle_connections_length_one_survive_zero_cap(flip_1iet):
    assert len(saddle_connections(flip_1iet, 0)) == 2


def test_saddle_connections_flip_2iet(flip_2iet, q2):
    found = saddle_connections(flip_2iet, 10)
    assert len(found) == 4
    nontrivial = nontrivial_saddle_connections(flip_2iet, 10)
    assert [(c.start, c.side, c.end, c.length) for c in nontrivial] == [(1, "-", 1, 2), (2, "-", 1, 2)]
    assert nontrivial[0].itinerary == (q2.sqrt(2), 1, q2.sqrt(2))


def test_rotation_has_only_trivial_connections(rotation_2iet):
    found = saddle_connections(rotation_2iet, 50)
    assert len(found) == 2
    assert all(c.is_trivial(2) for c in found)


# ---------------------------------------------------------------------------
# Rigid partitions
# ---------------------------------------------------------------------------


def test_rigid_partition_depth_zero(flip_2iet, q2):
    assert rigid_partition(flip_2iet, 0).cells == [(0, q2.sqrt(2)), (q2.sqrt(2), 1 + q2.sqrt(2))]


def test_rigid_partition_depth_one(flip_2iet, q2):
    cells = rigid_partition(flip_2iet, 1).cells
    assert cells == [(0, 1), (1, q2.sqrt(2)), (q2.sqrt(2), 1 + q2.sqrt(2))]


def test_rigid_partition_single_interval(flip_1iet):
    assert rigid_partition(flip_1iet, 5).cells == [(0, 1)]


def test_rigid_partition_negative_depth(flip_1iet):
    with pytest.raises(PreconditionViolation):
        rigid_partition(flip_1iet, -1)


# ---------------------------------------------------------------------------
# Periodic components
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("witness", [Fraction(1, 2), Fraction(1, 3)])
def test_profile_single_flip(flip_1iet, witness):
    component = periodic_profile(flip_1iet, witness, 100)
    assert component.support == [(0, 1)]
    assert component.rigid_interval == (0, 1)
    assert component.cycle_length == 1
    assert component.period == 2
    assert component.flipped


def test_profile_flip_2iet(flip_2iet, q2):
    r2 = q2.sqrt(2)
    outer = periodic_profile(flip_2iet, Fraction(1, 2), 100)
    assert outer.support == [(0, 1), (r2, 1 + r2)]
    assert outer.cycle_length == 2
    assert outer.period == 4
    assert outer.flipped

    inner = periodic_profile(flip_2iet, (1 + r2) / 2, 100)
    assert inner.support == [(1, r2)]
    assert inner.period == 2
    assert inner.flipped


def test_profile_of_oriented_periodic_point(swap_2iet):
    component = periodic_profile(swap_2iet, Fraction(1, 2), 100)
    assert component.support == [(0, 2)]
    assert component.period == 2
    assert component.cycle_length == 2
    assert not component.flipped


def test_profile_cap(rotation_2iet):
    with pytest.raises(CapExceeded):
        periodic_profile(rotation_2iet, Fraction(1, 2), 20)


def test_profile_halts(flip_2iet):
    with pytest.raises(OrbitHalted) as info:
        periodic_profile(flip_2iet, 1, 20)
    assert info.value.step == 1


def test_oracle_flip_2iet(flip_2iet, q2):
    components = periodic_components_oracle(flip_2iet, CapsConfig())
    r2 = q2.sqrt(2)
    assert [c.support for c in components] == [[(0, 1), (r2, 1 + r2)], [(1, r2)]]
    assert [c.period for c in components] == [4, 2]


def test_oracle_raises_on_minimal_component(rotation_2iet):
    with pytest.raises(CapExceeded):
        periodic_components_oracle(rotation_2iet, CapsConfig(orbit_cap=50, partition_depth=2))


def test_oracle_skip_aperiodic(rotation_2iet):
    caps = CapsConfig(orbit_cap=50, partition_depth=2)
    assert periodic_components_oracle(rotation_2iet, caps, skip_aperiodic=True) == []


def test_oracle_skip_aperiodic_keeps_searching_after_minimal_gaps(q2):
    T = build_iet([q2.one(), q2.sqrt(2), q2.one()], SignedPermutation.of(2, 1, -3))
    caps = CapsConfig(orbit_cap=50, partition_depth=2)
    components = periodic_components_oracle(T, caps, skip_aperiodic=True)
    assert [c.support for c in components] == [[(1 + q2.sqrt(2), 2 + q2.sqrt(2))]]
    assert [(c.period, c.cycle_length, c.flipped) for c in components] == [(2, 1, True)]


# ---------------------------------------------------------------------------
# Minimal support estimates
# ---------------------------------------------------------------------------


def test_minimal_support_of_rotation_is_everything(rotation_2iet):
    estimate = minimal_support_estimate(rotation_2iet, Fraction(1, 2), 500, depth=2)
    assert estimate.support == [(0, rotation_2iet.total)]
    assert estimate.coverage == pytest.approx(1.0)
    assert estimate.stable


def test_minimal_support_rejects_periodic_points(flip_1iet):
    with pytest.raises(PreconditionViolation):
        minimal_support_estimate(flip_1iet, Fraction(1, 3), 10, depth=1)


def test_minimal_support_halted(flip_2iet):
    with pytest.raises(OrbitHalted):
        minimal_support_estimate(flip_2iet, 1, 10, depth=1)


# ---------------------------------------------------------------------------
# support_distance
# ---------------------------------------------------------------------------


def test_support_distance_is_one_sided():
    small, big = _ivs((0, 1)), _ivs((0, 2))
    assert support_distance(small, big) == 1
    assert support_distance(big, small) == 0


def test_support_distance_sees_interior_gaps():
    assert support_distance(_ivs((0, 1), (2, 3)), _ivs((0, 3))) == Fraction(1, 2)


def test_support_distance_identical():
    X = _ivs((0, 1), (2, 3))
    assert support_distance(X, X) == 0


def test_support_distance_empty():
    with pytest.raises(EmptyInput):
        support_distance([], _ivs((0, 1)))
