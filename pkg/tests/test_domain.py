import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from primeends import (
    BoundaryPoint,
    GridDomain,
    GridSpec,
    WeightSpec,
    build_gallery,
    dyadic_ladder,
    estimate_mass_exponents,
)
from primeends.domain import check_boundary_point
from primeends.errors import NotABoundaryPoint, RadiusLadderEmpty


def test_grid_spec_centers():
    spec = GridSpec(nx=4, ny=3, h=0.5, origin=(1.0, 2.0))
    c = spec.centers()
    assert c.shape == (3, 4, 2)
    assert c[0, 0].tolist() == [1.25, 2.25]
    assert c[2, 3].tolist() == [2.75, 3.25]
    assert spec.cell_of((1.3, 2.3)) == (0, 0)


def test_grid_spec_rejects_degenerate():
    with pytest.raises(ValueError):
        GridSpec(nx=1, ny=4, h=0.1)
    with pytest.raises(ValueError):
        GridSpec(nx=4, ny=4, h=0.0)


def test_domain_requires_proper_subset():
    spec = GridSpec(nx=4, ny=4, h=0.25)
    with pytest.raises(ValueError):
        GridDomain(spec, np.ones((4, 4), dtype=bool))


def test_domain_requires_connectivity():
    spec = GridSpec(nx=5, ny=5, h=0.2)
    om = np.zeros((5, 5), dtype=bool)
    om[1, 1] = om[3, 3] = True
    with pytest.raises(ValueError):
        GridDomain(spec, om)


def test_blocked_edge_must_join_open_cells():
    spec = GridSpec(nx=4, ny=4, h=0.25)
    om = np.zeros((4, 4), dtype=bool)
    om[1:3, 1:3] = True
    be = np.zeros((4, 4), dtype=bool)
    be[0, 0] = True  # both closed
    with pytest.raises(ValueError):
        GridDomain(spec, om, blocked_east=be)


def test_measure_positive(square64):
    mu = square64.measures
    assert (mu > 0).all()
    assert abs(square64.total_measure - 1.0) < 1e-9


def test_delta_field_square(square64):
    c = square64.centers
    expected = np.minimum.reduce([c[:, 0], c[:, 1], 1 - c[:, 0], 1 - c[:, 1]])
    assert np.abs(square64.delta - expected).max() <= 0.51 * square64.h


def test_delta_sees_walls(slit100):
    cid = slit100.cell_index((-0.5, 0.3))
    assert abs(slit100.delta[cid] - 0.3) <= slit100.h
    near = slit100.cell_index((-0.5, slit100.h / 2))
    assert slit100.delta[near] <= slit100.h


def test_line_of_sight_blocked_by_slit(slit100):
    assert slit100.line_of_sight((-0.5, 0.3), (-0.3, 0.2))
    assert not slit100.line_of_sight((-0.5, 0.3), (-0.5, -0.3))
    # rounding the tip is clear
    assert slit100.line_of_sight((0.3, 0.1), (0.3, -0.1))


def test_segment_cells_traversal(square64):
    cells, dist = square64.segment_cells((0.1, 0.1), (0.3, 0.1))
    assert len(cells) >= int(0.2 / square64.h)
    assert dist.min() >= 0


def test_weight_families():
    centers = np.array([[0.5, 0.0], [2.0, 0.0], [0.1, 0.0]])
    w = WeightSpec("abs_alpha", {"alpha": 2.0, "center": (0.0, 0.0)})
    assert np.allclose(w.evaluate(centers), [0.25, 4.0, 0.01])
    wl = WeightSpec("log", {"center": (0.0, 0.0)})
    assert np.allclose(wl.evaluate(centers), [1.0, 1.0, math.log(10.0)])


def test_dyadic_ladder_lands_on_floor():
    lad = dyadic_ladder(0.5, 0.03)
    assert lad[0] == 0.5
    assert lad[-1] == 0.03
    assert all(b < a for a, b in zip(lad, lad[1:]))
    with pytest.raises(RadiusLadderEmpty):
        dyadic_ladder(0.01, 0.5)


@settings(max_examples=25, deadline=None)
@given(
    x=st.floats(0.2, 0.8), y=st.floats(0.2, 0.8),
    r1=st.floats(0.02, 0.2), r2=st.floats(0.02, 0.2),
)
def test_ball_monotone(square64, x, y, r1, r2):
    lo, hi = sorted([r1, r2])
    small = square64.cells_within((x, y), lo)
    big = square64.cells_within((x, y), hi)
    assert not (small & ~big).any()


def test_boundary_point_validation(square64):
    check_boundary_point(square64, BoundaryPoint((0.5, 0.0)))
    check_boundary_point(square64, BoundaryPoint((0.0, 0.0)))
    with pytest.raises(NotABoundaryPoint):
        check_boundary_point(square64, BoundaryPoint((0.5, 0.5)))
    with pytest.raises(NotABoundaryPoint):
        check_boundary_point(square64, BoundaryPoint((2.0, 2.0)))


def test_mass_exponent_flat(square128):
    est = estimate_mass_exponents(square128, [(0.5, 0.5)], r_min=8 / 128, r_max=0.25)
    lo, hi = est.pointwise[(0.5, 0.5)]
    assert abs(0.5 * (lo + hi) - 2.0) < 0.1
    assert 0 < est.q_lower <= est.Q_upper


def test_mass_exponent_weighted_center():
    dom = build_gallery("disk", 1 / 128,
                        {"weight": {"kind": "abs_alpha",
                                    "params": {"alpha": 1.0, "center": (0.0, 0.0)}}})
    est = estimate_mass_exponents(dom, [(0.0, 0.0)], r_min=8 / 128, r_max=0.4)
    slope = 0.5 * sum(est.pointwise[(0.0, 0.0)])
    assert abs(slope - 3.0) < 0.15
