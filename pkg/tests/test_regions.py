import numpy as np

from primeends import (
    BoundaryPoint,
    Inaccessible,
    RegionSet,
    accessibility,
    ball,
    boundary_separation,
    build_gallery,
    component_report,
    components,
    finitely_connected_at,
    relative_boundary,
)

def brute_relative_boundary(dom, sel):
    """Independent adjacency scan used as the oracle."""
    out = np.zeros(dom.n_cells, dtype=bool)
    cid = dom.cell_id
    ij = dom.cells_ij
    for c in np.nonzero(sel)[0]:
        i, j = ij[c]
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ni, nj = i + di, j + dj
            if not (0 <= ni < dom.spec.nx and 0 <= nj < dom.spec.ny):
                continue
            n = cid[nj, ni]
            if n < 0 or sel[n]:
                continue
            if di == 1 and dom.blocked_east[j, i]:
                continue
            if di == -1 and dom.blocked_east[j, i - 1]:
                continue
            if dj == 1 and dom.blocked_north[j, i]:
                continue
            if dj == -1 and dom.blocked_north[j - 1, i]:
                continue
            out[n] = True
    return out


def test_components_whole_domain(square64):
    comps = components(RegionSet.full(square64))
    assert len(comps) == 1
    assert comps[0].size == square64.n_cells


def test_components_empty(square64):
    assert components(RegionSet.empty(square64)) == []


def test_components_split_by_slit(slit100):
    b = ball(slit100, (-0.5, 0.0), 0.2)
    comps = components(b)
    assert len(comps) == 2
    sizes = sorted(c.size for c in comps)
    assert sizes[0] > 0.4 * sizes[1]  # near-symmetric halves


def test_components_partition(slit100):
    b = ball(slit100, (-0.5, 0.0), 0.15)
    comps = components(b)
    union = np.zeros(slit100.n_cells, dtype=bool)
    for c in comps:
        assert c.is_connected()
        assert not (union & c.sel).any()
        union |= c.sel
    assert (union == b.sel).all()


def test_relative_boundary_whole_domain(square64):
    assert relative_boundary(RegionSet.full(square64)).size == 0


def test_relative_boundary_left_half(square64):
    left = RegionSet.from_predicate(square64, lambda x, y: x < 0.5)
    rb = relative_boundary(left)
    oracle = brute_relative_boundary(square64, left.sel)
    assert (rb.sel == oracle).all()
    # one-cell strip just right of x = 1/2
    assert rb.size == 64
    assert np.allclose(rb.centers[:, 0], 0.5 + square64.h / 2)


def test_relative_boundary_respects_walls(comb7):
    strip = RegionSet.from_rect(comb7, 0.0, 1.0, 0.0, 2.0 ** -5)
    region = components(strip)[0]
    rb = relative_boundary(region)
    oracle = brute_relative_boundary(comb7, region.sel)
    assert (rb.sel == oracle).all()


def test_boundary_separation_concentric(square64):
    a = ball(square64, (0.5, 0.5), 0.1)
    b = ball(square64, (0.5, 0.5), 0.2)
    sep = boundary_separation(a, b)
    assert abs(sep - 0.1) <= 2 * square64.h


def test_boundary_separation_self(square64):
    a = ball(square64, (0.5, 0.5), 0.15)
    assert boundary_separation(a, a) == 0.0


def test_boundary_separation_nested_strips(square128):
    # strips (0,1) x (0,1/k): separation 1/k - 1/(k+1)
    for k in (2, 4):
        a = RegionSet.from_predicate(square128, lambda x, y, k=k: y < 1 / (k + 1))
        b = RegionSet.from_predicate(square128, lambda x, y, k=k: y < 1 / k)
        sep = boundary_separation(a, b)
        assert abs(sep - (1 / k - 1 / (k + 1))) <= 2 * square128.h


def test_component_report_square_edge(square64):
    rep = component_report(square64, BoundaryPoint((0.5, 0.0)), 0.25)
    assert rep.N == 1
    assert rep.remainder.size == 0
    assert not rep.remainder_accumulates


def test_component_report_slit_sides(slit100):
    rep = component_report(slit100, BoundaryPoint((-0.5, 0.0)), 0.2)
    assert rep.N == 2
    hinted = component_report(slit100, BoundaryPoint((-0.5, 0.0), side_hint=(0, 1)), 0.2)
    assert hinted.N == 1
    assert (hinted.touching[0].centers[:, 1] > 0).all()


def test_component_report_outward_hint(square64):
    # a hint pointing out of the domain leaves nothing to touch
    rep = component_report(square64, BoundaryPoint((0.0, 0.0), side_hint=(-1.0, -1.0)), 0.1)
    assert rep.N == 0
    assert rep.remainder_accumulates


def test_partition_invariant(slit100):
    rep = component_report(slit100, BoundaryPoint((-0.5, 0.0)), 0.2)
    b = ball(slit100, (-0.5, 0.0), 0.2)
    union = rep.remainder.sel.copy()
    for t in rep.touching:
        union |= t.sel
    assert (union == b.sel).all()


def test_accumulating_pins_verdict():
    dom = build_gallery("accumulating_pins", 2.0 ** -9, {"depth": 7})
    v = finitely_connected_at(dom, BoundaryPoint((0.0, 0.0)))
    assert v.verdict == "not_finitely_connected"
    assert all(n == 1 for n in v.n_series)


def test_pins_n_grows(pins256):
    v = finitely_connected_at(pins256, BoundaryPoint((0.0, 0.0)),
                              radii=[0.4, 0.2, 0.1])
    assert v.verdict == "finitely_connected"
    assert all(b > a for a, b in zip(v.n_series, v.n_series[1:]))
    assert v.n_growing


def test_square_boundary_finitely_connected(square64):
    for p in [(0.5, 0.0), (0.0, 0.0), (1.0, 1.0)]:
        v = finitely_connected_at(square64, BoundaryPoint(p))
        assert v.verdict == "finitely_connected"
        assert v.n_series[-1] == 1


def test_n_nondecreasing_along_descending_ladder(slit100):
    v = finitely_connected_at(slit100, BoundaryPoint((-0.5, 0.0)))
    assert all(b >= a for a, b in zip(v.n_series, v.n_series[1:]))
    assert v.n_series[-1] == 2


def test_accessibility_square(square64):
    wit = accessibility(square64, BoundaryPoint((0.5, 0.0)))
    assert not isinstance(wit, Inaccessible)
    assert wit.validate()
    tail = wit.positions[-1]
    assert np.hypot(tail[0] - 0.5, tail[1]) < 2.5 * square64.h


def test_accessibility_comb():
    comb = build_gallery("topologist_comb", 2.0 ** -9, {"depth": 7})
    assert isinstance(accessibility(comb, BoundaryPoint((0.75, 0.0))), Inaccessible)
    wit = accessibility(comb, BoundaryPoint((0.5, 0.0)))
    assert not isinstance(wit, Inaccessible)
    assert wit.validate()


def test_accessibility_slit_sides(slit100):
    for hint in ((0, 1), (0, -1)):
        wit = accessibility(slit100, BoundaryPoint((-0.5, 0.0), side_hint=hint))
        assert not isinstance(wit, Inaccessible)
        tail = wit.positions[-1]
        assert tail[1] * hint[1] > 0  # ends on the hinted side
