import numpy as np
import pytest

from primeends import (
    BoundaryPoint,
    build_gallery,
    end_sequence_converges,
    enumerate_prime_ends_at,
    maz_boundary,
    maz_distance,
    maz_sequential_criterion,
    phi_correspondence,
    prime_end_at,
    psi_project,
)
from primeends import examples
from primeends.errors import NotInDomain, NotSingleton


def test_convex_distance_is_euclidean(square64):
    rng = np.random.default_rng(7)
    for _ in range(40):
        a = rng.uniform(0.05, 0.95, 2)
        b = rng.uniform(0.05, 0.95, 2)
        r = maz_distance(square64, tuple(a), tuple(b))
        ca = square64.centers[square64.cell_index(a)]
        cb = square64.centers[square64.cell_index(b)]
        d = float(np.hypot(*(ca - cb)))
        assert abs(r.value - d) <= 2 * square64.h
        assert r.value >= r.lower_bound - 1e-12


def test_identity_and_symmetry(slit100):
    assert maz_distance(slit100, (-0.5, 0.3), (-0.5, 0.3)).value == 0.0
    a, b = (-0.5, 0.02), (-0.3, 0.4)
    ab = maz_distance(slit100, a, b).value
    ba = maz_distance(slit100, b, a).value
    assert abs(ab - ba) <= 1e-9


def test_triangle_inequality_with_slack(slit100):
    pts = [(-0.5, 0.02), (-0.5, -0.02), (0.5, 0.1), (-0.2, 0.4)]
    d = {}
    for i, p in enumerate(pts):
        for j, q in enumerate(pts):
            if i < j:
                d[i, j] = d[j, i] = maz_distance(slit100, p, q).value
    slack = 4 * slit100.h
    for i in range(4):
        for j in range(4):
            for k in range(4):
                if len({i, j, k}) == 3:
                    assert d[i, j] <= d[i, k] + d[k, j] + slack


def test_slit_crossing_distance(slit100):
    r = maz_distance(slit100, (-0.5, 0.02), (-0.5, -0.02))
    assert r.value >= 0.98
    assert r.value >= float(np.hypot(0, 0.04))
    # witness path rounds the tip
    assert r.polyline[:, 0].max() > -0.05


def test_untrusted_endpoint_rejected():
    comb = build_gallery("topologist_comb", 2.0 ** -8, {"depth": 6})
    with pytest.raises(NotInDomain):
        maz_distance(comb, (0.75, comb.h / 2), (0.25, 0.5))


def test_atlas_slit_disk(slit100):
    atlas = maz_boundary(slit100)
    anchors = atlas.anchors()
    on_slit = (np.abs(anchors[:, 1]) < 1e-9) & (anchors[:, 0] > -0.95) \
        & (anchors[:, 0] < -0.05)
    # both sides of the slit carry their own clusters
    assert on_slit.sum() >= 6
    sides = set()
    for cl in atlas.clusters:
        a = np.asarray(cl.anchor.position)
        if abs(a[1]) < 1e-9 and -0.95 < a[0] < -0.05:
            sides.add(np.sign(cl.anchor.side_hint[1]))
    assert sides == {-1.0, 1.0}
    # a cluster covers the tip region
    tip = min(atlas.clusters,
              key=lambda c: np.hypot(c.anchor.position[0], c.anchor.position[1]))
    assert np.hypot(*tip.anchor.position) <= 2 * atlas.tau
    assert psi_project(atlas, tip.index) is tip.anchor


def test_atlas_comb_rejects_inaccessible_segment():
    comb = build_gallery("topologist_comb", 2.0 ** -8, {"depth": 6})
    atlas = maz_boundary(comb)
    anchors = atlas.anchors()
    bad = (np.abs(anchors[:, 1]) < 1e-9) & (anchors[:, 0] > 0.5 + 1e-9)
    assert bad.sum() == 0
    assert len(atlas.clusters) > 0


def test_phi_bijection_disk(disk64):
    atlas = maz_boundary(disk64)
    records = [prime_end_at(disk64, c.anchor, r_max=atlas.tau)
               for c in atlas.clusters]
    report = phi_correspondence(disk64, records, atlas)
    assert report.bijective
    assert len(report.pairs) == len(atlas.clusters)


def test_phi_separates_slit_sides(slit100):
    atlas = maz_boundary(slit100)
    en = enumerate_prime_ends_at(slit100, BoundaryPoint((-0.5, 0.0)),
                                 radii=[atlas.tau, atlas.tau / 2, atlas.tau / 4])
    report = phi_correspondence(slit100, en.records, atlas)
    assert len(report.pairs) == 2
    c0, c1 = (atlas.clusters[c] for _, c in report.pairs)
    assert c0.index != c1.index
    assert np.sign(c0.anchor.side_hint[1]) != np.sign(c1.anchor.side_hint[1])


def test_sequential_criterion_pins(pins256):
    en = enumerate_prime_ends_at(pins256, BoundaryPoint((0.0, 0.0)),
                                 radii=[0.4, 0.2, 0.1])
    central = examples.pins_central_levels(pins256)
    # order wedge branches by steepness; they approach the central end
    chains = sorted((r.chain for r in en.records),
                    key=lambda c: -c.last_region.min_dist_to((0.3, 0.0)))
    agree_end = end_sequence_converges(chains, central)
    agree_maz = maz_sequential_criterion(chains, central)
    assert agree_end == agree_maz
    assert maz_sequential_criterion([central] * 3, central)


def test_sequential_criterion_rejects_crossing(slit100):
    en = enumerate_prime_ends_at(slit100, BoundaryPoint((-0.5, 0.0)))
    up = next(r for r in en.records if r.tail_cell() is not None
              and slit100.centers[r.tail_cell()][1] > 0)
    dn = next(r for r in en.records if slit100.centers[r.tail_cell()][1] < 0)
    seq = [up.chain] * 4
    assert not maz_sequential_criterion(seq, dn.chain)
    assert not end_sequence_converges(seq, dn.chain)


def test_sequential_criterion_requires_singleton(square128):
    strips = examples.unit_square_bottom_strips(square128, 6)
    with pytest.raises(NotSingleton):
        maz_sequential_criterion([strips], strips)
