import pytest

from primeends import (
    BoundaryPoint,
    RegionSet,
    build_gallery,
    component_tree,
    divides,
    end_in_neighborhood,
    end_sequence_converges,
    enumerate_prime_ends_at,
    equivalent,
    impression,
    is_singleton,
    point_sequence_converges,
    prime_end_at,
    separation_probe,
    validate_chain,
)
from primeends import examples
from primeends.ends import division_report, _record_from_chain
from primeends.errors import InaccessibleError


@pytest.fixture(scope="module")
def strip_chain(square128):
    return examples.unit_square_bottom_strips(square128, 6)


@pytest.fixture(scope="module")
def ball_chain(square128):
    return examples.unit_square_bottom_balls(square128, 12)


def test_validate_strip_chain(strip_chain):
    report = validate_chain(strip_chain)
    assert report.passed, report.first_failure()


def test_validate_flags_zero_separation(square128):
    reg = RegionSet.from_rect(square128, 0.0, 1.0, 0.0, 0.25)
    chain = examples.constant_chain(square128, reg, depth=3)
    report = validate_chain(chain)
    assert not report.passed
    assert report.first_failure().name == "separation"


def test_validate_double_equilateral_levels():
    dom = build_gallery("double_equilateral_comb", 2.0 ** -8, {"depth": 5})
    chain = examples.double_equilateral_comb_levels(dom)
    assert validate_chain(chain).passed
    imp = impression(chain)
    # impression approximates [1/4, 3/4] x {0}
    assert abs(imp.diameter - 0.5) <= 4 * dom.h + 2 ** -5
    assert not is_singleton(chain)


def test_divides_balls_into_strips(strip_chain, ball_chain):
    assert divides(ball_chain, strip_chain)
    assert not divides(strip_chain, ball_chain)


def test_divides_reflexive_and_transitive(strip_chain, ball_chain):
    assert divides(strip_chain, strip_chain)
    sub = strip_chain.subsequence([1, 3, 5])
    assert divides(ball_chain, sub)  # via strips


def test_equivalence_with_subsequence(strip_chain):
    sub = strip_chain.subsequence([0, 2, 4])
    assert equivalent(strip_chain, sub)
    assert equivalent(sub, strip_chain)


def test_division_depth_flag(strip_chain):
    sub = strip_chain.subsequence([0, 2, 4])  # finest scale 1/5
    rep = division_report(sub, strip_chain)
    assert rep.result
    assert rep.undetermined_at_depth  # strip levels finer than 1/5 skipped
    rep2 = division_report(strip_chain, sub)
    assert rep2.result and not rep2.undetermined_at_depth


def test_impression_subset_under_division(strip_chain, ball_chain):
    # the finer end's impression sits inside the coarser one's, up to 2h
    dom = strip_chain.domain
    pts_a = impression(ball_chain).points
    pts_b = impression(strip_chain).points
    from scipy.spatial import cKDTree
    d, _ = cKDTree(pts_b).query(pts_a)
    assert d.max() <= 2 * dom.h + 1e-9


def test_singleton_forces_equivalence(square128, ball_chain):
    # any chain dividing a singleton chain is equivalent to it
    rec = prime_end_at(square128, BoundaryPoint((0.5, 0.0)))
    tiny = rec.chain
    assert is_singleton(tiny)
    assert divides(tiny, tiny)
    deeper = tiny.subsequence(range(1, tiny.depth))
    assert divides(deeper, tiny)
    assert equivalent(deeper, tiny)


def test_prime_end_at_square_corner(square128):
    rec = prime_end_at(square128, BoundaryPoint((0.0, 0.0)))
    assert rec.singleton
    assert validate_chain(rec.chain).passed
    path_pts = rec.accessibility.positions
    assert point_sequence_converges(square128, path_pts, rec.chain)


def test_prime_end_at_comb_inaccessible():
    comb = build_gallery("topologist_comb", 2.0 ** -9, {"depth": 7})
    with pytest.raises(InaccessibleError):
        prime_end_at(comb, BoundaryPoint((0.75, 0.0)))
    rec = prime_end_at(comb, BoundaryPoint((0.5, 0.0)))
    assert rec.singleton


def test_component_tree_square_is_path(square128):
    tree = component_tree(square128, BoundaryPoint((0.5, 0.0)))
    assert all(len(rung) == 1 for rung in tree.rungs)
    assert tree.rungs[1][0].parent is tree.rungs[0][0]


def test_component_tree_slit_two_roots(slit100):
    tree = component_tree(slit100, BoundaryPoint((-0.5, 0.0)))
    finest = tree.leaves_at_finest()
    assert len(finest) == 2
    roots = {id(_root(n)) for n in finest}
    assert len(roots) == 2


def _root(node):
    while node.parent is not None:
        node = node.parent
    return node


def test_enumerate_slit_two_non_equivalent(slit100):
    en = enumerate_prime_ends_at(slit100, BoundaryPoint((-0.5, 0.0)))
    assert en.count == 2 == en.stabilized_n
    a, b = en.records
    assert a.singleton and b.singleton
    assert not equivalent(a.chain, b.chain)


def test_enumerate_disk_unique(disk64):
    en = enumerate_prime_ends_at(disk64, BoundaryPoint((1.0, 0.0)))
    assert en.count == 1
    assert en.records[0].singleton


def test_point_sequence_convergence(square128, strip_chain):
    seq = [(0.5, 2.0 ** -n) for n in range(1, 8)]
    assert point_sequence_converges(square128, seq, strip_chain)
    # a sequence stuck at fixed height leaves the finer levels
    seq2 = [(0.5, 0.4)] * 6
    assert not point_sequence_converges(square128, seq2, strip_chain)


def test_end_sequence_convergence(square128, strip_chain):
    # balls at bottom points marching toward (1/2, 0) converge to the strips
    seq = []
    for x in (0.3, 0.4, 0.45, 0.5):
        rec = prime_end_at(square128, BoundaryPoint((x, 0.0)))
        seq.append(rec.chain)
    assert end_sequence_converges(seq, strip_chain)
    assert end_sequence_converges([strip_chain] * 3, strip_chain)


def test_end_sequence_not_converging(square128):
    top = prime_end_at(square128, BoundaryPoint((0.5, 1.0))).chain
    bottom = prime_end_at(square128, BoundaryPoint((0.5, 0.0))).chain
    assert not end_sequence_converges([top] * 4, bottom)


def test_separation_probe_jana():
    jd = build_gallery("jana_two_limits", 2.0 ** -9, {"depth": 7})
    E = examples.jana_left_levels(jd)
    F = examples.jana_right_levels(jd)
    probe = separation_probe(_record_from_chain(E), _record_from_chain(F))
    assert not probe.separated
    pts = probe.witness_points
    assert point_sequence_converges(jd, pts, E)
    assert point_sequence_converges(jd, pts, F)
    for p, (_, s) in zip(pts, E.levels):
        assert abs(p[0]) <= s + 2 * jd.h


def test_separation_probe_slit(slit100):
    en = enumerate_prime_ends_at(slit100, BoundaryPoint((-0.5, 0.0)))
    probe = separation_probe(*en.records)
    assert probe.separated


def test_end_in_neighborhood(square128, strip_chain):
    G1 = RegionSet.from_rect(square128, 0.0, 1.0, 0.0, 0.3)
    assert end_in_neighborhood(G1, strip_chain)
    assert not end_in_neighborhood(RegionSet.empty(square128), strip_chain)
    # a corner box never swallows a full-width strip level
    G2 = RegionSet.from_rect(square128, 0.0, 2 / 3, 0.0, 2 / 3)
    assert not end_in_neighborhood(G2, strip_chain)
