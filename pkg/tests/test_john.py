import pytest

from primeends import (
    BoundaryPoint,
    RegionSet,
    ball,
    build_gallery,
    build_ball_chain,
    content_vs_modulus,
    hausdorff_content,
    john_assess,
    john_bounded_connectivity,
    modp_end_is_prime_check,
    prime_end_at,
    uniform_assess,
    validate_ball_chain,
)
from primeends import examples
from primeends.errors import ExponentOutOfRange, NotJohn, RatioViolated
from primeends.john import john_constant, john_curve


def test_square_is_john(square64):
    samples = [(0.1, 0.1), (0.9, 0.1), (0.5, 0.05), (0.05, 0.5)]
    a = john_assess(square64, (0.5, 0.5), samples)
    assert a.verdict == "john"
    assert 1.0 <= a.constant_estimate <= 3.0


def test_slit_disk_is_john(slit100):
    samples = [(-0.5, 0.3), (-0.5, -0.3), (0.0, 0.7), (0.9, 0.0)]
    seq = [(-0.5, 0.2), (-0.5, 0.1), (-0.5, 0.05)]
    a = john_assess(slit100, (0.5, 0.0), samples, feature_sequence=seq)
    assert a.verdict == "john"


def test_cusp_not_john_but_almost():
    cu = build_gallery("cubic_cusp", 1 / 256)
    xs = [x for x in (0.7, 0.58, 0.48, 0.4, 0.33) if x ** 3 / 2 >= 4 * cu.h]
    seq = [(x, x ** 3 / 2) for x in xs]
    a = john_assess(cu, (0.9, 0.3), [(0.85, 0.2)], feature_sequence=seq)
    assert a.verdict == "not_john"
    from primeends import almost_john_assess
    aj = almost_john_assess(cu, (0.9, 0.3), [(0.85, 0.2), (0.7, 0.1)],
                            [0.4, 0.2, 0.1], feature_sequence=seq)
    assert aj.verdict == "almost_john"
    for r, F in aj.removed.items():
        if F is not None:
            est = hausdorff_content(F, 1.0)
            assert est.upper < r * 2.0  # collar content stays small


def test_square_uniform(square64):
    u = uniform_assess(square64, [((0.2, 0.2), (0.8, 0.8)),
                                  ((0.1, 0.9), (0.9, 0.1))])
    assert u.verdict == "uniform"
    assert u.constant_estimate <= 4.0


def test_slit_not_uniform(slit100):
    pairs = [((-0.5, d), (-0.5, -d)) for d in (0.2, 0.1, 0.05)]
    u = uniform_assess(slit100, [((0.3, 0.3), (0.3, -0.3))],
                       divergence_pairs=pairs)
    assert u.verdict == "not_uniform"


def test_ball_chain_invariants(square64):
    c0 = square64.cell_index((0.5, 0.5))
    for target in [(0.5, 0.05), (0.05, 0.05), (0.9, 0.5)]:
        x = square64.cell_index(target)
        C = john_constant(square64, c0, x)
        curve = john_curve(square64, x, c0, C * 1.1)
        rho0 = float(square64.delta[c0]) / 8
        bc = build_ball_chain(square64, c0, rho0, x, curve, C * 1.2)
        checks = validate_ball_chain(square64, bc)
        failed = [c.name for c in checks if not c.passed]
        assert not failed, failed
        counts = bc.per_level_counts()
        assert all(v <= bc.M + 1 for v in counts.values())


def test_trivial_ball_chain(square64):
    c0 = square64.cell_index((0.5, 0.5))
    curve = [c0]
    bc = build_ball_chain(square64, c0, float(square64.delta[c0]) / 8, c0,
                          curve, 2.0)
    checks = validate_ball_chain(square64, bc)
    assert all(c.passed for c in checks)


def test_ball_chain_rejects_bad_curve(square64):
    c0 = square64.cell_index((0.5, 0.5))
    x = square64.cell_index((0.5, 0.05))
    # a detour hugging the boundary violates the claimed tiny ratio
    detour = [x, square64.cell_index((0.05, 0.05)),
              square64.cell_index((0.05, 0.95)), c0]
    with pytest.raises(RatioViolated):
        build_ball_chain(square64, c0, float(square64.delta[c0]) / 8, x,
                         detour, 0.5)


def test_content_segment_strip(square128):
    # a 1 x (thin) strip has 1-content about its length
    strip = RegionSet.from_rect(square128, 0.2, 0.8, 0.4, 0.4 + 3 * square128.h)
    est = hausdorff_content(strip, 1.0)
    assert est.lower >= 0.6 - 2 * square128.h
    assert est.upper <= 0.75
    assert est.lower <= est.upper


def test_content_single_cell(square128):
    one = RegionSet.from_cells(square128, [square128.cell_index((0.5, 0.5))])
    est = hausdorff_content(one, 1.0)
    assert est.upper <= 2 * square128.h
    assert est.lower >= 0.0


def test_content_comb_levels_persist(comb7):
    chain = examples.comb_wide_levels(comb7)
    for k in range(chain.depth):
        est = hausdorff_content(chain.region(k), 1.0)
        assert est.lower >= 0.45


def test_content_exponent_guard(square128):
    reg = RegionSet.from_rect(square128, 0.2, 0.4, 0.2, 0.4)
    with pytest.raises(ValueError):
        hausdorff_content(reg, 0.0)


def test_content_vs_modulus_guard(square64):
    E = RegionSet.from_rect(square64, 0.1, 0.3, 0.1, 0.3)
    B = ball(square64, (0.7, 0.7), 0.1)
    with pytest.raises(ExponentOutOfRange):
        content_vs_modulus(square64, E, B, 0.9)
    rep = content_vs_modulus(square64, E, B, 2.0)
    assert rep.ratio > 0 and not rep.degenerate


def test_bounded_connectivity(slit100):
    samples = [(-0.5, 0.3), (0.0, 0.7)]
    a = john_assess(slit100, (0.5, 0.0), samples)
    pts = [BoundaryPoint((-0.5, 0.0)), BoundaryPoint((0.0, 1.0))]
    rep = john_bounded_connectivity(slit100, a, pts)
    assert rep.observed_max_n == 2
    assert rep.holds


def test_bounded_connectivity_requires_john(square64):
    a = john_assess(square64, (0.5, 0.5), [(0.1, 0.1)])
    a.verdict = "unresolved"
    with pytest.raises(NotJohn):
        john_bounded_connectivity(square64, a, [BoundaryPoint((0.5, 0.0))])


def test_modp_end_is_prime_check(slit100):
    K = ball(slit100, (0.5, 0.7), 0.1)
    rec = prime_end_at(slit100, BoundaryPoint((-0.5, 0.0), side_hint=(0, 1)))
    chk = modp_end_is_prime_check(rec.chain, K, 2.0)
    assert chk.holds and chk.decays and chk.singleton
    collar = examples.slit_collar_levels(slit100)
    chk2 = modp_end_is_prime_check(collar, K, 2.0)
    assert chk2.holds and not chk2.decays
