import math

import numpy as np
import pytest

from primeends import (
    CapacityProblem,
    RegionSet,
    ball,
    ball_capacity_decay,
    capacity,
    compact_set_independence,
    impression_in_boundary,
    modp_chain_decay,
)
from primeends import examples
from primeends.domain import BoundaryPoint, GridDomain, GridSpec, WeightSpec
from primeends.errors import ExponentOutOfRange, NotDisjoint, PlateOverlap


def annulus_domain(h):
    n = int(round(2.5 / h))
    spec = GridSpec(nx=n + 4, ny=n + 4, h=h, origin=(-1.25 - 2 * h, -1.25 - 2 * h))
    om = np.zeros((spec.ny, spec.nx), dtype=bool)
    om[2:-2, 2:-2] = True
    dom = GridDomain(spec, om, name="annulus_host")
    c = dom.centers
    rr = np.hypot(c[:, 0], c[:, 1])
    return dom, RegionSet(dom, rr <= 0.25), RegionSet(dom, rr >= 1.0)


def test_annulus_against_continuum_oracle():
    dom, E, F = annulus_domain(1 / 64)
    res = capacity(CapacityProblem(dom, E, F, 2.0))
    exact = 2 * math.pi / math.log(4.0)
    assert abs(res.value - exact) / exact < 0.05
    assert 0 <= res.potential.min() and res.potential.max() <= 1.0
    assert (res.potential[E.sel] == 1.0).all()
    assert (res.potential[F.sel] == 0.0).all()


def test_plate_validation(square64):
    E = RegionSet.from_rect(square64, 0.1, 0.4, 0.1, 0.4)
    with pytest.raises(NotDisjoint):
        CapacityProblem(square64, E, E, 2.0)
    with pytest.raises(NotDisjoint):
        CapacityProblem(square64, E, RegionSet.empty(square64), 2.0)
    with pytest.raises(ExponentOutOfRange):
        CapacityProblem(square64, E, RegionSet.from_rect(square64, 0.6, 0.9, 0.6, 0.9), 0.5)


def test_symmetry_and_monotonicity(square64):
    E = RegionSet.from_rect(square64, 0.1, 0.35, 0.1, 0.35)
    E_small = RegionSet.from_rect(square64, 0.15, 0.3, 0.15, 0.3)
    F = RegionSet.from_rect(square64, 0.6, 0.9, 0.6, 0.9)
    v_ef = capacity(CapacityProblem(square64, E, F, 2.0)).value
    v_fe = capacity(CapacityProblem(square64, F, E, 2.0)).value
    assert abs(v_ef - v_fe) / v_ef < 1e-6
    v_small = capacity(CapacityProblem(square64, E_small, F, 2.0)).value
    assert v_small <= v_ef * (1 + 1e-9)


def test_weight_doubling_is_exact(square64):
    E = RegionSet.from_rect(square64, 0.1, 0.3, 0.1, 0.3)
    F = RegionSet.from_rect(square64, 0.7, 0.9, 0.7, 0.9)
    v1 = capacity(CapacityProblem(square64, E, F, 2.0)).value
    spec = square64.spec
    dom2 = GridDomain(spec, square64.open_mask,
                      weight=WeightSpec("const", {"value": 2.0}), name="w2")
    v2 = capacity(CapacityProblem(dom2, RegionSet(dom2, E.sel),
                                  RegionSet(dom2, F.sel), 2.0)).value
    assert v2 == 2 * v1


def test_disconnected_plates_flagged():
    # two open blocks, intentionally unvalidated: the zero potential is
    # admissible so the value is 0 with the empty-family flag
    spec = GridSpec(nx=8, ny=8, h=0.125)
    om = np.zeros((8, 8), dtype=bool)
    om[1:3, 1:3] = True
    om[5:7, 5:7] = True
    dom = GridDomain(spec, om, name="two_blocks", validate=False)
    c = dom.centers
    E = RegionSet(dom, c[:, 0] < 0.5)
    F = RegionSet(dom, c[:, 0] > 0.5)
    res = capacity(CapacityProblem(dom, E, F, 2.0))
    assert res.empty_family
    assert res.value == 0.0


def test_p15_energy_below_p2_scaling(square64):
    # sanity on the IRLS path: the p=1.5 optimum is below the p=1.5
    # energy of the p=2 minimizer
    E = RegionSet.from_rect(square64, 0.1, 0.3, 0.3, 0.7)
    F = RegionSet.from_rect(square64, 0.7, 0.9, 0.3, 0.7)
    from primeends.modulus import _edge_conductances, _energy
    res2 = capacity(CapacityProblem(square64, E, F, 2.0))
    res15 = capacity(CapacityProblem(square64, E, F, 1.5))
    base = _edge_conductances(square64, 1.5)
    assert res15.value <= _energy(square64, res2.potential, 1.5, base) + 1e-9
    assert res15.value > 0


def test_chain_decay_constant_stalls(square64):
    reg = RegionSet.from_rect(square64, 0.1, 0.4, 0.1, 0.4)
    from primeends.ends import DiscreteChain
    chain = DiscreteChain(square64, [(reg, 1 / (k + 2)) for k in range(4)])
    K = RegionSet.from_rect(square64, 0.6, 0.9, 0.6, 0.9)
    verdict = modp_chain_decay(chain, K, 2.0)
    assert verdict.verdict == "stalls"


def test_chain_decay_comb(comb7):
    chain = examples.comb_wide_levels(comb7)
    K = ball(comb7, (0.25, 0.75), 0.1)
    verdict = modp_chain_decay(chain, K, 2.0)
    assert verdict.verdict == "decays"
    assert all(b <= a * 1.05 for a, b in zip(verdict.series, verdict.series[1:]))


def test_chain_decay_overlap_raises(square64):
    reg = RegionSet.from_rect(square64, 0.1, 0.6, 0.1, 0.6)
    from primeends.ends import DiscreteChain
    chain = DiscreteChain(square64, [(reg, 0.5)])
    K = RegionSet.from_rect(square64, 0.5, 0.9, 0.5, 0.9)
    with pytest.raises(PlateOverlap):
        modp_chain_decay(chain, K, 2.0)


def test_ball_capacity_decay_disk(disk64):
    K = ball(disk64, (0.0, 0.0), 0.2)
    verdict = ball_capacity_decay(disk64, BoundaryPoint((1.0, 0.0)), K, 2.0,
                                  radii=[0.4, 0.2, 0.1, 0.0625])
    assert verdict.verdict == "decays"
    assert verdict.series[0] > verdict.series[-1] > 0


def test_impression_certificate(comb7):
    chain = examples.comb_wide_levels(comb7)
    B = ball(comb7, (0.25, 0.75), 0.1)
    cert = impression_in_boundary(chain, B, 2.0)
    assert cert.passed

    # a fat interior "chain" retains deep cells and fails
    from primeends.ends import DiscreteChain
    inner = RegionSet.from_rect(comb7, 0.05, 0.45, 0.05, 0.45)
    inner2 = RegionSet.from_rect(comb7, 0.1, 0.4, 0.1, 0.4)
    bad = DiscreteChain(comb7, [(inner, 0.4), (inner2, 0.3)])
    cert2 = impression_in_boundary(bad, B, 2.0)
    assert not all(cert2.per_delta.values())


def test_compact_set_independence(comb7):
    chain = examples.comb_wide_levels(comb7)
    K0 = ball(comb7, (0.25, 0.75), 0.08)
    K1 = ball(comb7, (0.75, 0.75), 0.08)
    rep = compact_set_independence(chain, K0, K1, 2.0)
    assert rep.agree
    assert rep.max_level_ratio <= 3.0
