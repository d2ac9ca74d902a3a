"""Discrete p-capacity of condensers and capacity-decay tests.

The condenser energy is the edge p-Dirichlet form
``sum_e mean_weight(e) * h^2 * (|du|/h)^p`` over unblocked edges, with
the potential clamped to 1 on one plate and 0 on the other.  The p = 2
problem is a single linear solve; other exponents run iteratively
reweighted quadratic steps with annealed smoothing.  p = 1 is served by
a p = 1.01 surrogate (the limit problem loses uniqueness).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import pyamg
from scipy import sparse
from scipy.sparse import csgraph
from scipy.sparse.linalg import cg

from .domain import BoundaryPoint, GridDomain, dyadic_ladder
from .ends import DiscreteChain
from .errors import ExponentOutOfRange, NotDisjoint, PlateOverlap
from .regions import RegionSet, ball

P_ONE_SURROGATE = 1.01
CONDUCTANCE_FLOOR = 1e-12
CG_RTOL = 1e-8
IRLS_TOL = 1e-6
IRLS_MAX_OUTER = 40
IRLS_EPS_FLOOR = 1e-4   # smoothing floor (in units of h); smaller values
                        # make the reweighted systems numerically hopeless
IRLS_STALL_REL = 5e-3   # accept a stalled tail once the floor is reached
AMG_MAXITER = 120


@dataclass
class CapacityProblem:
    domain: GridDomain
    E: RegionSet
    F: RegionSet
    p: float

    def __post_init__(self):
        if not self.E or not self.F:
            raise NotDisjoint("both plates must be nonempty")
        if not self.E.isdisjoint(self.F):
            raise NotDisjoint("plates overlap")
        if self.p < 1:
            raise ExponentOutOfRange("p must be at least 1")


@dataclass
class CapacityResult:
    value: float
    potential: np.ndarray
    residual: float
    iterations: int
    empty_family: bool = False
    p_effective: float = 0.0


def _edge_conductances(domain: GridDomain, p: float) -> np.ndarray:
    u, v = domain.edge_pairs
    w = 0.5 * (domain.weights[u] + domain.weights[v])
    return w * domain.h ** (2.0 - p)


def _graph_laplacian(n: int, u: np.ndarray, v: np.ndarray, q: np.ndarray) -> sparse.csr_matrix:
    rows = np.concatenate([u, v, u, v])
    cols = np.concatenate([v, u, u, v])
    data = np.concatenate([-q, -q, q, q])
    return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))


def _solve_weighted(domain, q, e_sel, f_sel, x0=None, rtol=CG_RTOL):
    """Minimize sum q_e (du_e)^2 with u = 1 on E, 0 on F."""
    n = domain.n_cells
    u_idx, v_idx = domain.edge_pairs
    L = _graph_laplacian(n, u_idx, v_idx, q)
    free = ~(e_sel | f_sel)
    fi = np.nonzero(free)[0]
    u_full = np.zeros(n)
    u_full[e_sel] = 1.0
    if len(fi) == 0:
        return u_full, 0.0, 0
    L_ff = L[fi][:, fi].tocsr()
    rhs = -(L[fi][:, np.nonzero(e_sel)[0]].sum(axis=1)).A1
    x0_f = None if x0 is None else x0[fi]
    it_count = [0]

    def cb(_):
        it_count[0] += 1

    if len(fi) > 20000:
        # multigrid carries the large reweighted systems
        ml = pyamg.ruge_stuben_solver(L_ff)
        x = ml.solve(rhs, x0=x0_f, tol=rtol, accel="cg",
                     maxiter=AMG_MAXITER, callback=cb)
    else:
        diag = L_ff.diagonal()
        diag[diag <= 0] = 1.0
        M = sparse.diags(1.0 / diag)
        x, _ = cg(L_ff, rhs, x0=x0_f, rtol=rtol, atol=0.0, M=M,
                  maxiter=10 * len(fi), callback=cb)
    u_full[fi] = x
    res = float(np.linalg.norm(L_ff @ x - rhs) / max(np.linalg.norm(rhs), 1e-300))
    return u_full, res, it_count[0]


def _energy(domain, u, p, base_q):
    du = np.abs(u[domain.edge_pairs[0]] - u[domain.edge_pairs[1]])
    return float(np.sum(base_q * du ** p))


def capacity(problem: CapacityProblem, tol: float = IRLS_TOL) -> CapacityResult:
    """Condenser capacity with the minimizing potential.

    Disconnected plates are a legal degenerate input: the zero-energy
    potential is admissible, so the value is 0 with an empty-family flag."""
    dom = problem.domain
    p = problem.p if problem.p > 1 else P_ONE_SURROGATE
    e_sel, f_sel = problem.E.sel, problem.F.sel

    # connectivity between the plates decides the empty-family flag
    ncomp, labels = csgraph.connected_components(dom.adjacency, directed=False)
    if ncomp > 1 and not (set(labels[e_sel]) & set(labels[f_sel])):
        u = np.zeros(dom.n_cells)
        u[e_sel] = 1.0
        return CapacityResult(0.0, u, 0.0, 0, empty_family=True, p_effective=p)

    base_q = _edge_conductances(dom, p)
    if abs(p - 2.0) < 1e-12:
        u, res, its = _solve_weighted(dom, base_q, e_sel, f_sel)
        return CapacityResult(_energy(dom, u, p, base_q), u, res, its,
                              p_effective=p)

    # IRLS: quadratic surrogate with annealed smoothing of |du|
    u, _, its = _solve_weighted(dom, base_q, e_sel, f_sel)
    energy = _energy(dom, u, p, base_q)
    eps = 1e-2
    floor = CONDUCTANCE_FLOOR * base_q.max()
    stable = 0
    rel = 1.0
    ui, vi = dom.edge_pairs
    for outer in range(IRLS_MAX_OUTER):
        at_floor = eps <= IRLS_EPS_FLOOR * 1.01
        du = np.abs(u[ui] - u[vi])
        smov = np.sqrt(du * du + eps * eps * dom.h * dom.h)
        q = np.maximum(base_q * smov ** (p - 2.0), floor)
        inner_rtol = CG_RTOL if at_floor else max(CG_RTOL, min(1e-4, 0.05 * rel))
        u_new, res, it2 = _solve_weighted(dom, q, e_sel, f_sel, x0=u,
                                          rtol=inner_rtol)
        its += it2
        if p > 2:
            u_new = 0.5 * (u + u_new)
        e_new = _energy(dom, u_new, p, base_q)
        rel = abs(e_new - energy) / max(abs(energy), 1e-300)
        # every iterate is admissible, so keep the best energy seen
        if e_new <= energy:
            u = u_new
        energy = min(energy, e_new)
        eps = max(eps * 0.1, IRLS_EPS_FLOOR)
        if at_floor and rel < tol:
            stable += 1
            if stable >= 2:
                break
        elif at_floor and rel < IRLS_STALL_REL and outer >= 10:
            break
        else:
            stable = 0
    u = np.clip(u, 0.0, 1.0)
    return CapacityResult(_energy(dom, u, p, base_q), u, rel, its,
                          p_effective=p)


# -- decay verdicts -------------------------------------------------------------


@dataclass
class DecayVerdict:
    verdict: str                  # decays | stalls
    series: list[float]
    scales: list[float]
    fitted_limit: float
    model: str
    tol_zero: float

    @property
    def decays(self) -> bool:
        return self.verdict == "decays"


def _fit_limit(scales: np.ndarray, values: np.ndarray):
    """Fit ``c + a * t`` over decay predictors (power rates, and the
    conformal rate with its scale shift scanned).

    Returns (c_best, model, resid_best, resid_zero): the limit and rms
    residual of the best unconstrained fit, and the rms residual of the
    best fit forced through a zero limit.  A series genuinely heading to
    zero admits a zero-limit fit about as good as the free one."""
    logs = np.log(np.maximum(1.0 / scales, 1e-12))
    preds = {"sqrt_rate": np.sqrt(scales), "linear_rate": scales}
    for b in np.linspace(-1.5, 8.0, 39):
        if np.all(logs + b > 0.2):
            preds[f"log_rate[b={b:.2f}]"] = 1.0 / (logs + b)
    best = (math.inf, float(values[-1]), "none")
    resid_zero = math.inf
    for name, t in preds.items():
        A = np.column_stack([np.ones_like(t), t])
        coef, *_ = np.linalg.lstsq(A, values, rcond=None)
        resid = float(np.sqrt(np.mean((A @ coef - values) ** 2)))
        c = max(0.0, float(coef[0]))
        if resid < best[0]:
            best = (resid, c, name)
        a0 = float(np.dot(t, values) / np.dot(t, t))
        r0 = float(np.sqrt(np.mean((a0 * t - values) ** 2)))
        resid_zero = min(resid_zero, r0)
    return best[1], best[2], best[0], resid_zero


def _no_saturation(scales: np.ndarray, values: np.ndarray) -> bool:
    """A positive series heads to zero across the resolved scales when
    its reciprocal keeps climbing against log(1/scale): every decay rate
    (conformal, power) gives a linear-or-convex reciprocal, while a
    positive limit flattens it.  The test requires a material overall
    drop and a final slope that has not collapsed."""
    if (values <= 0).any():
        return bool((values[-1] <= 0))
    if values[-1] > 0.8 * values[0]:
        return False
    x = np.log(np.maximum(1.0 / scales, 1e-12))
    y = 1.0 / values
    dx = np.diff(x)
    if (dx <= 0).any():
        return False
    m = np.diff(y) / dx
    if (m <= 0).any():
        return False
    return bool(m[-1] >= 0.45 * m.max())


def _decay_verdict(series, scales, tol_zero) -> DecayVerdict:
    v = np.asarray(series, dtype=float)
    s = np.asarray(scales, dtype=float)
    nonincreasing = bool(np.all(v[1:] <= v[:-1] * 1.05 + 1e-300))
    initial = max(v[0], 1e-300)
    if len(v) >= 3:
        fitted, model, _, _ = _fit_limit(s, v)
        zero_plausible = _no_saturation(s, v)
    else:
        fitted, model = float(v[-1]), "none"
        zero_plausible = False
    small = v[-1] <= tol_zero * initial or zero_plausible
    verdict = "decays" if (nonincreasing and small) else "stalls"
    return DecayVerdict(verdict, [float(x) for x in v], [float(x) for x in s],
                        fitted, model, tol_zero)


def modp_chain_decay(
    chain: DiscreteChain,
    K: RegionSet,
    p: float,
    tol_zero: float = 1e-3,
) -> DecayVerdict:
    """Capacity of each chain level against a fixed compact set; decays
    when the series is nonincreasing and its extrapolated limit falls
    below tol_zero of the initial value."""
    dom = chain.domain
    for k in range(chain.depth):
        if not chain.region(k).isdisjoint(K):
            raise PlateOverlap(f"K overlaps chain level {k}")
    series = []
    for k in range(chain.depth):
        res = capacity(CapacityProblem(dom, chain.region(k), K, p))
        series.append(res.value)
    scales = [chain.scale(k) for k in range(chain.depth)]
    return _decay_verdict(series, scales, tol_zero)


def ball_capacity_decay(
    domain: GridDomain,
    point: BoundaryPoint,
    K: RegionSet,
    p: float,
    radii=None,
    tol_zero: float = 1e-3,
) -> DecayVerdict:
    """Capacity of shrinking boundary balls against a fixed compact set."""
    if radii is None:
        radii = dyadic_ladder(min(0.5, domain.diameter / 8), 4 * domain.h)
    radii = sorted((float(r) for r in radii), reverse=True)
    series = []
    for r in radii:
        plate = ball(domain, point.position, r)
        if not plate.isdisjoint(K):
            raise PlateOverlap(f"K overlaps the ball at radius {r}")
        res = capacity(CapacityProblem(domain, plate, K, p))
        series.append(res.value)
    return _decay_verdict(series, radii, tol_zero)


# -- impression certification ----------------------------------------------------


@dataclass
class ImpressionCertificate:
    decayed: bool
    per_delta: dict[float, bool]

    @property
    def passed(self) -> bool:
        return self.decayed and all(self.per_delta.values())


def impression_in_boundary(
    chain: DiscreteChain,
    B: RegionSet,
    p: float,
    q_upper: float = 2.0,
    deltas=None,
) -> ImpressionCertificate:
    """Certify that a capacity-decaying chain leaves no persistent mass
    in the interior: for every collar width delta, the final region must
    not retain cells deeper than delta."""
    if not p > q_upper - 1:
        raise ExponentOutOfRange(f"needs p > {q_upper - 1}")
    dom = chain.domain
    verdict = modp_chain_decay(chain, B, p)
    if deltas is None:
        deltas = [8 * dom.h, 16 * dom.h, 32 * dom.h]
    per = {}
    last = chain.last_region
    for d in deltas:
        deep = last.sel & (dom.delta > d)
        per[float(d)] = not bool(deep.any())
    return ImpressionCertificate(decayed=verdict.decays, per_delta=per)


@dataclass
class AgreementReport:
    verdict0: DecayVerdict
    verdict1: DecayVerdict
    agree: bool
    max_level_ratio: float


def compact_set_independence(
    chain: DiscreteChain,
    K0: RegionSet,
    K1: RegionSet,
    p: float,
) -> AgreementReport:
    """Decay verdicts of one chain against two different compact sets
    must coincide; the per-level value ratio quantifies how close the
    two series run."""
    if not p > 1:
        raise ExponentOutOfRange("independence of the compact set needs p > 1")
    v0 = modp_chain_decay(chain, K0, p)
    v1 = modp_chain_decay(chain, K1, p)
    ratios = [
        max(a, 1e-300) / max(b, 1e-300)
        for a, b in zip(v0.series, v1.series)
    ]
    max_ratio = max(max(r, 1.0 / r) for r in ratios)
    return AgreementReport(v0, v1, v0.verdict == v1.verdict, float(max_ratio))
