"""John / uniform / almost-John classification and content estimates.

The center condition is assessed by a parametric search: a constant C
is feasible for a sample x when some curve from x to the center keeps
its running arclength below C times the clearance, which reduces to a
pruned-reachability fixpoint on the grid graph.  Curve searches give
one-sided evidence; a diverging constant along a feature-approaching
sample sequence is required before a domain is called not John.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .domain import GridDomain
from .errors import NotJohn, RatioViolated
from .regions import RegionSet, ball
from . import regions as _regions
from .modulus import CapacityProblem, capacity

JOHN_CAP = 1e3
DIVERGENCE_GROWTH_TOTAL = 2.5  # overall growth along a feature approach
DIVERGENCE_GROWTH_TAIL = 1.15  # and the growth must not have saturated
LAMBDA_DEFAULT = 1.0


def _diverging(seq: list[float], cap: float) -> bool:
    """Monotone constants that keep growing (or blow past the cap) along
    a feature-approaching sequence; a constant that saturates reads as a
    plain John constant."""
    if len(seq) < 3:
        return bool(seq) and not math.isfinite(seq[-1])
    finite = [v for v in seq if math.isfinite(v)]
    if len(finite) < len(seq):
        return all(b >= a * 0.99 for a, b in zip(finite, finite[1:]))
    monotone = all(b >= a * 0.99 for a, b in zip(seq, seq[1:]))
    total = seq[-1] / max(seq[0], 1e-300)
    tail = seq[-1] / max(seq[-3], 1e-300)
    return monotone and (seq[-1] >= cap or
                         (total >= DIVERGENCE_GROWTH_TOTAL
                          and tail >= DIVERGENCE_GROWTH_TAIL))
C_MU_DEFAULT = 4.0
L_DEFAULT = 2.0


def _masked_graph(domain: GridDomain, mask: np.ndarray):
    ids = np.nonzero(mask)[0]
    g = domain.octile
    coo = g.tocoo()
    keep = mask[coo.row] & mask[coo.col]
    lut = np.full(domain.n_cells, -1, dtype=np.int64)
    lut[ids] = np.arange(len(ids))
    sub = sparse.csr_matrix(
        (coo.data[keep], (lut[coo.row[keep]], lut[coo.col[keep]])),
        shape=(len(ids), len(ids)))
    return sub, ids, lut


def _john_feasible(domain: GridDomain, x: int, x0: int, C: float,
                   slack: float) -> np.ndarray | None:
    """Distances from x on the largest subgraph where the running
    arclength obeys the John inequality; None when the center drops out."""
    mask = np.ones(domain.n_cells, dtype=bool)
    budget = C * domain.delta + slack
    for _ in range(24):
        if not (mask[x] and mask[x0]):
            return None
        g, ids, lut = _masked_graph(domain, mask)
        dist = csgraph.dijkstra(g, directed=False, indices=int(lut[x]))
        full = np.full(domain.n_cells, np.inf)
        full[ids] = dist
        new_mask = mask & (full <= budget)
        if not np.isfinite(full[x0]) or not new_mask[x0]:
            return None
        if new_mask.sum() == mask.sum():
            return full
        mask = new_mask
    return full if np.isfinite(full[x0]) else None


def john_constant(domain: GridDomain, x0: int, x: int,
                  cap: float = JOHN_CAP) -> float:
    """Smallest feasible John ratio for one sample, by bisection
    (infinity when even the cap fails)."""
    if x == x0:
        return 1.0
    slack = domain.h
    lo, hi = 1.0, cap
    if _john_feasible(domain, x, x0, hi, slack) is None:
        return math.inf
    if _john_feasible(domain, x, x0, lo, slack) is not None:
        return lo
    for _ in range(20):
        mid = math.sqrt(lo * hi)
        if _john_feasible(domain, x, x0, mid, slack) is not None:
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.05:
            break
    return hi


@dataclass
class JohnAssessment:
    center: int
    constant_estimate: float
    per_sample: dict[int, float]
    worst_sample: int | None
    verdict: str  # john | not_john | unresolved
    divergence_sequence: list[float] = field(default_factory=list)


def john_assess(
    domain: GridDomain,
    x0,
    samples,
    feature_sequence=None,
    cap: float = JOHN_CAP,
) -> JohnAssessment:
    """Estimate the center constant over samples; declare not John only
    when the constants blow up monotonically along a feature-approaching
    sequence."""
    c0 = domain.cell_index(x0) if not isinstance(x0, (int, np.integer)) else int(x0)
    ids = [domain.cell_index(s) if not isinstance(s, (int, np.integer)) else int(s)
           for s in samples]
    per = {i: john_constant(domain, c0, i, cap) for i in ids}
    finite = {i: v for i, v in per.items() if math.isfinite(v)}
    worst = max(per, key=lambda i: per[i]) if per else None

    seq_consts: list[float] = []
    if feature_sequence is not None:
        seq_ids = [domain.cell_index(s) if not isinstance(s, (int, np.integer)) else int(s)
                   for s in feature_sequence]
        seq_consts = [john_constant(domain, c0, i, cap) for i in seq_ids]

    diverging = _diverging(seq_consts, cap)
    if len(finite) == len(per) and not diverging:
        verdict = "john"
        estimate = max(list(per.values()) + [c for c in seq_consts]) if per else 1.0
    elif diverging:
        verdict = "not_john"
        estimate = max(finite.values()) if finite else math.inf
    else:
        verdict = "unresolved"
        estimate = max(finite.values()) if finite else math.inf
    return JohnAssessment(center=c0, constant_estimate=float(estimate),
                          per_sample=per, worst_sample=worst, verdict=verdict,
                          divergence_sequence=seq_consts)


# -- uniform condition ----------------------------------------------------------


def uniform_constant(domain: GridDomain, x: int, y: int,
                     cap: float = JOHN_CAP) -> float:
    """Smallest feasible two-sided (cigar) constant for one pair."""
    if x == y:
        return 1.0
    px, py = domain.centers[x], domain.centers[y]
    d = float(np.hypot(*(px - py)))
    slack = domain.h

    def feasible(C):
        mask = np.ones(domain.n_cells, dtype=bool)
        budget = C * domain.delta + slack
        for _ in range(24):
            if not (mask[x] and mask[y]):
                return False
            g, ids, lut = _masked_graph(domain, mask)
            dist = csgraph.dijkstra(g, directed=False,
                                    indices=[int(lut[x]), int(lut[y])])
            fx = np.full(domain.n_cells, np.inf)
            fy = np.full(domain.n_cells, np.inf)
            fx[ids] = dist[0]
            fy[ids] = dist[1]
            new_mask = mask & (np.minimum(fx, fy) <= budget)
            if not (new_mask[x] and new_mask[y]):
                return False
            length = fx[y]
            if not math.isfinite(length):
                return False
            if new_mask.sum() == mask.sum():
                return length <= C * d + slack
            mask = new_mask
        return False

    lo, hi = 1.0, cap
    if not feasible(hi):
        return math.inf
    if feasible(lo):
        return lo
    for _ in range(20):
        mid = math.sqrt(lo * hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
        if hi / lo < 1.05:
            break
    return hi


@dataclass
class UniformAssessment:
    constant_estimate: float
    per_pair: list[float]
    verdict: str
    divergence_sequence: list[float] = field(default_factory=list)


def uniform_assess(
    domain: GridDomain,
    pairs,
    divergence_pairs=None,
    cap: float = JOHN_CAP,
) -> UniformAssessment:
    def cell(p):
        return p if isinstance(p, (int, np.integer)) else domain.cell_index(p)

    consts = [uniform_constant(domain, cell(a), cell(b), cap) for a, b in pairs]
    seq = []
    if divergence_pairs is not None:
        seq = [uniform_constant(domain, cell(a), cell(b), cap)
               for a, b in divergence_pairs]
    diverging = _diverging(seq, cap)
    if all(math.isfinite(c) for c in consts) and not diverging:
        verdict = "uniform"
    elif diverging:
        verdict = "not_uniform"
    else:
        verdict = "unresolved"
    finite = [c for c in consts if math.isfinite(c)]
    return UniformAssessment(
        constant_estimate=float(max(finite)) if finite else math.inf,
        per_pair=consts, verdict=verdict, divergence_sequence=seq)


# -- chains of balls -------------------------------------------------------------


@dataclass
class BallChain:
    balls: list[tuple[np.ndarray, float, int, int]]  # (center, radius, level, index)
    target: int
    M: float
    lam: float

    def per_level_counts(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for _, _, i, _ in self.balls:
            out[i] = out.get(i, 0) + 1
        return out


def john_curve(domain: GridDomain, x: int, x0: int, C: float) -> list[int]:
    """A curve realizing (up to slack) the assessed John ratio, as cell ids
    from x to x0."""
    full = _john_feasible(domain, x, x0, C, domain.h)
    if full is None:
        raise RatioViolated(f"no curve with ratio {C}")
    mask = np.isfinite(full)
    g, ids, lut = _masked_graph(domain, mask)
    dist, pred = csgraph.dijkstra(g, directed=False, indices=int(lut[x]),
                                  return_predecessors=True)
    chain = [int(lut[x0])]
    while chain[-1] != lut[x]:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    return [int(ids[c]) for c in chain]


def build_ball_chain(
    domain: GridDomain,
    x0: int,
    rho0: float,
    x: int,
    curve: list[int],
    C_omega: float,
    lam: float = LAMBDA_DEFAULT,
) -> BallChain:
    """March balls along the curve from the center ball toward the
    target, halving radii per level; the chain constant is M = 2A with
    A = C_omega * delta(x0) / rho0."""
    delta0 = float(domain.delta[x0])
    if rho0 > delta0 / (4 * lam) + 1e-12:
        raise RatioViolated("rho0 must not exceed delta(x0) / (4 lambda)")
    pts = domain.centers[np.asarray(curve)]
    seg = np.hypot(*np.diff(pts, axis=0).T)
    arc = np.concatenate([[0.0], np.cumsum(seg)])  # arclength from x
    # verify the supplied curve obeys the John inequality
    ratios = arc[1:] / np.maximum(domain.delta[np.asarray(curve)][1:], 1e-300)
    if ratios.size and ratios.max() > C_omega * (1 + 2 * domain.h / max(rho0, domain.h)) + 2:
        raise RatioViolated(f"curve ratio {ratios.max():.2f} exceeds {C_omega:.2f}")
    A = C_omega * delta0 / rho0
    M = 2 * A
    x_pt = domain.centers[x]
    delta_x = float(domain.delta[x])
    h = domain.h
    # terminal level: radii stop halving once they obey the near-target
    # clearance rule or hit the grid floor
    floor = max(2 * h, delta_x / (8 * lam * C_omega))
    i_x = 0
    while rho0 * 2.0 ** (-i_x) > floor and i_x < 60:
        i_x += 1

    def point_at(c):
        idx = int(np.clip(np.searchsorted(arc, c), 0, len(pts) - 1))
        return pts[idx].copy()

    balls: list[tuple[np.ndarray, float, int, int]] = []
    center = domain.centers[x0].copy()
    rho = rho0
    level, j = 0, 0
    c_prev = float(arc[-1])
    balls.append((center.copy(), rho, level, j))
    guard = 0
    while guard < 10000:
        guard += 1
        d_curve = np.hypot(pts[:, 0] - center[0], pts[:, 1] - center[1])
        inside = d_curve < rho
        c_entry = float(arc[int(np.argmax(inside))]) if inside.any() else c_prev
        # entry point with guaranteed progress of half a radius per step
        c_target = min(c_entry, c_prev - 0.5 * rho)
        if level < i_x:
            if c_target >= 4 * lam * C_omega * rho:
                j += 1
                center = point_at(c_target)
                c_prev = c_target
            else:
                level += 1
                j = 0
                rho = rho0 * 2.0 ** (-level)
                center = point_at(max(c_target, 0.0))
                c_prev = max(c_target, 0.0)
        elif level == i_x and c_target > 0:
            j += 1
            center = point_at(c_target)
            c_prev = c_target
        else:
            break
        balls.append((center.copy(), rho, level, j))

    # tail balls centered at the target, halving twice more
    for step in (1, 2):
        balls.append((x_pt.copy(), rho0 * 2.0 ** (-i_x - step), i_x + step, 0))
    return BallChain(balls=balls, target=x, M=M, lam=lam)


@dataclass
class BallChainCheck:
    name: str
    passed: bool
    detail: str = ""


def validate_ball_chain(domain: GridDomain, chain: BallChain) -> list[BallChainCheck]:
    """The five chain-of-balls conditions, each checked by direct scan."""
    checks = []
    h = domain.h
    x_pt = domain.centers[chain.target]
    centers = np.array([b[0] for b in chain.balls])
    radii = np.array([b[1] for b in chain.balls])
    levels = np.array([b[2] for b in chain.balls])

    # (i) 3 lambda B inside the domain (clearance test with grid slack)
    deltas = np.array([domain.dist_to_boundary(c) for c in centers])
    ok = bool(np.all(deltas >= 3 * chain.lam * radii - 1.5 * h))
    checks.append(BallChainCheck("dilated_balls_inside", ok))

    # (ii) centers within M * rho_i of the target
    d = np.hypot(centers[:, 0] - x_pt[0], centers[:, 1] - x_pt[1])
    ok = bool(np.all(d <= chain.M * radii + 2 * h))
    checks.append(BallChainCheck("centers_near_target", ok))

    # (iii) per-level counts at most M
    counts = chain.per_level_counts()
    ok = all(c <= chain.M + 1 for c in counts.values())
    checks.append(BallChainCheck("level_counts_bounded", ok))

    # (iv) tail balls centered at the target
    tail = levels >= levels.max() - 1
    ok = bool(np.all(np.hypot(centers[tail, 0] - x_pt[0],
                              centers[tail, 1] - x_pt[1]) <= 2 * h))
    checks.append(BallChainCheck("tail_at_target", ok))

    # (v) lexicographic neighbors intersect
    ok = True
    for (c1, r1, *_), (c2, r2, *_) in zip(chain.balls, chain.balls[1:]):
        if np.hypot(*(np.asarray(c1) - np.asarray(c2))) >= r1 + r2 + 1e-12:
            ok = False
            break
    checks.append(BallChainCheck("neighbors_intersect", ok))
    return checks


# -- Hausdorff content ------------------------------------------------------------


@dataclass
class ContentEstimate:
    upper: float
    lower: float

    def __post_init__(self):
        if self.lower > self.upper + 1e-9:
            raise ValueError("content lower bound exceeds the upper bound")


def hausdorff_content(region: RegionSet, s: float = 1.0) -> ContentEstimate:
    """Content with the sum-of-diameters convention.

    Upper bound: best greedy net cover over a dyadic scale ladder.
    Lower bound: for s <= 1, connected sets give diam^s, and s = 1 adds
    the axis projections of the cell set."""
    if s <= 0:
        raise ValueError("content exponent must be positive")
    dom = region.domain
    pts = region.centers
    if len(pts) == 0:
        return ContentEstimate(0.0, 0.0)
    cell_diag = dom.h * math.sqrt(2.0)
    diam = region.diameter() + cell_diag

    best = diam ** s  # single-ball cover
    scale = diam / 2
    while scale >= dom.h:
        cost = _net_cover_cost(pts, scale, cell_diag, s)
        best = min(best, cost)
        scale /= 2
    upper = best

    lower = 0.0
    if s <= 1.0 and region.is_connected():
        lower = max(lower, max(region.diameter() - cell_diag, 0.0) ** s)
    if abs(s - 1.0) < 1e-12:
        proj_x = pts[:, 0].max() - pts[:, 0].min()
        proj_y = pts[:, 1].max() - pts[:, 1].min()
        lower = max(lower, proj_x, proj_y)
    lower = min(lower, upper)
    return ContentEstimate(upper=float(upper), lower=float(lower))


def _net_cover_cost(pts: np.ndarray, scale: float, cell_diag: float, s: float) -> float:
    """Greedy net: absorb everything within ``scale`` of the first
    uncovered point, in index order."""
    remaining = np.ones(len(pts), dtype=bool)
    cost = 0.0
    while remaining.any():
        i = int(np.argmax(remaining))
        d = np.hypot(pts[:, 0] - pts[i, 0], pts[:, 1] - pts[i, 1])
        near = remaining & (d <= scale)
        sub = pts[near]
        ext = float(np.hypot(sub[:, 0].max() - sub[:, 0].min(),
                             sub[:, 1].max() - sub[:, 1].min()))
        cost += (ext + cell_diag) ** s
        remaining &= ~near
    return cost


# -- content against modulus -------------------------------------------------------


@dataclass
class RatioReport:
    content: ContentEstimate
    capacity_value: float
    ratio: float
    degenerate: bool


def content_vs_modulus(
    domain: GridDomain,
    E: RegionSet,
    B: RegionSet,
    p: float,
    q_upper: float = 2.0,
) -> RatioReport:
    """Ratio of 1-content (lower bound) to condenser capacity."""
    from .errors import ExponentOutOfRange
    if not p > q_upper - 1:
        raise ExponentOutOfRange(f"needs p > {q_upper - 1}")
    content = hausdorff_content(E, 1.0)
    cap = capacity(CapacityProblem(domain, E, B, p)).value
    degenerate = content.lower <= 0 or cap <= 0
    ratio = content.lower / cap if cap > 0 else math.inf
    return RatioReport(content=content, capacity_value=cap, ratio=float(ratio),
                       degenerate=degenerate)


# -- bounded connectivity and singleton checks ---------------------------------------


@dataclass
class ConnectivityBound:
    observed_max_n: int
    theoretical_cap: int
    holds: bool
    per_point: list[int]


def john_bounded_connectivity(
    domain: GridDomain,
    assessment: JohnAssessment,
    boundary_points,
    c_mu: float = C_MU_DEFAULT,
    L: float = L_DEFAULT,
) -> ConnectivityBound:
    """Observed stabilized N against the worst-case cap computed from
    the configured doubling / quasiconvexity / center constants."""
    if assessment.verdict != "john":
        raise NotJohn("connectivity bound applies to John verdicts only")
    c_omega = max(assessment.constant_estimate, 1.0)
    cap = int(c_mu ** 2 * (3 * L * c_omega) ** math.log2(c_mu))
    ns = []
    for pt in boundary_points:
        verdict = _regions.finitely_connected_at(domain, pt)
        ns.append(_regions.stabilized_n(verdict))
    observed = max(ns) if ns else 0
    return ConnectivityBound(observed_max_n=observed, theoretical_cap=cap,
                             holds=observed <= cap, per_point=ns)


@dataclass
class SingletonCheck:
    decays: bool
    singleton: bool
    holds: bool


def modp_end_is_prime_check(
    chain,
    K: RegionSet,
    p: float,
    q_upper: float = 2.0,
    singleton_tol: float | None = None,
) -> SingletonCheck:
    """Capacity decay must force a singleton impression at depth."""
    from .errors import ExponentOutOfRange
    from .ends import is_singleton
    from .modulus import modp_chain_decay
    if not p > q_upper - 1:
        raise ExponentOutOfRange(f"needs p > {q_upper - 1}")
    verdict = modp_chain_decay(chain, K, p)
    single = is_singleton(chain, singleton_tol)
    return SingletonCheck(decays=verdict.decays, singleton=single,
                          holds=(not verdict.decays) or single)


# -- almost John ------------------------------------------------------------------


@dataclass
class AlmostJohnAssessment:
    verdict: str  # almost_john | unresolved
    removed: dict[float, RegionSet | None]
    base: JohnAssessment


def almost_john_assess(
    domain: GridDomain,
    x0,
    samples,
    r_ladder,
    feature_sequence=None,
) -> AlmostJohnAssessment:
    """For each r, remove a collar of small 1-content around the
    divergence feature and re-assess; almost John when every tested r
    admits such a removal.  The collar proposal is a heuristic: failure
    leaves the verdict unresolved rather than negative."""
    base = john_assess(domain, x0, samples, feature_sequence)
    removed: dict[float, RegionSet | None] = {}
    if base.verdict == "john":
        for r in r_ladder:
            removed[float(r)] = None
        return AlmostJohnAssessment("almost_john", removed, base)

    bad = [i for i, v in base.per_sample.items() if not math.isfinite(v)]
    if feature_sequence is not None:
        seq_ids = [domain.cell_index(s) if not isinstance(s, (int, np.integer)) else int(s)
                   for s in feature_sequence]
        finite_seq = [v for v in base.divergence_sequence if math.isfinite(v)]
        worst = max(finite_seq) if finite_seq else math.inf
        bad.extend(i for i, v in zip(seq_ids, base.divergence_sequence)
                   if not math.isfinite(v) or v >= 0.5 * worst)
    if not bad:
        return AlmostJohnAssessment("unresolved", removed, base)
    feat = domain.centers[np.asarray(sorted(set(bad)))].mean(axis=0)
    _, idx = domain._feature_tree.query(feat)
    feat = domain.boundary_features[int(idx)]

    ok_all = True
    for r in r_ladder:
        rho = 0.4 * r
        F = ball(domain, feat, rho)
        removed[float(r)] = F
        try:
            sub = domain_without(domain, F)
        except ValueError:
            ok_all = False
            continue
        keep = [s for s in samples if sub.contains(domain.centers[domain.cell_index(s)]
                                                    if not isinstance(s, (int, np.integer))
                                                    else domain.centers[s])]
        keep_pts = []
        for s in keep:
            pt = domain.centers[s] if isinstance(s, (int, np.integer)) else s
            keep_pts.append(tuple(pt))
        sub_assess = john_assess(sub, tuple(domain.centers[base.center]), keep_pts)
        if sub_assess.verdict != "john":
            ok_all = False
    verdict = "almost_john" if ok_all else "unresolved"
    return AlmostJohnAssessment(verdict, removed, base)


def domain_without(domain: GridDomain, F: RegionSet) -> GridDomain:
    """The domain minus a region (main component kept)."""
    om = domain.open_mask.copy()
    jj, ii = domain.cells_ij[F.sel][:, 1], domain.cells_ij[F.sel][:, 0]
    om[jj, ii] = False
    be = domain.blocked_east.copy()
    bn = domain.blocked_north.copy()
    pair_e = np.zeros_like(om)
    pair_e[:, :-1] = om[:, :-1] & om[:, 1:]
    be &= pair_e
    pair_n = np.zeros_like(om)
    pair_n[:-1, :] = om[:-1, :] & om[1:, :]
    bn &= pair_n
    sub = GridDomain(domain.spec, om, be, bn, weight=domain.weight_spec,
                     name=f"{domain.name}_minus", untrusted_mask=domain.untrusted_mask,
                     debris_mask=domain.debris_mask, validate=False)
    ncomp, labels = csgraph.connected_components(sub.adjacency, directed=False)
    if ncomp > 1:
        # keep only the largest remaining component
        main = int(np.argmax(np.bincount(labels)))
        om2 = np.zeros_like(om)
        om2[sub.open_mask] = labels == main
        pair_e = np.zeros_like(om2)
        pair_e[:, :-1] = om2[:, :-1] & om2[:, 1:]
        pair_n = np.zeros_like(om2)
        pair_n[:-1, :] = om2[:-1, :] & om2[1:, :]
        sub = GridDomain(domain.spec, om2, be & pair_e, bn & pair_n,
                         weight=domain.weight_spec, name=f"{domain.name}_minus",
                         untrusted_mask=domain.untrusted_mask,
                         debris_mask=domain.debris_mask)
    return sub
