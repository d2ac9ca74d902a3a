"""Inner-diameter (Mazurkiewicz) distance and the boundary it induces.

For two cells the distance is the least inner diameter of a connected
set containing both, which on a grid is the length of the shortest
wall-avoiding polyline between their centers.  It is computed as an
8-neighbor geodesic straightened by sight-line smoothing, so in convex
domains it collapses to the Euclidean distance.

The boundary atlas is a net of boundary-approach clusters at scale tau:
groups of near-boundary cells identified when their collar geodesics
stay within tau, each verified by a descending approach to its anchor
and projected to the metric boundary by that anchor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph

from .domain import BoundaryPoint, GridDomain
from .ends import DiscreteChain, PrimeEndRecord, is_singleton
from .errors import CollarEmpty, NotInDomain, NotSingleton, ScaleMismatch
from .regions import Inaccessible, RegionSet, accessibility


@dataclass
class MazDistanceResult:
    value: float
    lower_bound: float
    witness: RegionSet | None
    polyline: np.ndarray | None
    connected: bool = True

    def __post_init__(self):
        if self.connected and not (self.lower_bound <= self.value + 1e-9):
            raise ValueError("certified lower bound exceeds the value")


def _cell_of(domain: GridDomain, x) -> int:
    cid = x if isinstance(x, (int, np.integer)) else domain.cell_index(x)
    if not domain.trusted[cid]:
        raise NotInDomain("endpoint lies in the truncation shadow")
    return int(cid)


def _smooth(domain: GridDomain, pts: np.ndarray) -> np.ndarray:
    """Greedy string pulling: keep the farthest point still in sight."""
    out = [0]
    i = 0
    n = len(pts)
    while i < n - 1:
        j = n - 1
        while j > i + 1 and not domain.line_of_sight(
                pts[i], pts[j], block_untrusted=True):
            j -= 1
        out.append(j)
        i = j
    return pts[np.asarray(out)]


def _polyline_length(pts: np.ndarray) -> float:
    d = np.diff(pts, axis=0)
    return float(np.hypot(d[:, 0], d[:, 1]).sum())


def maz_distance(domain: GridDomain, x, y) -> MazDistanceResult:
    """Least inner diameter of a connected cell set containing both
    points, with a witness path."""
    a = _cell_of(domain, x)
    b = _cell_of(domain, y)
    pa = domain.centers[a]
    pb = domain.centers[b]
    straight = float(np.hypot(*(pb - pa)))
    if a == b:
        return MazDistanceResult(0.0, 0.0, RegionSet.from_cells(domain, [a]),
                                 pa[None, :])
    if domain.line_of_sight(pa, pb, block_untrusted=True):
        seg = np.vstack([pa, pb])
        cells, _ = domain.segment_cells(pa, pb)
        ids = domain.cell_id[cells[:, 1], cells[:, 0]]
        ids = ids[ids >= 0]
        return MazDistanceResult(straight, straight,
                                 RegionSet.from_cells(domain, ids), seg)
    dist, pred = csgraph.dijkstra(
        domain.octile_trusted, directed=False, indices=a,
        return_predecessors=True)
    if not np.isfinite(dist[b]):
        return MazDistanceResult(math.inf, straight, None, None, connected=False)
    chain = [b]
    while chain[-1] != a:
        chain.append(int(pred[chain[-1]]))
    chain.reverse()
    pts = domain.centers[np.asarray(chain)]
    poly = _smooth(domain, pts)
    value = _polyline_length(poly)
    value = max(value, straight)
    return MazDistanceResult(value, straight,
                             RegionSet.from_cells(domain, chain), poly)


# -- boundary atlas -----------------------------------------------------------


@dataclass
class MazCluster:
    index: int
    representative: int
    members: np.ndarray
    anchor: BoundaryPoint
    verified: bool


@dataclass
class MazBoundaryAtlas:
    domain: GridDomain
    tau: float
    clusters: list[MazCluster]
    rejected: list[MazCluster] = field(default_factory=list)

    def anchors(self) -> np.ndarray:
        return np.array([c.anchor.position for c in self.clusters])


def _anchor_for(domain: GridDomain, cell: int) -> BoundaryPoint:
    """Project a boundary-hugging cell to its nearest boundary feature."""
    c = domain.centers[cell]
    _, idx = domain._feature_tree.query(c)
    f = domain.boundary_features[int(idx)]
    hint = c - f
    n = np.hypot(*hint)
    if n == 0:
        hint = np.array([0.0, 1.0])
        n = 1.0
    return BoundaryPoint(position=(float(f[0]), float(f[1])),
                         side_hint=(float(hint[0] / n), float(hint[1] / n)))


def psi_project(atlas: MazBoundaryAtlas, cluster_index: int) -> BoundaryPoint:
    """The topological-boundary image of a cluster."""
    return atlas.clusters[cluster_index].anchor


def maz_boundary(domain: GridDomain, tau: float | None = None) -> MazBoundaryAtlas:
    """Net of verified boundary-approach clusters at scale tau."""
    tau = 16 * domain.h if tau is None else tau
    if tau < 8 * domain.h:
        raise ValueError("atlas scale tau must be at least 8h")
    seeds_sel = domain.boundary_adjacent & domain.trusted
    collar_sel = (domain.delta <= tau) & domain.trusted
    if not seeds_sel.any():
        raise CollarEmpty("no trusted boundary-adjacent cells")
    g, ids = _induced_graph_octile(domain, collar_sel)
    lut = np.full(domain.n_cells, -1, dtype=np.int64)
    lut[ids] = np.arange(len(ids))

    seed_ids = np.nonzero(seeds_sel)[0]
    unassigned = np.ones(domain.n_cells, dtype=bool)
    clusters: list[MazCluster] = []
    rejected: list[MazCluster] = []
    for s in seed_ids:
        if not unassigned[s]:
            continue
        d = csgraph.dijkstra(g, directed=False, indices=int(lut[s]),
                             limit=tau / 2)
        reached = ids[np.isfinite(d)]
        members = reached[seeds_sel[reached] & unassigned[reached]]
        unassigned[members] = False
        anchor = _anchor_for(domain, int(s))
        wit = accessibility(domain, anchor, r_max=tau)
        cl = MazCluster(index=-1, representative=int(s), members=members,
                        anchor=anchor, verified=not isinstance(wit, Inaccessible))
        (clusters if cl.verified else rejected).append(cl)
    for i, c in enumerate(clusters):
        c.index = i
    return MazBoundaryAtlas(domain=domain, tau=tau, clusters=clusters,
                            rejected=rejected)


def _induced_graph_octile(domain: GridDomain, sel: np.ndarray):
    ids = np.nonzero(sel)[0]
    n = len(ids)
    g = domain.octile_trusted
    coo = g.tocoo()
    keep = sel[coo.row] & sel[coo.col]
    lut = np.full(domain.n_cells, -1, dtype=np.int64)
    lut[ids] = np.arange(n)
    sub = sparse.csr_matrix(
        (coo.data[keep], (lut[coo.row[keep]], lut[coo.col[keep]])), shape=(n, n))
    return sub, ids


# -- correspondence with prime ends --------------------------------------------


@dataclass
class MatchReport:
    pairs: list[tuple[int, int]]          # (record index, cluster index)
    distances: list[float]
    unmatched_records: list[int]
    unmatched_clusters: list[int]

    @property
    def bijective(self) -> bool:
        if self.unmatched_records or self.unmatched_clusters:
            return False
        used = [c for _, c in self.pairs]
        return len(used) == len(set(used))


def phi_correspondence(
    domain: GridDomain,
    records: list[PrimeEndRecord],
    atlas: MazBoundaryAtlas,
) -> MatchReport:
    """Match prime-end records to boundary clusters through the inner
    metric: each record's tail must be within tau of exactly one cluster
    representative."""
    if atlas.domain is not domain:
        raise ScaleMismatch("atlas built on a different domain")
    for rec in records:
        if rec.chain.finest_scale > atlas.tau + 1e-12:
            raise ScaleMismatch("record coarser than the atlas scale")
    reps = np.array([atlas.clusters[i].representative for i in range(len(atlas.clusters))],
                    dtype=np.int64)
    rep_pts = domain.centers[reps] if len(reps) else np.empty((0, 2))
    pairs, dists, unmatched = [], [], []
    for ri, rec in enumerate(records):
        tail = _trusted_tail_of_chain(rec.chain)
        if tail is None:
            unmatched.append(ri)
            continue
        tp = domain.centers[tail]
        near = np.nonzero(np.hypot(rep_pts[:, 0] - tp[0], rep_pts[:, 1] - tp[1])
                          <= 2.5 * atlas.tau)[0]
        best, best_d = None, math.inf
        for ci in near:
            d = maz_distance(domain, tail, int(reps[ci])).value
            if d < best_d:
                best, best_d = int(ci), d
        if best is None or best_d > atlas.tau:
            unmatched.append(ri)
        else:
            pairs.append((ri, best))
            dists.append(best_d)
    matched_clusters = {c for _, c in pairs}
    unmatched_clusters = [i for i in range(len(atlas.clusters))
                          if i not in matched_clusters]
    return MatchReport(pairs=pairs, distances=dists,
                       unmatched_records=unmatched,
                       unmatched_clusters=unmatched_clusters)


def _trusted_tail_of_chain(chain: DiscreteChain) -> int | None:
    """Representative cell of the finest chain level that still has
    trusted cells (the truncation shadow cannot carry metric data)."""
    dom = chain.domain
    a = chain.anchor_point()
    for reg, _ in reversed(chain.levels):
        ids = reg.cells
        ids = ids[dom.trusted[ids]]
        if len(ids):
            pts = dom.centers[ids]
            return int(ids[np.argmin(np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1]))])
    return None


# -- sequential criterion -------------------------------------------------------


def maz_sequential_criterion(
    seq: list[DiscreteChain],
    limit: DiscreteChain,
    tol: float | None = None,
) -> bool:
    """Inner-metric realization of end convergence toward a singleton
    end: tail representatives of the sequence must approach the limit's
    tail, with the gap shrinking to the resolvable scale."""
    if not is_singleton(limit):
        raise NotSingleton("the limit end must be singleton")
    dom = limit.domain
    if tol is None:
        tol = 4 * limit.finest_scale + 8 * dom.h
    lim_tail = _trusted_tail_of_chain(limit)
    vals = []
    for c in seq:
        tail = _trusted_tail_of_chain(c)
        if tail is None or lim_tail is None:
            return False
        vals.append(maz_distance(dom, tail, lim_tail).value)
    if not vals:
        return True
    shrinking = all(b <= a * 1.25 + 2 * dom.h for a, b in zip(vals, vals[1:]))
    small_tail = vals[-1] <= max(tol, 0.25 * vals[0] + 2 * dom.h)
    return shrinking and small_tail
