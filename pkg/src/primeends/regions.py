"""Region sets, connected components, boundary contact and accessibility.

Boundary contact is decided by sight lines: a component touches a
boundary point when one of its trusted cells is near the point and the
straight segment from the cell center to the point crosses no wall and
no truncation-shadow cell (crossings inside a 2h disk around the point
are forgiven, since the point itself sits on the boundary).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .domain import SQRT2, BoundaryPoint, GridDomain, check_boundary_point, dyadic_ladder
from .errors import DomainMismatch, EmptyBall

TOUCH_FRACTION = 0.5   # candidate cells up to this fraction of the ball radius
FORGIVE_FACTOR = 2.0   # sight-line slack around the boundary point, in units of h


class RegionSet:
    """A subset of a domain's open cells (dense-id boolean selection)."""

    __slots__ = ("domain", "sel")

    def __init__(self, domain: GridDomain, sel: np.ndarray):
        self.domain = domain
        sel = np.asarray(sel, dtype=bool)
        if sel.shape != (domain.n_cells,):
            raise ValueError("selection length must match the domain cell count")
        sel = sel.copy()
        sel.setflags(write=False)
        self.sel = sel

    # construction helpers
    @classmethod
    def empty(cls, domain: GridDomain) -> "RegionSet":
        return cls(domain, np.zeros(domain.n_cells, dtype=bool))

    @classmethod
    def full(cls, domain: GridDomain) -> "RegionSet":
        return cls(domain, np.ones(domain.n_cells, dtype=bool))

    @classmethod
    def from_cells(cls, domain: GridDomain, ids) -> "RegionSet":
        sel = np.zeros(domain.n_cells, dtype=bool)
        sel[np.asarray(ids, dtype=np.int64)] = True
        return cls(domain, sel)

    @classmethod
    def from_rect(cls, domain: GridDomain, x_lo, x_hi, y_lo, y_hi) -> "RegionSet":
        c = domain.centers
        sel = ((c[:, 0] > x_lo) & (c[:, 0] < x_hi)
               & (c[:, 1] > y_lo) & (c[:, 1] < y_hi))
        return cls(domain, sel)

    @classmethod
    def from_predicate(cls, domain: GridDomain, fn) -> "RegionSet":
        c = domain.centers
        return cls(domain, np.asarray(fn(c[:, 0], c[:, 1]), dtype=bool))

    # set algebra
    def __and__(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        return RegionSet(self.domain, self.sel & other.sel)

    def __or__(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        return RegionSet(self.domain, self.sel | other.sel)

    def __sub__(self, other: "RegionSet") -> "RegionSet":
        self._check(other)
        return RegionSet(self.domain, self.sel & ~other.sel)

    def issubset(self, other: "RegionSet") -> bool:
        self._check(other)
        return bool((self.sel & ~other.sel).sum() == 0)

    def isdisjoint(self, other: "RegionSet") -> bool:
        self._check(other)
        return not bool((self.sel & other.sel).any())

    def _check(self, other: "RegionSet"):
        if other.domain is not self.domain:
            raise DomainMismatch("regions live on different domains")

    # queries
    @property
    def size(self) -> int:
        return int(self.sel.sum())

    def __bool__(self) -> bool:
        return bool(self.sel.any())

    @property
    def cells(self) -> np.ndarray:
        return np.nonzero(self.sel)[0]

    @property
    def centers(self) -> np.ndarray:
        return self.domain.centers[self.sel]

    def measure(self) -> float:
        return float(self.domain.measures[self.sel].sum())

    def diameter(self) -> float:
        pts = self.centers
        if len(pts) <= 1:
            return 0.0
        try:
            from scipy.spatial import ConvexHull
            if len(pts) > 16:
                hull = pts[ConvexHull(pts).vertices]
            else:
                hull = pts
        except Exception:  # collinear sets
            hull = pts
        d2 = ((hull[:, None, :] - hull[None, :, :]) ** 2).sum(-1)
        return float(np.sqrt(d2.max()))

    def radius_about(self, point) -> float:
        """Largest center distance from ``point`` over the region's cells."""
        pts = self.centers
        if len(pts) == 0:
            return 0.0
        return float(np.hypot(pts[:, 0] - point[0], pts[:, 1] - point[1]).max())

    def min_dist_to(self, point) -> float:
        pts = self.centers
        if len(pts) == 0:
            return math.inf
        return float(np.hypot(pts[:, 0] - point[0], pts[:, 1] - point[1]).min())

    def is_connected(self) -> bool:
        return len(components(self)) <= 1

    def __repr__(self):
        return f"RegionSet({self.domain.name}, {self.size} cells)"


def ball(domain: GridDomain, center, r: float) -> RegionSet:
    """Open cells whose centers lie strictly within distance r of center."""
    if r <= 0:
        raise ValueError("ball radius must be positive")
    return RegionSet(domain, domain.cells_within(center, r))


def _induced_graph(domain: GridDomain, sel: np.ndarray) -> tuple[sparse.csr_matrix, np.ndarray]:
    """Subgraph of the unblocked 4-adjacency induced on selected cells."""
    ids = np.nonzero(sel)[0]
    n = len(ids)
    u, v = domain.edge_pairs
    keep = sel[u] & sel[v]
    lut = np.full(domain.n_cells, -1, dtype=np.int64)
    lut[ids] = np.arange(n)
    uu, vv = lut[u[keep]], lut[v[keep]]
    g = sparse.csr_matrix(
        (np.ones(2 * len(uu)), (np.concatenate([uu, vv]), np.concatenate([vv, uu]))),
        shape=(n, n),
    )
    return g, ids


def components(region: RegionSet) -> list[RegionSet]:
    """Maximal connected subsets, ordered by their smallest cell id."""
    if not region:
        return []
    g, ids = _induced_graph(region.domain, region.sel)
    ncomp, labels = csgraph.connected_components(g, directed=False)
    out = []
    for lab in range(ncomp):
        member_ids = ids[labels == lab]
        out.append(RegionSet.from_cells(region.domain, member_ids))
    out.sort(key=lambda r: int(r.cells[0]))
    return out


def component_labels(region: RegionSet) -> tuple[np.ndarray, np.ndarray, int]:
    """(ids, labels, ncomp) for callers that avoid materializing RegionSets."""
    g, ids = _induced_graph(region.domain, region.sel)
    ncomp, labels = csgraph.connected_components(g, directed=False)
    return ids, labels, ncomp


def relative_boundary(region: RegionSet) -> RegionSet:
    """Cells of the domain outside the region that share an unblocked
    edge with it (the discrete relative boundary inside the domain)."""
    dom = region.domain
    u, v = dom.edge_pairs
    sel = region.sel
    out = np.zeros(dom.n_cells, dtype=bool)
    out[v[sel[u] & ~sel[v]]] = True
    out[u[sel[v] & ~sel[u]]] = True
    return RegionSet(dom, out)


def boundary_separation(a: RegionSet, b: RegionSet) -> float:
    """Min center distance between the two relative boundaries (inf if
    either is empty)."""
    ra = relative_boundary(a)
    rb = relative_boundary(b)
    if not ra or not rb:
        return math.inf
    pa = ra.centers
    pb = rb.centers
    tree = cKDTree(pb)
    d, _ = tree.query(pa)
    return float(d.min())


# -- boundary contact ----------------------------------------------------------

DEBRIS_CLEARANCE = 1.6   # open cells at most this many h from the boundary
                         # count as rasterization debris a contact segment
                         # may pass through
MAX_WITNESS_TRIES = 48   # candidate cells tested per component


def touch_candidates(domain: GridDomain, point: BoundaryPoint, r: float) -> np.ndarray:
    """Trusted cells inside the ball that might witness contact with the
    point, nearest first, restricted to the hinted side if one is set."""
    pos = np.asarray(point.position, dtype=float)
    c = domain.centers
    d = np.hypot(c[:, 0] - pos[0], c[:, 1] - pos[1])
    cand = (d < r) & domain.trusted
    hint = point.hinted()
    if hint is not None:
        side = (c[:, 0] - pos[0]) * hint[0] + (c[:, 1] - pos[1]) * hint[1]
        cand &= side > 1e-12
    ids = np.nonzero(cand)[0]
    return ids[np.argsort(d[ids], kind="stable")]


def contact_segment_ok(domain: GridDomain, comp_sel: np.ndarray,
                       cell_id: int, pos) -> bool:
    """Contact test: the straight segment from the cell center to the
    boundary point must not traverse, outside a 2h disk around the point,
    (a) truncation-shadow cells, (b) open cells of other components with
    clearance above the debris threshold, or (c) closed cells that are
    not rasterization debris (builder-sealed slivers, or thin complement
    with at least 3 open neighbors).
    Walls themselves do not block: a wall the segment crosses next to
    resolved open space is caught by rule (b)."""
    pos = np.asarray(pos, dtype=float)
    h = domain.h
    cells, dist = domain.segment_cells(domain.centers[cell_id], pos)
    outside = dist > FORGIVE_FACTOR * h
    if not outside.any():
        return True
    cells = cells[outside]
    ny, nx = domain.open_mask.shape
    ok_range = (cells[:, 0] >= 0) & (cells[:, 0] < nx) & (cells[:, 1] >= 0) & (cells[:, 1] < ny)
    if not ok_range.all():
        return False
    gi, gj = cells[:, 0], cells[:, 1]
    is_open = domain.open_mask[gj, gi]
    closed = ~is_open
    if closed.any():
        hard = ((domain.open_neighbor_count[gj[closed], gi[closed]] < 3)
                & ~domain.debris_mask[gj[closed], gi[closed]])
        if hard.any():
            return False
    if is_open.any():
        ids = domain.cell_id[gj[is_open], gi[is_open]]
        if (~domain.trusted[ids]).any():
            return False
        foreign = ~comp_sel[ids]
        if foreign.any() and (domain.delta[ids[foreign]] > DEBRIS_CLEARANCE * h).any():
            return False
    return True


def _touch_witnesses(domain: GridDomain, point: BoundaryPoint, r: float,
                     comp_of: np.ndarray, comp_sels: list[np.ndarray]) -> dict[int, int]:
    """First contact witness per component label, bounded search."""
    pos = np.asarray(point.position, dtype=float)
    cand = touch_candidates(domain, point, r)
    tried = {}
    found: dict[int, int] = {}
    pending = set(range(len(comp_sels)))
    for cid in cand:
        lab = comp_of[cid]
        if lab < 0 or lab not in pending:
            continue
        k = tried.get(lab, 0)
        if k >= MAX_WITNESS_TRIES:
            continue
        tried[lab] = k + 1
        if contact_segment_ok(domain, comp_sels[lab], int(cid), pos):
            found[lab] = int(cid)
            pending.discard(lab)
            if not pending:
                break
    return found


@dataclass
class ComponentReport:
    """Components of a boundary ball, split into those that reach the
    center point and the remainder."""

    center: BoundaryPoint
    radius: float
    touching: list[RegionSet]
    remainder: RegionSet
    N: int
    remainder_accumulates: bool
    witnesses: list[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "center": list(self.center.position),
            "radius": self.radius,
            "N": self.N,
            "touching_sizes": [t.size for t in self.touching],
            "remainder_size": self.remainder.size,
            "remainder_accumulates": self.remainder_accumulates,
        }


def component_report(domain: GridDomain, point: BoundaryPoint, r: float) -> ComponentReport:
    """Classify the components of ball(point, r) by contact with the point."""
    check_boundary_point(domain, point)
    if r < 4 * domain.h - 1e-12:
        raise ValueError("component reports need r >= 4h")
    b = ball(domain, point.position, r)
    if not b:
        raise EmptyBall(f"no open cells within {r} of {point.position}")
    ids, labels, ncomp = component_labels(b)
    comp_of = np.full(domain.n_cells, -1, dtype=np.int64)
    comp_of[ids] = labels
    comp_sels = []
    for lab in range(ncomp):
        sel = np.zeros(domain.n_cells, dtype=bool)
        sel[ids[labels == lab]] = True
        comp_sels.append(sel)
    found = _touch_witnesses(domain, point, r, comp_of, comp_sels)

    order = sorted(range(ncomp), key=lambda lab: int(ids[labels == lab][0]))
    touching, witnesses = [], []
    rest = np.zeros(domain.n_cells, dtype=bool)
    for lab in order:
        if lab in found:
            touching.append(RegionSet(domain, comp_sels[lab]))
            witnesses.append(found[lab])
        else:
            rest |= comp_sels[lab]
    remainder = RegionSet(domain, rest)
    acc = remainder.min_dist_to(point.position) < FORGIVE_FACTOR * domain.h
    return ComponentReport(
        center=point, radius=r, touching=touching, remainder=remainder,
        N=len(touching), remainder_accumulates=acc, witnesses=witnesses,
    )


# -- finite connectedness ------------------------------------------------------


@dataclass
class ConnectednessVerdict:
    point: BoundaryPoint
    verdict: str  # finitely_connected | not_finitely_connected | unresolved
    radii: list[float]
    n_series: list[int]
    accumulates: list[bool]
    remainder_dists: list[float]
    n_growing: bool

    def to_dict(self) -> dict:
        return {
            "point": list(self.point.position),
            "verdict": self.verdict,
            "radii": self.radii,
            "N": self.n_series,
            "accumulates": self.accumulates,
            "n_growing": self.n_growing,
        }


def finitely_connected_at(
    domain: GridDomain,
    point: BoundaryPoint,
    radii=None,
    n_cap: int = 64,
) -> ConnectednessVerdict:
    """Three-state verdict from a descending radius ladder.

    Accumulation means remainder cells approach the point to within 2h.
    A remainder closer than the finest tested radius, without reaching
    the accumulation threshold, leaves the verdict unresolved."""
    if radii is None:
        radii = dyadic_ladder(min(0.5, domain.diameter / 4), 4 * domain.h)
    radii = sorted((float(r) for r in radii), reverse=True)
    ns, accs, dists = [], [], []
    for r in radii:
        rep = component_report(domain, point, r)
        ns.append(rep.N)
        d = rep.remainder.min_dist_to(point.position)
        dists.append(d)
        accs.append(bool(d < FORGIVE_FACTOR * domain.h))
    n_growing = all(b >= a for a, b in zip(ns, ns[1:])) and ns[-1] > ns[0]
    if accs[-1] and (len(accs) == 1 or accs[-2] or sum(accs) * 2 >= len(accs)):
        verdict = "not_finitely_connected"
    elif max(ns) > n_cap:
        verdict = "not_finitely_connected"
    elif not any(accs) and all(n >= 1 for n in ns) and dists[-1] > radii[-1]:
        verdict = "finitely_connected"
    elif not any(accs) and all(n >= 1 for n in ns) and not math.isfinite(dists[-1]):
        verdict = "finitely_connected"
    else:
        verdict = "unresolved"
    return ConnectednessVerdict(
        point=point, verdict=verdict, radii=list(radii), n_series=ns,
        accumulates=accs, remainder_dists=dists, n_growing=n_growing,
    )


def stabilized_n(verdict: ConnectednessVerdict) -> int:
    """N at the finest resolved radius."""
    return verdict.n_series[-1]


# -- accessibility -------------------------------------------------------------


@dataclass
class AccessibilityWitness:
    """A discrete curve approaching a boundary point through a nested
    chain of ball components."""

    target: BoundaryPoint
    path: list[int]
    radii: list[float]
    domain: GridDomain

    @property
    def positions(self) -> np.ndarray:
        return self.domain.centers[np.asarray(self.path, dtype=np.int64)]

    def validate(self) -> bool:
        ij = self.domain.cells_ij
        for a, b in zip(self.path, self.path[1:]):
            di = int(ij[b, 0] - ij[a, 0])
            dj = int(ij[b, 1] - ij[a, 1])
            if abs(di) + abs(dj) != 1:
                return False
            i, j = int(ij[a, 0]), int(ij[a, 1])
            if di == 1 and self.domain.blocked_east[j, i]:
                return False
            if di == -1 and self.domain.blocked_east[j, i - 1]:
                return False
            if dj == 1 and self.domain.blocked_north[j, i]:
                return False
            if dj == -1 and self.domain.blocked_north[j - 1, i]:
                return False
        pos = np.asarray(self.target.position)
        tail = self.positions[-1]
        return bool(np.hypot(*(tail - pos)) <= max(SQRT2, TOUCH_FRACTION * self.radii[-1] / self.domain.h) * self.domain.h + 1e-9)


@dataclass
class Inaccessible:
    target: BoundaryPoint
    failed_radius: float
    reason: str


def _path_between(domain, region_sel, start, goals) -> list[int] | None:
    g, ids = _induced_graph(domain, region_sel)
    lut = np.full(domain.n_cells, -1, dtype=np.int64)
    lut[ids] = np.arange(len(ids))
    s = lut[start]
    if s < 0:
        return None
    goal_local = lut[np.asarray(goals, dtype=np.int64)]
    goal_local = goal_local[goal_local >= 0]
    if len(goal_local) == 0:
        return None
    dist, pred = csgraph.dijkstra(
        g, directed=False, indices=int(s), return_predecessors=True)
    reachable = goal_local[np.isfinite(dist[goal_local])]
    if len(reachable) == 0:
        return None
    end = int(reachable[np.argmin(dist[reachable])])
    chain = [end]
    while chain[-1] != s:
        chain.append(int(pred[chain[-1]]))
    return [int(ids[c]) for c in reversed(chain)]


def accessibility(
    domain: GridDomain,
    point: BoundaryPoint,
    r_max: float | None = None,
) -> AccessibilityWitness | Inaccessible:
    """Find a discrete approach curve, or certify that no descending
    chain of touching ball components reaches the finest scale."""
    check_boundary_point(domain, point)
    if r_max is None:
        r_max = min(0.5, domain.diameter / 4)
    radii = list(dyadic_ladder(r_max, 4 * domain.h))
    chain_comps: list[RegionSet] = []
    witnesses: list[int] = []
    for r in radii:
        try:
            rep = component_report(domain, point, r)
        except EmptyBall:
            return Inaccessible(point, r, "empty ball")
        options = [
            (comp, w) for comp, w in zip(rep.touching, rep.witnesses)
            if not chain_comps or comp.issubset(chain_comps[-1])
        ]
        if not options:
            return Inaccessible(point, r, "no touching component inside the chain")
        comp, w = options[0]
        chain_comps.append(comp)
        witnesses.append(w)

    # concatenate per-level shortest paths, each inside the coarser set
    start = int(chain_comps[0].cells[np.argmax(domain.delta[chain_comps[0].cells])])
    path = [start]
    for k in range(1, len(chain_comps)):
        seg = _path_between(domain, chain_comps[k - 1].sel, path[-1],
                            chain_comps[k].cells)
        if seg is None:
            return Inaccessible(point, radii[k], "chain component unreachable")
        path.extend(seg[1:])
    seg = _path_between(domain, chain_comps[-1].sel, path[-1], [witnesses[-1]])
    if seg is None:
        return Inaccessible(point, radii[-1], "witness cell unreachable")
    path.extend(seg[1:])
    return AccessibilityWitness(target=point, path=path, radii=radii, domain=domain)
