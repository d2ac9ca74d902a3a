"""Discrete chains, ends and prime ends.

A chain is a finite strictly nested sequence of connected regions whose
closures meet the boundary, with positive separation between
consecutive relative boundaries.  All limit notions are realized
at-depth: the finest scale is bounded below by 4h and every verdict
carries that truncation.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .domain import SQRT2, BoundaryPoint, GridDomain, dyadic_ladder
from .errors import DomainMismatch, EmptyBall, InaccessibleError
from .regions import (
    AccessibilityWitness,
    ComponentReport,
    Inaccessible,
    RegionSet,
    accessibility,
    ball,
    boundary_separation,
    component_report,
    components,
)

SINGLETON_TOL_H = 6.0  # singleton when the last region stays within this many h of its anchor


@dataclass
class DiscreteChain:
    """Truncated realization of a nested chain of acceptable sets."""

    domain: GridDomain
    levels: list[tuple[RegionSet, float]]
    provenance: str = "manual"
    anchor: BoundaryPoint | None = None

    def __post_init__(self):
        if not self.levels:
            raise ValueError("a chain needs at least one level")
        for region, _ in self.levels:
            if region.domain is not self.domain:
                raise DomainMismatch("chain level on a different domain")

    @property
    def depth(self) -> int:
        return len(self.levels)

    def region(self, k: int) -> RegionSet:
        return self.levels[k][0]

    def scale(self, k: int) -> float:
        return self.levels[k][1]

    @property
    def last_region(self) -> RegionSet:
        return self.levels[-1][0]

    @property
    def finest_scale(self) -> float:
        return self.levels[-1][1]

    def subsequence(self, indices) -> "DiscreteChain":
        return DiscreteChain(self.domain, [self.levels[i] for i in indices],
                            provenance=self.provenance, anchor=self.anchor)

    def anchor_point(self) -> np.ndarray:
        """The declared anchor, or the centroid of the last region's
        boundary-hugging cells."""
        if self.anchor is not None:
            return np.asarray(self.anchor.position, dtype=float)
        cells = impression_cells(self)
        pts = self.domain.centers[cells] if len(cells) else self.last_region.centers
        return pts.mean(axis=0)


@dataclass
class ChainCheck:
    name: str
    passed: bool
    level: int | None = None
    detail: str = ""


@dataclass
class ChainValidation:
    checks: list[ChainCheck]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def first_failure(self) -> ChainCheck | None:
        for c in self.checks:
            if not c.passed:
                return c
        return None


def _acceptable(region: RegionSet, anchor: BoundaryPoint | None) -> bool:
    dom = region.domain
    if not region or not region.is_connected():
        return False
    near_wall = (dom.delta[region.sel] <= 0.75 * dom.h).any()
    if near_wall:
        return True
    if anchor is not None:
        pos = np.asarray(anchor.position)
        return region.min_dist_to(pos) <= SQRT2 * dom.h
    return False


def validate_chain(chain: DiscreteChain) -> ChainValidation:
    """Check every chain invariant, reporting the first offending level
    per invariant."""
    dom = chain.domain
    checks = []

    bad = next((k for k, (reg, _) in enumerate(chain.levels)
                if not reg.is_connected() or not reg), None)
    checks.append(ChainCheck("connected", bad is None, bad))

    bad = next((k for k, (reg, _) in enumerate(chain.levels)
                if not _acceptable(reg, chain.anchor)), None)
    checks.append(ChainCheck("acceptable", bad is None, bad,
                             "closure must meet the boundary"))

    bad = next((k for k in range(chain.depth - 1)
                if not chain.region(k + 1).issubset(chain.region(k))), None)
    checks.append(ChainCheck("nested", bad is None, bad))

    bad = None
    for k in range(chain.depth - 1):
        sep = boundary_separation(chain.region(k + 1), chain.region(k))
        if not sep > 0:
            bad = k
            break
    checks.append(ChainCheck("separation", bad is None, bad,
                             "consecutive relative boundaries must be apart"))

    scales = [s for _, s in chain.levels]
    ok = all(b < a for a, b in zip(scales, scales[1:]))
    checks.append(ChainCheck("scales_decreasing", ok))
    checks.append(ChainCheck("scale_floor", scales[-1] >= 4 * dom.h - 1e-12,
                             detail="finest scale below 4h"))

    last, last_scale = chain.levels[-1]
    cells = impression_cells(chain)
    ok = len(cells) > 0 and bool(
        (dom.delta[last.sel] <= 2 * last_scale + 1e-12).all())
    checks.append(ChainCheck("impression_near_boundary", ok,
                             detail="last region must hug the boundary"))
    return ChainValidation(checks)


# -- division and equivalence ---------------------------------------------------


@dataclass
class DivisionReport:
    result: bool
    undetermined_at_depth: bool
    skipped_levels: list[int]
    failed_level: int | None = None


def division_report(a: DiscreteChain, b: DiscreteChain) -> DivisionReport:
    """Does chain ``a`` divide chain ``b`` at depth?

    Levels of b finer than a's finest scale cannot be tested against a
    truncated chain; they are skipped and flagged rather than failed."""
    if a.domain is not b.domain:
        raise DomainMismatch("chains on different domains")
    floor = a.finest_scale * (1 - 1e-9)
    skipped = []
    for k in range(b.depth):
        if b.scale(k) < floor:
            skipped.append(k)
            continue
        if not any(a.region(l).issubset(b.region(k)) for l in range(a.depth)):
            return DivisionReport(False, False, skipped, failed_level=k)
    return DivisionReport(True, bool(skipped), skipped)


def divides(a: DiscreteChain, b: DiscreteChain) -> bool:
    return division_report(a, b).result


def equivalent(a: DiscreteChain, b: DiscreteChain) -> bool:
    return divides(a, b) and divides(b, a)


# -- impressions -----------------------------------------------------------------


def impression_cells(chain: DiscreteChain) -> np.ndarray:
    dom = chain.domain
    last = chain.last_region
    ids = last.cells
    return ids[dom.delta[ids] <= SQRT2 * dom.h]


@dataclass
class Impression:
    points: np.ndarray
    diameter: float
    anchored_radius: float
    anchor: np.ndarray


def impression(chain: DiscreteChain) -> Impression:
    """Boundary-adjacent cell centers of the last region, its diameter,
    and how far the last region strays from the chain's anchor."""
    dom = chain.domain
    ids = impression_cells(chain)
    anchor = chain.anchor_point()
    pts = dom.centers[ids]
    if chain.anchor is not None:
        pts = np.vstack([pts, anchor[None, :]]) if len(pts) else anchor[None, :]
    return Impression(
        points=pts,
        diameter=chain.last_region.diameter(),
        anchored_radius=chain.last_region.radius_about(anchor),
        anchor=anchor,
    )


def is_singleton(chain: DiscreteChain, tol: float | None = None) -> bool:
    """Singleton at depth: the last region stays within the tolerance of
    the anchor.  A chain can only certify contraction down to its own
    finest scale, so the default tolerance is scale-aware."""
    if tol is None:
        tol = max(SINGLETON_TOL_H * chain.domain.h, 1.5 * chain.finest_scale)
    return impression(chain).anchored_radius <= tol + 1e-12


# -- prime end records -----------------------------------------------------------


@dataclass
class PrimeEndRecord:
    chain: DiscreteChain
    impression: Impression
    singleton: bool
    accessibility: AccessibilityWitness | None = None
    modp_status: str | None = None

    @property
    def anchor(self) -> np.ndarray:
        return self.impression.anchor

    def tail_cell(self) -> int:
        """Representative cell of the finest region, nearest the anchor."""
        ids = self.chain.last_region.cells
        pts = self.chain.domain.centers[ids]
        a = self.anchor
        return int(ids[np.argmin(np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1]))])

    def level_representatives(self) -> list[int]:
        out = []
        a = self.anchor
        for reg, _ in self.chain.levels:
            ids = reg.cells
            pts = self.chain.domain.centers[ids]
            out.append(int(ids[np.argmin(np.hypot(pts[:, 0] - a[0], pts[:, 1] - a[1]))]))
        return out


def _record_from_chain(chain: DiscreteChain,
                       witness: AccessibilityWitness | None = None) -> PrimeEndRecord:
    return PrimeEndRecord(
        chain=chain,
        impression=impression(chain),
        singleton=is_singleton(chain),
        accessibility=witness,
    )


def prime_end_at(
    domain: GridDomain,
    point: BoundaryPoint,
    r_max: float | None = None,
) -> PrimeEndRecord:
    """Singleton prime end anchored at an accessible boundary point: the
    chain of ball components followed by the approach curve."""
    wit = accessibility(domain, point, r_max=r_max)
    if isinstance(wit, Inaccessible):
        raise InaccessibleError(
            f"{point.position}: {wit.reason} at radius {wit.failed_radius:.4g}")
    levels = []
    path_ids = wit.path
    for r in wit.radii:
        b = ball(domain, point.position, r)
        inside = [c for c in path_ids if b.sel[c]]
        tail = inside[-1] if inside else path_ids[-1]
        comp = next(c for c in components(b) if c.sel[tail])
        levels.append((comp, float(r)))
    chain = DiscreteChain(domain, levels, provenance=f"ball_components{point.position}",
                          anchor=point)
    return _record_from_chain(chain, witness=wit)


# -- component trees and enumeration ---------------------------------------------


@dataclass
class TreeNode:
    rung: int
    index: int
    region: RegionSet
    witness: int
    parent: "TreeNode | None" = None
    children: list["TreeNode"] = field(default_factory=list)


@dataclass
class ComponentTree:
    point: BoundaryPoint
    radii: list[float]
    rungs: list[list[TreeNode]]
    reports: list[ComponentReport]

    @property
    def roots(self) -> list[TreeNode]:
        return [n for n in self.rungs[0]]

    def leaves_at_finest(self) -> list[TreeNode]:
        return list(self.rungs[-1])

    def n_series(self) -> list[int]:
        return [len(r) for r in self.rungs]


def component_tree(
    domain: GridDomain,
    point: BoundaryPoint,
    radii=None,
) -> ComponentTree:
    """Rooted forest of touching components across a descending ladder,
    linked by inclusion."""
    if radii is None:
        radii = dyadic_ladder(min(0.5, domain.diameter / 4), 4 * domain.h)
    radii = sorted((float(r) for r in radii), reverse=True)
    rungs: list[list[TreeNode]] = []
    reports = []
    for level, r in enumerate(radii):
        rep = component_report(domain, point, r)
        reports.append(rep)
        nodes = []
        for idx, (comp, w) in enumerate(zip(rep.touching, rep.witnesses)):
            node = TreeNode(rung=level, index=idx, region=comp, witness=w)
            if level > 0:
                node.parent = next(
                    (p for p in rungs[level - 1] if comp.issubset(p.region)), None)
                if node.parent is not None:
                    node.parent.children.append(node)
            nodes.append(node)
        rungs.append(nodes)
    if not rungs or not rungs[0]:
        raise EmptyBall(f"no touching components at {point.position}")
    return ComponentTree(point=point, radii=radii, rungs=rungs, reports=reports)


@dataclass
class Enumeration:
    records: list[PrimeEndRecord]
    count: int
    stabilized_n: int
    growing: bool
    n_series: list[int]


def enumerate_prime_ends_at(
    domain: GridDomain,
    point: BoundaryPoint,
    radii=None,
) -> Enumeration:
    """One singleton record per descending branch that reaches the
    finest rung of the ladder."""
    tree = component_tree(domain, point, radii)
    records = []
    for leaf in tree.leaves_at_finest():
        path = [leaf]
        while path[-1].parent is not None:
            path.append(path[-1].parent)
        path.reverse()
        levels = [(n.region, tree.radii[n.rung]) for n in path]
        chain = DiscreteChain(domain, levels,
                              provenance=f"tree_search{point.position}", anchor=point)
        records.append(_record_from_chain(chain))
    ns = tree.n_series()
    growing = (len(ns) >= 2 and ns[-1] > ns[-2]) or (max(ns) > ns[-1])
    return Enumeration(
        records=records,
        count=len(records),
        stabilized_n=ns[-1],
        growing=growing,
        n_series=ns,
    )


# -- convergence and separation ---------------------------------------------------


def point_sequence_converges(domain: GridDomain, seq, chain: DiscreteChain) -> bool:
    """True when, for every chain level, some tail of the point sequence
    lies in that level's region."""
    if chain.domain is not domain:
        raise DomainMismatch("chain on a different domain")
    ids = [domain.cell_index(p) for p in seq]
    for reg, _ in chain.levels:
        inside = [reg.sel[c] for c in ids]
        tail_start = len(inside)
        for i in range(len(inside) - 1, -1, -1):
            if not inside[i]:
                break
            tail_start = i
        if tail_start >= len(inside):
            return False
    return True


def end_sequence_converges(seq: list[DiscreteChain], limit: DiscreteChain) -> bool:
    """True when for every level of the limit, all but finitely many
    chains in the sequence eventually sit inside it."""
    for c in seq:
        if c.domain is not limit.domain:
            raise DomainMismatch("chains on different domains")
    for k in range(limit.depth):
        target = limit.region(k)
        hits = [any(c.region(l).issubset(target) for l in range(c.depth)) for c in seq]
        tail = len(hits)
        for i in range(len(hits) - 1, -1, -1):
            if not hits[i]:
                break
            tail = i
        if tail >= len(hits):
            return False
    return True


@dataclass
class SeparationProbe:
    separated: bool
    witness_cells: list[int] | None
    witness_points: np.ndarray | None
    separated_from_level: int | None


def separation_probe(a: PrimeEndRecord, b: PrimeEndRecord) -> SeparationProbe:
    """Search for a point sequence converging to both records; if the
    level intersections die out, certify separation instead."""
    ca, cb = a.chain, b.chain
    if ca.domain is not cb.domain:
        raise DomainMismatch("records on different domains")
    dom = ca.domain
    depth = min(ca.depth, cb.depth)
    cells = []
    first_empty = None
    for k in range(depth):
        inter = ca.region(k) & cb.region(k)
        if not inter:
            first_empty = k if first_empty is None else first_empty
            cells = []
            continue
        first_empty = None
        ids = inter.cells
        deep = ids[np.argmax(dom.delta[ids])]
        cells.append(int(deep))
    if first_empty is not None:
        return SeparationProbe(True, None, None, first_empty)
    return SeparationProbe(False, cells, dom.centers[np.asarray(cells)], None)


def end_in_neighborhood(G: RegionSet, chain: DiscreteChain) -> bool:
    """True when some chain level is contained in G."""
    if G.domain is not chain.domain:
        raise DomainMismatch("region on a different domain")
    return any(chain.region(k).issubset(G) for k in range(chain.depth))
