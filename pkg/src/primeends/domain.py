"""Discrete model of a bounded planar domain on a uniform grid.

A domain is a set of open grid cells together with a set of blocked
edges (zero-width walls between adjacent cells) and a positive cell
weight.  All geometric queries work on cell centers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import sparse
from scipy.sparse import csgraph
from scipy.spatial import cKDTree

from .errors import NotABoundaryPoint, NotInDomain, RadiusLadderEmpty

SQRT2 = math.sqrt(2.0)


@dataclass(frozen=True)
class GridSpec:
    """Uniform-grid layout: cell counts, spacing and lower-left corner."""

    nx: int
    ny: int
    h: float
    origin: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.nx < 2 or self.ny < 2:
            raise ValueError("grid needs at least 2x2 cells")
        if not self.h > 0:
            raise ValueError("cell spacing must be positive")

    def centers(self) -> np.ndarray:
        """(ny, nx, 2) array of cell centers."""
        x = self.origin[0] + (np.arange(self.nx) + 0.5) * self.h
        y = self.origin[1] + (np.arange(self.ny) + 0.5) * self.h
        cx, cy = np.meshgrid(x, y)
        return np.stack([cx, cy], axis=-1)

    def cell_of(self, pos) -> tuple[int, int]:
        """Cell (i, j) containing a point; may be outside the grid."""
        i = int(math.floor((pos[0] - self.origin[0]) / self.h))
        j = int(math.floor((pos[1] - self.origin[1]) / self.h))
        return i, j


@dataclass(frozen=True)
class WeightSpec:
    """Named cell-weight families sampled at cell centers."""

    kind: str = "const"  # const | abs_alpha | log
    params: dict = field(default_factory=dict)

    def evaluate(self, centers: np.ndarray) -> np.ndarray:
        if self.kind == "const":
            return np.full(centers.shape[:-1], float(self.params.get("value", 1.0)))
        cx, cy = self.params.get("center", (0.0, 0.0))
        r = np.hypot(centers[..., 0] - cx, centers[..., 1] - cy)
        if self.kind == "abs_alpha":
            alpha = float(self.params.get("alpha", 1.0))
            return np.power(np.maximum(r, 1e-300), alpha)
        if self.kind == "log":
            with np.errstate(divide="ignore"):
                return np.maximum(1.0, np.log(1.0 / np.maximum(r, 1e-300)))
        raise ValueError(f"unknown weight kind {self.kind!r}")


class GridDomain:
    """Open cells + blocked edges + weighted measure.

    ``open_mask[j, i]`` marks cell (i, j) as part of the domain.
    ``blocked_east[j, i]`` walls off cells (i, j)|(i+1, j) and
    ``blocked_north[j, i]`` walls off (i, j)|(i, j+1).

    ``untrusted_mask`` marks cells that only exist because an infinite
    family of removed features was truncated at finite depth; geometry
    there is below the resolved scale and boundary contact through such
    cells is never asserted.

    ``debris_mask`` marks closed cells that a builder sealed off as a
    byproduct of rasterizing slanted walls; contact segments may pass
    through them, unlike through genuine complement.
    """

    def __init__(
        self,
        spec: GridSpec,
        open_mask: np.ndarray,
        blocked_east: np.ndarray | None = None,
        blocked_north: np.ndarray | None = None,
        weight: WeightSpec | None = None,
        name: str = "domain",
        untrusted_mask: np.ndarray | None = None,
        debris_mask: np.ndarray | None = None,
        validate: bool = True,
    ):
        self.spec = spec
        shape = (spec.ny, spec.nx)
        self.open_mask = np.asarray(open_mask, dtype=bool).reshape(shape)
        self.blocked_east = (
            np.zeros(shape, dtype=bool) if blocked_east is None
            else np.asarray(blocked_east, dtype=bool).reshape(shape)
        )
        self.blocked_north = (
            np.zeros(shape, dtype=bool) if blocked_north is None
            else np.asarray(blocked_north, dtype=bool).reshape(shape)
        )
        self.weight_spec = weight or WeightSpec()
        self.name = name
        self.untrusted_mask = (
            np.zeros(shape, dtype=bool) if untrusted_mask is None
            else np.array(untrusted_mask, dtype=bool).reshape(shape)
        )
        self.untrusted_mask &= self.open_mask
        self.debris_mask = (
            np.zeros(shape, dtype=bool) if debris_mask is None
            else np.array(debris_mask, dtype=bool).reshape(shape)
        )
        self.debris_mask &= ~self.open_mask
        for arr in (self.open_mask, self.blocked_east, self.blocked_north,
                    self.untrusted_mask, self.debris_mask):
            arr.setflags(write=False)
        if validate:
            self._validate()

    # -- construction checks -------------------------------------------------

    def _validate(self):
        if not self.open_mask.any():
            raise ValueError("domain has no open cells")
        if self.open_mask.all():
            raise ValueError("domain must be a proper subset of the grid")
        # blocked edges must join two open cells
        be = self.blocked_east.copy()
        be[:, :-1] &= ~(self.open_mask[:, :-1] & self.open_mask[:, 1:])
        be[:, -1] = self.blocked_east[:, -1]
        if be.any():
            raise ValueError("blocked east edge without two open cells")
        bn = self.blocked_north.copy()
        bn[:-1, :] &= ~(self.open_mask[:-1, :] & self.open_mask[1:, :])
        bn[-1, :] = self.blocked_north[-1, :]
        if bn.any():
            raise ValueError("blocked north edge without two open cells")
        ncomp, _ = csgraph.connected_components(self.adjacency, directed=False)
        if ncomp != 1:
            raise ValueError(f"domain is not connected ({ncomp} components)")

    # -- basic geometry ------------------------------------------------------

    @property
    def h(self) -> float:
        return self.spec.h

    @cached_property
    def n_cells(self) -> int:
        return int(self.open_mask.sum())

    @cached_property
    def cell_id(self) -> np.ndarray:
        """(ny, nx) map from grid position to dense cell id (-1 if closed)."""
        cid = np.full(self.open_mask.shape, -1, dtype=np.int64)
        cid[self.open_mask] = np.arange(self.n_cells)
        return cid

    @cached_property
    def cells_ij(self) -> np.ndarray:
        """(n, 2) integer (i, j) per dense cell id."""
        j, i = np.nonzero(self.open_mask)
        return np.column_stack([i, j])

    @cached_property
    def centers(self) -> np.ndarray:
        """(n, 2) cell centers per dense cell id."""
        ij = self.cells_ij
        x = self.spec.origin[0] + (ij[:, 0] + 0.5) * self.h
        y = self.spec.origin[1] + (ij[:, 1] + 0.5) * self.h
        return np.column_stack([x, y])

    @cached_property
    def weights(self) -> np.ndarray:
        """Positive weight per dense cell id."""
        w = self.weight_spec.evaluate(self.centers)
        if not (w > 0).all():
            raise ValueError("cell weights must be positive")
        return w

    @cached_property
    def measures(self) -> np.ndarray:
        """mu(cell) = w(cell) * h^2 per dense cell id."""
        return self.weights * self.h * self.h

    @cached_property
    def trusted(self) -> np.ndarray:
        """Bool per dense cell id: not in the truncation shadow."""
        return ~self.untrusted_mask[self.open_mask]

    def cell_index(self, pos) -> int:
        """Dense id of the open cell containing a point."""
        i, j = self.spec.cell_of(pos)
        if 0 <= i < self.spec.nx and 0 <= j < self.spec.ny and self.open_mask[j, i]:
            return int(self.cell_id[j, i])
        raise NotInDomain(f"point {tuple(pos)} is not in an open cell")

    def contains(self, pos) -> bool:
        i, j = self.spec.cell_of(pos)
        return (0 <= i < self.spec.nx and 0 <= j < self.spec.ny
                and bool(self.open_mask[j, i]))

    # -- adjacency structures ------------------------------------------------

    @cached_property
    def edge_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """Unblocked 4-neighbor adjacency as (u, v) dense-id arrays."""
        cid = self.cell_id
        om = self.open_mask
        east = om[:, :-1] & om[:, 1:] & ~self.blocked_east[:, :-1]
        north = om[:-1, :] & om[1:, :] & ~self.blocked_north[:-1, :]
        ue = cid[:, :-1][east]
        ve = cid[:, 1:][east]
        un = cid[:-1, :][north]
        vn = cid[1:, :][north]
        return np.concatenate([ue, un]), np.concatenate([ve, vn])

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        """Symmetric unit-weight adjacency over dense cell ids."""
        u, v = self.edge_pairs
        n = self.n_cells
        data = np.ones(len(u) * 2)
        return sparse.csr_matrix(
            (data, (np.concatenate([u, v]), np.concatenate([v, u]))), shape=(n, n)
        )

    def _diag_ok(self, di: int, dj: int) -> np.ndarray:
        """(ny, nx) mask: diagonal step (di, dj) from each cell is passable.

        Both L-shaped orthogonal routes must be open and unblocked, so a
        diagonal can never cut across a wall corner.
        """
        om, be, bn = self.open_mask, self.blocked_east, self.blocked_north
        ny, nx = om.shape

        def shift(a, di_, dj_):
            out = np.zeros_like(a)
            src_j = slice(max(0, -dj_), ny - max(0, dj_))
            src_i = slice(max(0, -di_), nx - max(0, di_))
            dst_j = slice(max(0, dj_), ny - max(0, -dj_))
            dst_i = slice(max(0, di_), nx - max(0, -di_))
            out[src_j, src_i] = a[dst_j, dst_i]
            return out

        def step_e(sign):  # east edge of cell, or of west neighbor
            return be if sign > 0 else shift(be, -1, 0)

        def step_n(sign):
            return bn if sign > 0 else shift(bn, 0, -1)

        via_h = (shift(om, di, 0) & ~step_e(di)
                 & shift(~step_n(dj), di, 0))
        via_v = (shift(om, 0, dj) & ~step_n(dj)
                 & shift(~step_e(di), 0, dj))
        dest = shift(om, di, dj)
        return om & dest & via_h & via_v

    def _octile_graph(self, trusted_only: bool) -> sparse.csr_matrix:
        """8-neighbor graph with Euclidean edge lengths."""
        cid = self.cell_id
        om = self.open_mask.copy()
        if trusted_only:
            om &= ~self.untrusted_mask
        h = self.h
        rows, cols, data = [], [], []

        east = om[:, :-1] & om[:, 1:] & ~self.blocked_east[:, :-1]
        rows.append(cid[:, :-1][east]); cols.append(cid[:, 1:][east])
        north = om[:-1, :] & om[1:, :] & ~self.blocked_north[:-1, :]
        rows.append(cid[:-1, :][north]); cols.append(cid[1:, :][north])
        n_ortho = sum(len(r) for r in rows)

        for di, dj in ((1, 1), (1, -1)):
            ok = self._diag_ok(di, dj)
            if trusted_only:
                ok &= om
            jj, ii = np.nonzero(ok)
            jd, idd = jj + dj, ii + di
            keep = (0 <= jd) & (jd < om.shape[0]) & (0 <= idd) & (idd < om.shape[1])
            jj, ii, jd, idd = jj[keep], ii[keep], jd[keep], idd[keep]
            if trusted_only:
                keep2 = om[jd, idd]
                jj, ii, jd, idd = jj[keep2], ii[keep2], jd[keep2], idd[keep2]
            rows.append(cid[jj, ii]); cols.append(cid[jd, idd])

        u = np.concatenate(rows)
        v = np.concatenate(cols)
        w = np.concatenate([
            np.full(n_ortho, h),
            np.full(len(u) - n_ortho, h * SQRT2),
        ])
        n = self.n_cells
        g = sparse.csr_matrix(
            (np.concatenate([w, w]),
             (np.concatenate([u, v]), np.concatenate([v, u]))),
            shape=(n, n),
        )
        return g

    @cached_property
    def octile(self) -> sparse.csr_matrix:
        return self._octile_graph(trusted_only=False)

    @cached_property
    def octile_trusted(self) -> sparse.csr_matrix:
        return self._octile_graph(trusted_only=True)

    # -- boundary features ---------------------------------------------------

    @cached_property
    def boundary_features(self) -> np.ndarray:
        """(m, 2) points on the boundary: midpoints of walls and of faces
        between open cells and the complement (closed cells or grid edge)."""
        x0, y0 = self.spec.origin
        h = self.h
        om = self.open_mask
        pts = []

        j, i = np.nonzero(self.blocked_east)
        pts.append(np.column_stack([x0 + (i + 1) * h, y0 + (j + 0.5) * h]))
        j, i = np.nonzero(self.blocked_north)
        pts.append(np.column_stack([x0 + (i + 0.5) * h, y0 + (j + 1) * h]))

        closed = ~om
        # east-facing complement faces (incl. grid border)
        face = om & np.concatenate([closed[:, 1:], np.ones((om.shape[0], 1), bool)], axis=1)
        j, i = np.nonzero(face)
        pts.append(np.column_stack([x0 + (i + 1) * h, y0 + (j + 0.5) * h]))
        face = om & np.concatenate([np.ones((om.shape[0], 1), bool), closed[:, :-1]], axis=1)
        j, i = np.nonzero(face)
        pts.append(np.column_stack([x0 + i * h, y0 + (j + 0.5) * h]))
        face = om & np.concatenate([closed[1:, :], np.ones((1, om.shape[1]), bool)], axis=0)
        j, i = np.nonzero(face)
        pts.append(np.column_stack([x0 + (i + 0.5) * h, y0 + (j + 1) * h]))
        face = om & np.concatenate([np.ones((1, om.shape[1]), bool), closed[:-1, :]], axis=0)
        j, i = np.nonzero(face)
        pts.append(np.column_stack([x0 + (i + 0.5) * h, y0 + j * h]))

        return np.vstack(pts)

    @cached_property
    def _feature_tree(self) -> cKDTree:
        return cKDTree(self.boundary_features)

    @cached_property
    def delta(self) -> np.ndarray:
        """Distance from each cell center to the boundary (error <= h/2).

        Walls are part of the complement, so this is a straight Euclidean
        minimum over boundary feature points; no visibility is involved.
        """
        d, _ = self._feature_tree.query(self.centers)
        return d

    def dist_to_boundary(self, pos) -> float:
        d, _ = self._feature_tree.query(np.asarray(pos, dtype=float))
        return float(d)

    @cached_property
    def boundary_adjacent(self) -> np.ndarray:
        """Bool per dense id: cell has a wall or complement face."""
        return self.delta <= 0.5 * self.h + 1e-12 * self.h

    @cached_property
    def diameter(self) -> float:
        c = self.centers
        lo = c.min(axis=0)
        hi = c.max(axis=0)
        return float(np.hypot(*(hi - lo)))

    @cached_property
    def total_measure(self) -> float:
        return float(self.measures.sum())

    # -- line of sight ---------------------------------------------------------

    def _corner_passable(self, ci: int, cj: int, dx: float, dy: float) -> bool:
        """A segment crossing exactly through lattice corner (ci, cj)
        with direction (dx, dy) can pass iff one of the two L-routes
        around the corner is open and unblocked."""
        om, be, bn = self.open_mask, self.blocked_east, self.blocked_north
        ny, nx = om.shape
        si = 1 if dx > 0 else -1
        sj = 1 if dy > 0 else -1
        # quadrant cells before and after the corner
        pi = ci - 1 if si > 0 else ci
        pj = cj - 1 if sj > 0 else cj
        qi = ci if si > 0 else ci - 1
        qj = cj if sj > 0 else cj - 1
        for mi, mj in ((qi, pj), (pi, qj)):
            if not (0 <= mi < nx and 0 <= mj < ny and om[mj, mi]):
                continue
            def edge_clear(a, b):
                (ai, aj), (bi, bj) = a, b
                if not (0 <= bi < nx and 0 <= bj < ny and om[bj, bi]):
                    return False
                if bi == ai + 1:
                    return not be[aj, ai]
                if bi == ai - 1:
                    return not be[aj, ai - 1]
                if bj == aj + 1:
                    return not bn[aj, ai]
                return not bn[aj - 1, ai]
            if edge_clear((pi, pj), (mi, mj)) and edge_clear((mi, mj), (qi, qj)):
                return True
        return False

    def line_of_sight(self, p, q, forgive_radius: float = 0.0,
                      block_untrusted: bool = False) -> bool:
        """True when the open segment p->q crosses no wall and stays in
        open cells.  Crossings within ``forgive_radius`` of q are ignored
        (q may sit on the boundary).  A lattice-corner hit passes only
        when an open L-route exists around the corner."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        h = self.h
        x0, y0 = self.spec.origin
        d = q - p
        seg = math.hypot(d[0], d[1])
        if seg == 0.0:
            return True
        eps = 1e-9 * h

        ts = [np.array([0.0, 1.0])]
        if abs(d[0]) > 0:
            i_lo = int(math.ceil((min(p[0], q[0]) - x0) / h + 1e-12))
            i_hi = int(math.floor((max(p[0], q[0]) - x0) / h - 1e-12))
            if i_hi >= i_lo:
                gx = x0 + np.arange(i_lo, i_hi + 1) * h
                ts.append((gx - p[0]) / d[0])
        if abs(d[1]) > 0:
            j_lo = int(math.ceil((min(p[1], q[1]) - y0) / h + 1e-12))
            j_hi = int(math.floor((max(p[1], q[1]) - y0) / h - 1e-12))
            if j_hi >= j_lo:
                gy = y0 + np.arange(j_lo, j_hi + 1) * h
                ts.append((gy - p[1]) / d[1])
        t = np.unique(np.clip(np.concatenate(ts), 0.0, 1.0))

        # wall crossings at each grid-line event
        pts = p[None, :] + t[:, None] * d[None, :]
        forgiven = np.hypot(pts[:, 0] - q[0], pts[:, 1] - q[1]) <= forgive_radius + eps
        fx = (pts[:, 0] - x0) / h
        fy = (pts[:, 1] - y0) / h
        on_vline = np.abs(fx - np.round(fx)) * h < eps
        on_hline = np.abs(fy - np.round(fy)) * h < eps
        interior = (t > 0) & (t < 1)

        corner = interior & on_vline & on_hline & ~forgiven
        if corner.any():
            ci = np.round(fx[corner]).astype(int)
            cj = np.round(fy[corner]).astype(int)
            for a, b in zip(ci, cj):
                if not self._corner_passable(int(a), int(b), d[0], d[1]):
                    return False

        ny, nx = self.open_mask.shape
        vcross = interior & on_vline & ~on_hline & ~forgiven
        if vcross.any():
            gi = np.round(fx[vcross]).astype(int)
            gj = np.floor(fy[vcross]).astype(int)
            ok = (gi >= 1) & (gi <= nx - 1) & (gj >= 0) & (gj < ny)
            if not ok.all():
                return False
            if self.blocked_east[gj, gi - 1].any():
                return False
        hcross = interior & on_hline & ~on_vline & ~forgiven
        if hcross.any():
            gj = np.round(fy[hcross]).astype(int)
            gi = np.floor(fx[hcross]).astype(int)
            ok = (gj >= 1) & (gj <= ny - 1) & (gi >= 0) & (gi < nx)
            if not ok.all():
                return False
            if self.blocked_north[gj - 1, gi].any():
                return False

        # openness (and trust) of traversed cells, sampled between events
        tm = 0.5 * (t[:-1] + t[1:])
        mids = p[None, :] + tm[:, None] * d[None, :]
        keep = np.hypot(mids[:, 0] - q[0], mids[:, 1] - q[1]) > forgive_radius
        mids = mids[keep]
        if len(mids):
            gi = np.floor((mids[:, 0] - x0) / h).astype(int)
            gj = np.floor((mids[:, 1] - y0) / h).astype(int)
            inside = (gi >= 0) & (gi < nx) & (gj >= 0) & (gj < ny)
            if not inside.all():
                return False
            if not self.open_mask[gj, gi].all():
                return False
            if block_untrusted and self.untrusted_mask[gj, gi].any():
                return False
        return True

    def segment_cells(self, p, q) -> tuple[np.ndarray, np.ndarray]:
        """Supercover traversal of the segment p->q.

        Returns (cells, dist_to_q): grid (i, j) pairs the open segment
        passes through (corner hits contribute all four incident cells)
        and the distance from each cell's sampling point to q."""
        p = np.asarray(p, dtype=float)
        q = np.asarray(q, dtype=float)
        h = self.h
        x0, y0 = self.spec.origin
        d = q - p
        if d[0] == 0.0 and d[1] == 0.0:
            i, j = self.spec.cell_of(p)
            return np.array([[i, j]]), np.array([0.0])
        ts = [np.array([0.0, 1.0])]
        if abs(d[0]) > 0:
            i_lo = int(math.ceil((min(p[0], q[0]) - x0) / h + 1e-12))
            i_hi = int(math.floor((max(p[0], q[0]) - x0) / h - 1e-12))
            if i_hi >= i_lo:
                ts.append(((x0 + np.arange(i_lo, i_hi + 1) * h) - p[0]) / d[0])
        if abs(d[1]) > 0:
            j_lo = int(math.ceil((min(p[1], q[1]) - y0) / h + 1e-12))
            j_hi = int(math.floor((max(p[1], q[1]) - y0) / h - 1e-12))
            if j_hi >= j_lo:
                ts.append(((y0 + np.arange(j_lo, j_hi + 1) * h) - p[1]) / d[1])
        t = np.unique(np.clip(np.concatenate(ts), 0.0, 1.0))
        tm = 0.5 * (t[:-1] + t[1:])
        mids = p[None, :] + tm[:, None] * d[None, :]
        gi = np.floor((mids[:, 0] - x0) / h).astype(np.int64)
        gj = np.floor((mids[:, 1] - y0) / h).astype(np.int64)
        cells = [np.column_stack([gi, gj])]
        dists = [np.hypot(mids[:, 0] - q[0], mids[:, 1] - q[1])]
        # corner hits: add the two cells the midpoints miss
        pts = p[None, :] + t[1:-1, None] * d[None, :] if len(t) > 2 else np.empty((0, 2))
        if len(pts):
            fx = (pts[:, 0] - x0) / h
            fy = (pts[:, 1] - y0) / h
            eps = 1e-9
            corner = (np.abs(fx - np.round(fx)) < eps) & (np.abs(fy - np.round(fy)) < eps)
            if corner.any():
                ci = np.round(fx[corner]).astype(np.int64)
                cj = np.round(fy[corner]).astype(np.int64)
                extra = np.concatenate([
                    np.column_stack([ci - 1, cj]),
                    np.column_stack([ci, cj - 1]),
                ])
                cells.append(extra)
                dc = np.hypot(pts[corner, 0] - q[0], pts[corner, 1] - q[1])
                dists.append(np.concatenate([dc, dc]))
        return np.vstack(cells), np.concatenate(dists)

    @cached_property
    def open_neighbor_count(self) -> np.ndarray:
        """(ny, nx) count of open 4-neighbors per grid cell."""
        om = self.open_mask.astype(np.int8)
        cnt = np.zeros_like(om)
        cnt[:, :-1] += om[:, 1:]
        cnt[:, 1:] += om[:, :-1]
        cnt[:-1, :] += om[1:, :]
        cnt[1:, :] += om[:-1, :]
        return cnt

    # -- balls and measure ---------------------------------------------------

    def cells_within(self, center, r: float) -> np.ndarray:
        """Bool per dense id: cell center strictly within distance r."""
        c = self.centers
        return (c[:, 0] - center[0]) ** 2 + (c[:, 1] - center[1]) ** 2 < r * r

    def ball_measure(self, center, r: float) -> float:
        return float(self.measures[self.cells_within(center, r)].sum())


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the topological boundary, optionally with a unit vector
    hinting at which side of a wall is meant."""

    position: tuple[float, float]
    side_hint: tuple[float, float] | None = None

    def hinted(self) -> np.ndarray | None:
        if self.side_hint is None:
            return None
        v = np.asarray(self.side_hint, dtype=float)
        n = np.hypot(*v)
        return v / n if n > 0 else None


def check_boundary_point(domain: GridDomain, point: BoundaryPoint) -> None:
    """Validate the boundary-point contract against a domain.

    The proximity threshold is 2.5h rather than sqrt2 h: next to slanted
    walls the nearest open cell center can sit up to ~2h away."""
    pos = np.asarray(point.position, dtype=float)
    near_feature = domain.dist_to_boundary(pos) <= 0.75 * domain.h
    if domain.contains(pos) and not near_feature:
        raise NotABoundaryPoint(f"{tuple(pos)} lies inside the domain")
    d = np.min(np.hypot(domain.centers[:, 0] - pos[0], domain.centers[:, 1] - pos[1]))
    if d > 2.5 * domain.h + 1e-12:
        raise NotABoundaryPoint(f"{tuple(pos)} is too far from the domain")


@dataclass
class MassExponents:
    """Empirical mass-bound exponents from ball-measure scaling."""

    Q_upper: float
    q_lower: float
    pointwise: dict[tuple[float, float], tuple[float, float]]

    def __post_init__(self):
        if not (0 < self.q_lower <= self.Q_upper):
            raise ValueError("exponents must satisfy 0 < q_lower <= Q_upper")


def dyadic_ladder(r_max: float, r_min: float) -> np.ndarray:
    """Radii r_max, r_max/2, ... down to r_min; the exact floor is
    appended when the dyadic descent does not land on it."""
    if r_min <= 0 or r_max < r_min:
        raise RadiusLadderEmpty(f"empty ladder [{r_min}, {r_max}]")
    k = int(math.floor(math.log2(r_max / r_min))) + 1
    radii = r_max * np.power(2.0, -np.arange(k))
    if radii[-1] > r_min * (1 + 1e-9):
        radii = np.append(radii, r_min)
    return radii


def estimate_mass_exponents(
    domain: GridDomain,
    samples: list[tuple[float, float]],
    r_min: float | None = None,
    r_max: float | None = None,
) -> MassExponents:
    """Least-squares slope of log mu(B(x, r)) against log r per sample,
    over a dyadic radius ladder."""
    if not samples:
        raise RadiusLadderEmpty("no sample points")
    h = domain.h
    r_min = 4 * h if r_min is None else r_min
    r_max = domain.diameter / 4 if r_max is None else r_max
    if r_min < 4 * h:
        raise RadiusLadderEmpty("r_min below 4h is not resolvable")
    radii = dyadic_ladder(r_max, r_min)
    if len(radii) < 3:
        raise RadiusLadderEmpty("ladder needs at least 3 rungs")

    pointwise = {}
    slopes = []
    margins = []
    for pt in samples:
        mu = np.array([domain.ball_measure(pt, r) for r in radii])
        ok = mu > 0
        if ok.sum() < 3:
            raise RadiusLadderEmpty(f"sample {pt} has empty balls on the ladder")
        lx = np.log(radii[ok])
        ly = np.log(mu[ok])
        slope, intercept = np.polyfit(lx, ly, 1)
        resid = ly - (slope * lx + intercept)
        margin = 2.0 * float(np.sqrt(np.mean(resid**2)))
        pointwise[tuple(float(v) for v in pt)] = (float(slope - margin), float(slope + margin))
        slopes.append(float(slope))
        margins.append(margin)

    Q_upper = max(s + m for s, m in zip(slopes, margins))
    q_lower = min(s - m for s, m in zip(slopes, margins))
    q_lower = max(q_lower, 1e-6)
    return MassExponents(Q_upper=Q_upper, q_lower=q_lower, pointwise=pointwise)
