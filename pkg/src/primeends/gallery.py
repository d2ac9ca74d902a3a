"""Builders for the example domains.

Every build is a pure function of (name, h, depth, params): identical
arguments produce bit-identical domains.  Axis-aligned removed segments
land exactly on grid lines (the builders insist on compatible h);
oblique segments rasterize to blocked-edge staircases within h/2.

Infinite families of removed segments are truncated at ``depth``.  The
region that the unrealized tail of the family would occupy is marked
untrusted: cells there exist only as a truncation artifact and no
boundary contact is ever certified through them.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.sparse import csgraph

from .domain import GridDomain, GridSpec, WeightSpec
from .errors import ResolutionTooCoarse, UnknownGallery

PAD = 2  # closed cells around every build; keeps the domain a proper subset

GALLERY_INFO = {
    "unit_square": "open unit square (0,1)^2",
    "disk": "open unit disk",
    "slit_disk": "unit disk minus the radius (-1,0] x {0}",
    "topologist_comb": "unit square minus teeth [1/2,1) x {2^-k}",
    "double_equilateral_comb":
        "unit square minus (0,3/4] x {2^-n} and [1/4,1) x {3*2^-n-2}",
    "double_comb":
        "unit square minus (0,1-2^-n] x {2^-n} and [2^-n,1) x {3*2^-n-2}",
    "shrinking_pins": "unit square minus pins y=kx, 0<x<=1/(2k^2)",
    "accumulating_pins":
        "rectangle (-1,1)x(0,1) minus pins {2^-k} x (0,1/2]",
    "jana_two_limits":
        "rectangle (-1,1)x(0,1) with interleaved three-wall levels",
    "cubic_cusp": "outward cusp 0 < y < x^3 < 1",
    "inward_cusp": "unit disk minus the inward spike 0 <= y <= x^3",
}


def gallery_names() -> list[str]:
    return list(GALLERY_INFO)


def _square_spec(h: float, xmin: float, xmax: float, ymin: float, ymax: float) -> GridSpec:
    nx = int(round((xmax - xmin) / h))
    ny = int(round((ymax - ymin) / h))
    if abs(nx * h - (xmax - xmin)) > 1e-9 * h or abs(ny * h - (ymax - ymin)) > 1e-9 * h:
        raise ResolutionTooCoarse(f"h={h} does not tile [{xmin},{xmax}]x[{ymin},{ymax}]")
    origin = (xmin - PAD * h, ymin - PAD * h)
    return GridSpec(nx=nx + 2 * PAD, ny=ny + 2 * PAD, h=h, origin=origin)


def _grid_line(spec: GridSpec, value: float, axis: str) -> int:
    """Integer grid-line index for an exact wall coordinate."""
    o = spec.origin[0] if axis == "x" else spec.origin[1]
    k = (value - o) / spec.h
    ki = int(round(k))
    if abs(k - ki) > 1e-7:
        raise ResolutionTooCoarse(
            f"wall at {axis}={value} does not lie on a grid line for h={spec.h}")
    return ki


def _wall_h(spec: GridSpec, bn: np.ndarray, y: float, x_lo: float, x_hi: float):
    """Block north edges along the horizontal segment [x_lo, x_hi] x {y}.

    A face is blocked when its midpoint lies inside (x_lo, x_hi); segment
    ends within h/4 of a face boundary resolve to the nearer face edge.
    """
    j = _grid_line(spec, y, "y")
    if not (1 <= j <= spec.ny - 1):
        raise ResolutionTooCoarse(f"wall y={y} outside grid")
    x0 = spec.origin[0]
    i_lo = int(math.ceil((x_lo - x0) / spec.h - 0.5 + 1e-7))
    i_hi = int(math.floor((x_hi - x0) / spec.h - 0.5 - 1e-7))
    if i_hi < i_lo:
        raise ResolutionTooCoarse(f"wall [{x_lo},{x_hi}]x{{{y}}} shorter than one face")
    bn[j - 1, i_lo:i_hi + 1] = True


def _wall_v(spec: GridSpec, be: np.ndarray, x: float, y_lo: float, y_hi: float):
    i = _grid_line(spec, x, "x")
    if not (1 <= i <= spec.nx - 1):
        raise ResolutionTooCoarse(f"wall x={x} outside grid")
    y0 = spec.origin[1]
    j_lo = int(math.ceil((y_lo - y0) / spec.h - 0.5 + 1e-7))
    j_hi = int(math.floor((y_hi - y0) / spec.h - 0.5 - 1e-7))
    if j_hi < j_lo:
        raise ResolutionTooCoarse(f"wall {{{x}}}x[{y_lo},{y_hi}] shorter than one face")
    be[j_lo:j_hi + 1, i - 1] = True


def _wall_segment(spec: GridSpec, be: np.ndarray, bn: np.ndarray, p, q):
    """Staircase rasterization of an oblique wall: block every grid face
    the segment crosses; a lattice-corner hit blocks all four faces at
    the corner so nothing can slip through."""
    x0, y0 = spec.origin
    h = spec.h
    px, py = p
    qx, qy = q
    dx, dy = qx - px, qy - py
    events = [0.0, 1.0]
    if dx != 0.0:
        i_lo = int(math.ceil((min(px, qx) - x0) / h + 1e-12))
        i_hi = int(math.floor((max(px, qx) - x0) / h - 1e-12))
        events.extend(((x0 + i * h) - px) / dx for i in range(i_lo, i_hi + 1))
    if dy != 0.0:
        j_lo = int(math.ceil((min(py, qy) - y0) / h + 1e-12))
        j_hi = int(math.floor((max(py, qy) - y0) / h - 1e-12))
        events.extend(((y0 + j * h) - py) / dy for j in range(j_lo, j_hi + 1))
    eps = 1e-9
    for t in sorted(set(events)):
        if t <= 0.0 or t >= 1.0:
            continue
        x = px + t * dx
        y = py + t * dy
        fi = (x - x0) / h
        fj = (y - y0) / h
        on_v = abs(fi - round(fi)) < eps
        on_h = abs(fj - round(fj)) < eps
        if on_v and on_h:
            i, j = int(round(fi)), int(round(fj))
            if 1 <= i <= spec.nx - 1 and 1 <= j <= spec.ny - 1:
                be[j - 1, i - 1] = be[j, i - 1] = True
                bn[j - 1, i - 1] = bn[j - 1, i] = True
        elif on_v:
            i, j = int(round(fi)), int(math.floor(fj))
            if 1 <= i <= spec.nx - 1 and 0 <= j <= spec.ny - 1:
                be[j, i - 1] = True
        elif on_h:
            j, i = int(round(fj)), int(math.floor(fi))
            if 1 <= j <= spec.ny - 1 and 0 <= i <= spec.nx - 1:
                bn[j - 1, i] = True


def _clip_walls(om: np.ndarray, be: np.ndarray, bn: np.ndarray):
    """Drop blocked edges that no longer join two open cells."""
    pair_e = np.zeros_like(om)
    pair_e[:, :-1] = om[:, :-1] & om[:, 1:]
    be &= pair_e
    pair_n = np.zeros_like(om)
    pair_n[:-1, :] = om[:-1, :] & om[1:, :]
    bn &= pair_n


def _interior_rect(spec: GridSpec) -> np.ndarray:
    om = np.zeros((spec.ny, spec.nx), dtype=bool)
    om[PAD:spec.ny - PAD, PAD:spec.nx - PAD] = True
    return om


def _rect_mask(spec: GridSpec, x_lo, x_hi, y_lo, y_hi) -> np.ndarray:
    c = spec.centers()
    return ((c[..., 0] > x_lo) & (c[..., 0] < x_hi)
            & (c[..., 1] > y_lo) & (c[..., 1] < y_hi))


def _keep_main_component(om, be, bn, spec, anchor) -> tuple[np.ndarray, np.ndarray]:
    """Restrict the open mask to the component containing ``anchor``;
    also return the dropped cells (rasterization debris)."""
    cid = np.full(om.shape, -1, dtype=np.int64)
    n = int(om.sum())
    cid[om] = np.arange(n)
    east = om[:, :-1] & om[:, 1:] & ~be[:, :-1]
    north = om[:-1, :] & om[1:, :] & ~bn[:-1, :]
    import scipy.sparse as sp
    u = np.concatenate([cid[:, :-1][east], cid[:-1, :][north]])
    v = np.concatenate([cid[:, 1:][east], cid[1:, :][north]])
    g = sp.csr_matrix((np.ones(len(u)), (u, v)), shape=(n, n))
    _, labels = csgraph.connected_components(g, directed=False)
    ai = int(math.floor((anchor[0] - spec.origin[0]) / spec.h))
    aj = int(math.floor((anchor[1] - spec.origin[1]) / spec.h))
    if not om[aj, ai]:
        raise ResolutionTooCoarse(f"anchor {anchor} not open")
    keep = labels == labels[cid[aj, ai]]
    out = np.zeros_like(om)
    out[om] = keep
    return out, om & ~out


def _check_pow2(h: float, depth: int):
    m = -math.log2(h)
    if abs(m - round(m)) > 1e-9:
        raise ResolutionTooCoarse(f"this build needs h = 2^-m, got h={h}")
    if 2.0 ** (-depth) < 2 * h:
        raise ResolutionTooCoarse(
            f"features at depth {depth} need h <= 2^-{depth + 1}, got {h}")
    return int(round(m))


def build_gallery(name: str, h: float, params: dict | None = None) -> GridDomain:
    """Build one of the named example domains at spacing h."""
    params = dict(params or {})
    depth = int(params.pop("depth", 7))
    weight = params.pop("weight", None)
    if isinstance(weight, dict):
        weight = WeightSpec(kind=weight.get("kind", "const"),
                            params=weight.get("params", {}))
    if params:
        raise UnknownGallery(f"unknown parameters {sorted(params)} for {name!r}")
    if name not in GALLERY_INFO:
        raise UnknownGallery(f"unknown gallery domain {name!r}")
    builder = _BUILDERS[name]
    return builder(h, depth, weight)


def _build_unit_square(h, depth, weight):
    spec = _square_spec(h, 0.0, 1.0, 0.0, 1.0)
    return GridDomain(spec, _interior_rect(spec), weight=weight, name="unit_square")


def _build_disk(h, depth, weight):
    n = int(math.ceil(1.0 / h))
    spec = _square_spec(h, -n * h, n * h, -n * h, n * h)
    c = spec.centers()
    om = (c[..., 0] ** 2 + c[..., 1] ** 2) < 1.0
    return GridDomain(spec, om, weight=weight, name="disk")


def _build_slit_disk(h, depth, weight):
    n = int(math.ceil(1.0 / h))
    if abs(n * h - 1.0) > 1e-9:
        raise ResolutionTooCoarse("slit_disk needs 1/h integral")
    spec = _square_spec(h, -1.0, 1.0, -1.0, 1.0)
    c = spec.centers()
    om = (c[..., 0] ** 2 + c[..., 1] ** 2) < 1.0
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    _wall_h(spec, bn, 0.0, -1.0, 0.0)
    _clip_walls(om, be, bn)
    return GridDomain(spec, om, be, bn, weight=weight, name="slit_disk")


def _build_topologist_comb(h, depth, weight):
    _check_pow2(h, depth)
    spec = _square_spec(h, 0.0, 1.0, 0.0, 1.0)
    om = _interior_rect(spec)
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    for k in range(1, depth + 1):
        _wall_h(spec, bn, 2.0 ** -k, 0.5, 1.0)
    untrusted = _rect_mask(spec, 0.5, 1.0, 0.0, 2.0 ** -depth) & om
    return GridDomain(spec, om, be, bn, weight=weight,
                      name="topologist_comb", untrusted_mask=untrusted)


def _build_double_equilateral_comb(h, depth, weight):
    _check_pow2(h, depth + 2)
    spec = _square_spec(h, 0.0, 1.0, 0.0, 1.0)
    om = _interior_rect(spec)
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    for n in range(1, depth + 1):
        _wall_h(spec, bn, 2.0 ** -n, 0.0, 0.75)
        _wall_h(spec, bn, 3.0 * 2.0 ** (-n - 2), 0.25, 1.0)
    untrusted = _rect_mask(spec, 0.0, 1.0, 0.0, 3.0 * 2.0 ** (-depth - 2)) & om
    return GridDomain(spec, om, be, bn, weight=weight,
                      name="double_equilateral_comb", untrusted_mask=untrusted)


def _build_double_comb(h, depth, weight):
    _check_pow2(h, depth + 2)
    spec = _square_spec(h, 0.0, 1.0, 0.0, 1.0)
    om = _interior_rect(spec)
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    for n in range(1, depth + 1):
        _wall_h(spec, bn, 2.0 ** -n, 0.0, 1.0 - 2.0 ** -n)
        _wall_h(spec, bn, 3.0 * 2.0 ** (-n - 2), 2.0 ** -n, 1.0)
    untrusted = _rect_mask(spec, 0.0, 1.0, 0.0, 3.0 * 2.0 ** (-depth - 2)) & om
    return GridDomain(spec, om, be, bn, weight=weight,
                      name="double_comb", untrusted_mask=untrusted)


def _build_shrinking_pins(h, depth, weight):
    spec = _square_spec(h, 0.0, 1.0, 0.0, 1.0)
    om = _interior_rect(spec)
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    for k in range(1, depth + 1):
        tip = (1.0 / (2 * k * k), 1.0 / (2 * k))
        if math.hypot(*tip) < 2 * h:
            raise ResolutionTooCoarse(
                f"pin {k} is shorter than 2h at h={h}; lower depth or refine")
        _wall_segment(spec, be, bn, (0.0, 0.0), tip)
    om, debris = _keep_main_component(om, be, bn, spec, (0.5, 0.5))
    _clip_walls(om, be, bn)
    return GridDomain(spec, om, be, bn, weight=weight, name="shrinking_pins",
                      debris_mask=debris)


def _build_accumulating_pins(h, depth, weight):
    m = _check_pow2(h, depth)
    spec = _square_spec(h, -1.0, 1.0, 0.0, 1.0)
    om = _interior_rect(spec)
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    _wall_v(spec, be, 0.0, 0.0, 0.5)
    for k in range(1, depth + 1):
        _wall_v(spec, be, 2.0 ** -k, 0.0, 0.5)
    untrusted = _rect_mask(spec, 0.0, 2.0 ** -depth, 0.0, 0.5) & om
    return GridDomain(spec, om, be, bn, weight=weight,
                      name="accumulating_pins", untrusted_mask=untrusted)


def _build_jana_two_limits(h, depth, weight):
    _check_pow2(h, depth + 1)
    spec = _square_spec(h, -1.0, 1.0, 0.0, 1.0)
    om = _interior_rect(spec)
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    for k in range(1, depth + 1):
        _wall_h(spec, bn, 2.0 ** -k, -1.0, -(2.0 ** -k))
        _wall_h(spec, bn, 2.0 ** -k, 2.0 ** -k, 1.0)
        _wall_h(spec, bn, 3.0 * 2.0 ** (-k - 1), -1.0 + 2.0 ** -k, 1.0 - 2.0 ** -k)
    untrusted = _rect_mask(spec, -1.0, 1.0, 0.0, 2.0 ** -depth) & om
    return GridDomain(spec, om, be, bn, weight=weight,
                      name="jana_two_limits", untrusted_mask=untrusted)


def _build_cubic_cusp(h, depth, weight):
    spec = _square_spec(h, 0.0, 1.0, 0.0, 1.0)
    c = spec.centers()
    om = ((c[..., 1] > 0) & (c[..., 1] < c[..., 0] ** 3)
          & (c[..., 0] < 1.0) & (c[..., 0] > 0))
    if not om.any():
        raise ResolutionTooCoarse("cusp not resolvable at this h")
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    om, debris = _keep_main_component(om, be, bn, spec, (0.9, 0.9 ** 3 / 2))
    return GridDomain(spec, om, weight=weight, name="cubic_cusp",
                      debris_mask=debris)


def _build_inward_cusp(h, depth, weight):
    n = int(math.ceil(1.0 / h))
    spec = _square_spec(h, -n * h, n * h, -n * h, n * h)
    c = spec.centers()
    om = (c[..., 0] ** 2 + c[..., 1] ** 2) < 1.0
    spike = (c[..., 0] >= 0) & (c[..., 1] >= 0) & (c[..., 1] <= c[..., 0] ** 3)
    om &= ~spike
    be = np.zeros_like(om)
    bn = np.zeros_like(om)
    om, debris = _keep_main_component(om, be, bn, spec, (-0.5, 0.0))
    return GridDomain(spec, om, weight=weight, name="inward_cusp",
                      debris_mask=debris)


_BUILDERS = {
    "unit_square": _build_unit_square,
    "disk": _build_disk,
    "slit_disk": _build_slit_disk,
    "topologist_comb": _build_topologist_comb,
    "double_equilateral_comb": _build_double_equilateral_comb,
    "double_comb": _build_double_comb,
    "shrinking_pins": _build_shrinking_pins,
    "accumulating_pins": _build_accumulating_pins,
    "jana_two_limits": _build_jana_two_limits,
    "cubic_cusp": _build_cubic_cusp,
    "inward_cusp": _build_inward_cusp,
}
