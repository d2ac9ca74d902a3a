"""Figure rendering for reports.

Figures are drawn with matplotlib and written as SVG next to the
delimited outputs.  The SVG metadata date is stripped so repeated runs
produce stable files.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection

from .domain import GridDomain
from .regions import RegionSet

_SAVE_KW = {"metadata": {"Date": None}, "bbox_inches": "tight"}


def _wall_segments(dom: GridDomain) -> list:
    x0, y0 = dom.spec.origin
    h = dom.h
    segs = []
    j, i = np.nonzero(dom.blocked_east)
    for a, b in zip(i, j):
        x = x0 + (a + 1) * h
        segs.append([(x, y0 + b * h), (x, y0 + (b + 1) * h)])
    j, i = np.nonzero(dom.blocked_north)
    for a, b in zip(i, j):
        y = y0 + (b + 1) * h
        segs.append([(x0 + a * h, y), (x0 + (a + 1) * h, y)])
    return segs


def _extent(dom: GridDomain):
    x0, y0 = dom.spec.origin
    return (x0, x0 + dom.spec.nx * dom.h, y0, y0 + dom.spec.ny * dom.h)


def _domain_axes(ax, dom: GridDomain):
    img = np.full(dom.open_mask.shape, np.nan)
    img[dom.open_mask] = 0.82
    img[dom.untrusted_mask] = 0.6
    ax.imshow(img, origin="lower", extent=_extent(dom), cmap="gray",
              vmin=0, vmax=1, interpolation="nearest")
    segs = _wall_segments(dom)
    if segs:
        ax.add_collection(LineCollection(segs, colors="k", linewidths=1.0))
    ax.set_aspect("equal")
    ax.set_xlabel("x")
    ax.set_ylabel("y")


def render_domain(dom: GridDomain, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    _domain_axes(ax, dom)
    ax.set_title(dom.name)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_potential(dom: GridDomain, potential: np.ndarray, path: str | Path,
                     title: str = "potential") -> Path:
    fig, ax = plt.subplots(figsize=(5.4, 5))
    img = np.full(dom.open_mask.shape, np.nan)
    img[dom.open_mask] = potential
    m = ax.imshow(img, origin="lower", extent=_extent(dom), cmap="viridis",
                  vmin=0, vmax=1, interpolation="nearest")
    segs = _wall_segments(dom)
    if segs:
        ax.add_collection(LineCollection(segs, colors="k", linewidths=0.8))
    fig.colorbar(m, ax=ax, shrink=0.85)
    ax.set_aspect("equal")
    ax.set_title(title)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_chain(dom: GridDomain, levels, path: str | Path,
                 title: str = "chain levels") -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    _domain_axes(ax, dom)
    cmap = plt.get_cmap("plasma")
    n = max(len(levels), 1)
    for k, (reg, scale) in enumerate(levels):
        pts = reg.centers if isinstance(reg, RegionSet) else dom.centers[reg]
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=1.2,
                color=cmap(k / n), label=f"scale {scale:.3g}" if k < 6 else None)
    ax.legend(loc="upper right", fontsize=7, markerscale=6)
    ax.set_title(title)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_series(xs, ys, path: str | Path, xlabel: str = "scale",
                  ylabel: str = "value", title: str = "", loglog: bool = True) -> Path:
    fig, ax = plt.subplots(figsize=(5, 3.4))
    if loglog:
        ax.loglog(xs, ys, "o-")
    else:
        ax.plot(xs, ys, "o-")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    if title:
        ax.set_title(title)
    ax.grid(True, which="both", alpha=0.3)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_atlas(dom: GridDomain, atlas, path: str | Path) -> Path:
    fig, ax = plt.subplots(figsize=(5.6, 5.6))
    _domain_axes(ax, dom)
    cmap = plt.get_cmap("tab20")
    for c in atlas.clusters:
        pts = dom.centers[c.members]
        ax.plot(pts[:, 0], pts[:, 1], ".", ms=1.5, color=cmap(c.index % 20))
        ax.plot(*c.anchor.position, "x", ms=5, color="red")
    ax.set_title(f"{dom.name}: {len(atlas.clusters)} boundary clusters "
                 f"(tau={atlas.tau:.3g})")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path


def render_path(dom: GridDomain, polyline: np.ndarray, path: str | Path,
                title: str = "witness path") -> Path:
    fig, ax = plt.subplots(figsize=(5, 5))
    _domain_axes(ax, dom)
    ax.plot(polyline[:, 0], polyline[:, 1], "-", color="crimson", lw=1.4)
    ax.plot(polyline[0, 0], polyline[0, 1], "o", color="crimson", ms=4)
    ax.plot(polyline[-1, 0], polyline[-1, 1], "s", color="navy", ms=4)
    ax.set_title(title)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fig.savefig(path, **_SAVE_KW)
    plt.close(fig)
    return path
