"""Named chains on the gallery domains.

Each builder realizes a geometric family of nested sets down to the
resolvable scale of the given domain.
"""

from __future__ import annotations

import numpy as np

from .domain import BoundaryPoint, GridDomain
from .ends import DiscreteChain
from .errors import UnknownGallery
from .regions import RegionSet, ball, components


def _connected_containing(region: RegionSet, pos) -> RegionSet:
    comps = components(region)
    if len(comps) == 1:
        return comps[0]
    pts = np.asarray(pos, dtype=float)
    best = min(comps, key=lambda c: c.min_dist_to(pts))
    return best


def _rect_level(domain: GridDomain, x_lo, x_hi, y_lo, y_hi, anchor_pos) -> RegionSet:
    reg = RegionSet.from_rect(domain, x_lo, x_hi, y_lo, y_hi)
    return _connected_containing(reg, anchor_pos)


def _depth_for(domain: GridDomain, scale_of, floor_mult: float = 4.0) -> int:
    k = 1
    while scale_of(k + 1) >= floor_mult * domain.h:
        k += 1
    return k


def unit_square_bottom_strips(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """Strips (0,1) x (0, 1/k): nested full-width levels with a segment
    impression along the bottom edge."""
    depth = depth or _depth_for(domain, lambda k: 1.0 / k)
    levels = []
    for k in range(1, depth + 1):
        reg = _rect_level(domain, 0.0, 1.0, 0.0, 1.0 / k, (0.5, 0.01))
        levels.append((reg, 1.0 / k))
    return DiscreteChain(domain, levels, provenance="unit_square_bottom_strips")


def unit_square_bottom_balls(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """Half-balls at (1/2, 0) with radii 1/(2k)."""
    depth = depth or _depth_for(domain, lambda k: 0.5 / k)
    pt = BoundaryPoint((0.5, 0.0))
    levels = []
    for k in range(1, depth + 1):
        r = 0.5 / k
        reg = _connected_containing(ball(domain, (0.5, 0.0), r), (0.5, r / 2))
        levels.append((reg, r))
    return DiscreteChain(domain, levels, provenance="unit_square_bottom_balls", anchor=pt)


def comb_wide_levels(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """((1/2 - 2^-k, 1) x (0, 2^-k)) on the topologist's comb: the
    nonsingleton chain whose impression is the bottom segment."""
    depth = depth or _depth_for(domain, lambda k: 2.0 ** -k)
    levels = []
    for k in range(1, depth + 1):
        s = 2.0 ** -k
        reg = _rect_level(domain, 0.5 - s, 1.0, 0.0, s, (0.5 - s / 2, s / 2))
        levels.append((reg, s))
    return DiscreteChain(domain, levels, provenance="comb_wide_levels")


def comb_tip_balls(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """Ball components at (1/2, 0) on the comb."""
    pt = BoundaryPoint((0.5, 0.0))
    depth = depth or _depth_for(domain, lambda k: 2.0 ** -k)
    levels = []
    for k in range(1, depth + 1):
        r = 2.0 ** -k
        reg = _connected_containing(ball(domain, (0.5, 0.0), r), (0.5 - r / 2, r / 4))
        levels.append((reg, r))
    return DiscreteChain(domain, levels, provenance="comb_tip_balls", anchor=pt)


def double_equilateral_comb_levels(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """((1/4 - 2^-k-2, 3/4 + 2^-k-2) x (0, 2^-k)) on the double
    equilateral comb; impression is the middle bottom segment."""
    depth = depth or _depth_for(domain, lambda k: 2.0 ** -k)
    levels = []
    for k in range(1, depth + 1):
        s = 2.0 ** -k
        w = 2.0 ** (-k - 2)
        reg = _rect_level(domain, 0.25 - w, 0.75 + w, 0.0, s, (0.5, s / 2))
        levels.append((reg, s))
    return DiscreteChain(domain, levels, provenance="double_equilateral_comb_levels")


def jana_left_levels(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """Omega cap ((-1, 2^-k) x (0, 2^-k)): the left-segment end."""
    depth = depth or _depth_for(domain, lambda k: 2.0 ** -k)
    levels = []
    for k in range(1, depth + 1):
        s = 2.0 ** -k
        reg = _rect_level(domain, -1.0, s, 0.0, s, (-1.0 + s / 4, s / 2))
        levels.append((reg, s))
    return DiscreteChain(domain, levels, provenance="jana_left_levels")


def jana_right_levels(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """Omega cap ((-2^-k, 1) x (0, 2^-k)): the right-segment end."""
    depth = depth or _depth_for(domain, lambda k: 2.0 ** -k)
    levels = []
    for k in range(1, depth + 1):
        s = 2.0 ** -k
        reg = _rect_level(domain, -s, 1.0, 0.0, s, (1.0 - s / 4, s / 2))
        levels.append((reg, s))
    return DiscreteChain(domain, levels, provenance="jana_right_levels")


def pins_central_levels(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """{0 < x < 1/(2k^2), kx < y < 1/(2k)} on the shrinking pins: the
    end above all resolved pins, anchored at the origin."""
    pt = BoundaryPoint((0.0, 0.0), side_hint=(0.2, 1.0))
    levels = []
    k = 0
    while True:
        k += 1
        if depth is not None and k > depth:
            break
        if depth is None and 0.5 / (k * k) < 2 * domain.h:
            break
        c = domain.centers
        sel = ((c[:, 0] > 0) & (c[:, 0] < 0.5 / (k * k))
               & (c[:, 1] > k * c[:, 0]) & (c[:, 1] < 0.5 / k))
        if not sel.any():
            break
        reg = _connected_containing(RegionSet(domain, sel), (1e-3 / k, 0.4 / k))
        levels.append((reg, 0.5 / k))
    return DiscreteChain(domain, levels, provenance="pins_central_levels", anchor=pt)


def slit_collar_levels(domain: GridDomain, depth: int | None = None) -> DiscreteChain:
    """Shrinking collars of the whole slit in the slit disk: a
    nonsingleton chain wrapping both sides."""
    depth = depth or _depth_for(domain, lambda k: 2.0 ** -k, floor_mult=6.0)
    levels = []
    for k in range(1, depth + 1):
        s = 2.0 ** -k
        c = domain.centers
        near = (np.abs(c[:, 1]) < s) & (c[:, 0] > -1.0) & (c[:, 0] < s)
        reg = _connected_containing(RegionSet(domain, near), (s / 2, 0.0))
        levels.append((reg, s))
    return DiscreteChain(domain, levels, provenance="slit_collar_levels")


def constant_chain(domain: GridDomain, region: RegionSet, depth: int = 4) -> DiscreteChain:
    """Degenerate test input: the same region at every level (fails the
    separation invariant by construction)."""
    return DiscreteChain(domain, [(region, 1.0 / (k + 1)) for k in range(depth)],
                         provenance="constant")


NAMED_CHAINS = {
    "unit_square_bottom_strips": unit_square_bottom_strips,
    "unit_square_bottom_balls": unit_square_bottom_balls,
    "comb_wide_levels": comb_wide_levels,
    "comb_tip_balls": comb_tip_balls,
    "double_equilateral_comb_levels": double_equilateral_comb_levels,
    "jana_left_levels": jana_left_levels,
    "jana_right_levels": jana_right_levels,
    "pins_central_levels": pins_central_levels,
    "slit_collar_levels": slit_collar_levels,
}


def named_chain(domain: GridDomain, key: str, depth: int | None = None) -> DiscreteChain:
    if key not in NAMED_CHAINS:
        raise UnknownGallery(f"unknown chain family {key!r}")
    return NAMED_CHAINS[key](domain, depth)
