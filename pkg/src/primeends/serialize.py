"""File formats: domain JSON, chain JSON, report JSON/CSV helpers.

All emission is byte-deterministic: dictionaries are dumped with sorted
keys, floats use repr round-tripping, and files are written atomically
(temp + rename).
"""

from __future__ import annotations

import base64
import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .domain import GridDomain, GridSpec, WeightSpec
from .ends import DiscreteChain
from .regions import RegionSet

FORMAT_VERSION = 1


# -- run-length encoded bitmasks -------------------------------------------------


def rle_encode_mask(mask: np.ndarray) -> str:
    """Row-major run lengths (starting with a zero-run) packed as
    uint32 little-endian, base64."""
    flat = np.asarray(mask, dtype=bool).ravel()
    if len(flat) == 0:
        return ""
    change = np.nonzero(np.diff(flat))[0] + 1
    bounds = np.concatenate([[0], change, [len(flat)]])
    runs = np.diff(bounds)
    if flat[0]:
        runs = np.concatenate([[0], runs])
    return base64.b64encode(runs.astype("<u4").tobytes()).decode("ascii")


def rle_decode_mask(data: str, shape: tuple[int, int]) -> np.ndarray:
    if not data:
        return np.zeros(shape, dtype=bool)
    runs = np.frombuffer(base64.b64decode(data), dtype="<u4").astype(np.int64)
    flat = np.zeros(int(runs.sum()), dtype=bool)
    pos = 0
    val = False
    for r in runs:
        if val:
            flat[pos:pos + r] = True
        pos += int(r)
        val = not val
    return flat.reshape(shape)


def _blocked_edges_list(dom: GridDomain) -> list[list]:
    out = []
    j, i = np.nonzero(dom.blocked_east)
    out.extend([int(a), int(b), "E"] for a, b in zip(i, j))
    j, i = np.nonzero(dom.blocked_north)
    out.extend([int(a), int(b), "N"] for a, b in zip(i, j))
    out.sort()
    return out


def domain_to_dict(dom: GridDomain) -> dict:
    d = {
        "format_version": FORMAT_VERSION,
        "grid": {
            "nx": dom.spec.nx,
            "ny": dom.spec.ny,
            "h": dom.spec.h,
            "origin": [dom.spec.origin[0], dom.spec.origin[1]],
        },
        "open_cells": rle_encode_mask(dom.open_mask),
        "blocked_edges": _blocked_edges_list(dom),
        "weight": {"kind": dom.weight_spec.kind, "params": dom.weight_spec.params},
        "name": dom.name,
    }
    if dom.untrusted_mask.any():
        d["untrusted_cells"] = rle_encode_mask(dom.untrusted_mask)
    if dom.debris_mask.any():
        d["debris_cells"] = rle_encode_mask(dom.debris_mask)
    return d


def domain_from_dict(d: dict) -> GridDomain:
    g = d["grid"]
    spec = GridSpec(nx=int(g["nx"]), ny=int(g["ny"]), h=float(g["h"]),
                    origin=(float(g["origin"][0]), float(g["origin"][1])))
    shape = (spec.ny, spec.nx)
    om = rle_decode_mask(d["open_cells"], shape)
    be = np.zeros(shape, dtype=bool)
    bn = np.zeros(shape, dtype=bool)
    for i, j, side in d.get("blocked_edges", []):
        if side == "E":
            be[int(j), int(i)] = True
        else:
            bn[int(j), int(i)] = True
    w = d.get("weight", {"kind": "const", "params": {}})
    untrusted = (rle_decode_mask(d["untrusted_cells"], shape)
                 if "untrusted_cells" in d else None)
    debris = (rle_decode_mask(d["debris_cells"], shape)
              if "debris_cells" in d else None)
    return GridDomain(spec, om, be, bn,
                      weight=WeightSpec(kind=w["kind"], params=dict(w["params"])),
                      name=d.get("name", "domain"),
                      untrusted_mask=untrusted, debris_mask=debris)


# -- regions and chains -----------------------------------------------------------


def region_to_dict(reg: RegionSet) -> dict:
    grid_mask = np.zeros(reg.domain.open_mask.shape, dtype=bool)
    ij = reg.domain.cells_ij[reg.sel]
    grid_mask[ij[:, 1], ij[:, 0]] = True
    return {"cells": rle_encode_mask(grid_mask), "count": reg.size}


def region_from_dict(dom: GridDomain, d: dict) -> RegionSet:
    grid_mask = rle_decode_mask(d["cells"], dom.open_mask.shape)
    sel = grid_mask[dom.open_mask]
    return RegionSet(dom, sel)


def chain_to_dict(chain: DiscreteChain) -> dict:
    d = {
        "format_version": FORMAT_VERSION,
        "provenance": chain.provenance,
        "levels": [
            {"scale": s, **region_to_dict(reg)} for reg, s in chain.levels
        ],
    }
    if chain.anchor is not None:
        d["anchor"] = {
            "position": list(chain.anchor.position),
            "side_hint": (list(chain.anchor.side_hint)
                          if chain.anchor.side_hint else None),
        }
    return d


def chain_from_dict(dom: GridDomain, d: dict) -> DiscreteChain:
    from .domain import BoundaryPoint
    levels = [(region_from_dict(dom, lv), float(lv["scale"])) for lv in d["levels"]]
    anchor = None
    if "anchor" in d and d["anchor"]:
        a = d["anchor"]
        hint = tuple(a["side_hint"]) if a.get("side_hint") else None
        anchor = BoundaryPoint(position=tuple(a["position"]), side_hint=hint)
    return DiscreteChain(dom, levels, provenance=d.get("provenance", "file"),
                         anchor=anchor)


# -- deterministic writers ---------------------------------------------------------


def dumps_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False,
                      default=_json_default) + "\n"


def _json_default(o):
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(f"not serializable: {type(o)}")


def write_atomic(path: str | Path, data: str | bytes) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    mode = "wb" if isinstance(data, bytes) else "w"
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, mode) as f:
            f.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_json(path: str | Path, obj) -> Path:
    return write_atomic(path, dumps_json(obj))


def write_csv(path: str | Path, header: list[str], rows) -> Path:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(v) for v in row))
    return write_atomic(path, "\n".join(lines) + "\n")


def _csv_cell(v) -> str:
    if isinstance(v, float):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def save_domain(path: str | Path, dom: GridDomain) -> Path:
    return write_json(path, domain_to_dict(dom))


def load_domain(path: str | Path) -> GridDomain:
    with open(path) as f:
        return domain_from_dict(json.load(f))


def save_chain(path: str | Path, chain: DiscreteChain) -> Path:
    return write_json(path, chain_to_dict(chain))


def load_chain(path: str | Path, dom: GridDomain) -> DiscreteChain:
    with open(path) as f:
        return chain_from_dict(dom, json.load(f))


def save_region(path: str | Path, reg: RegionSet) -> Path:
    return write_json(path, region_to_dict(reg))


def load_region(path: str | Path, dom: GridDomain) -> RegionSet:
    with open(path) as f:
        return region_from_dict(dom, json.load(f))
