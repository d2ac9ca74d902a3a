"""Command-line interface.

Subcommands build gallery domains, analyze boundary points, solve
condensers, probe the inner metric, classify domains, and run the
regression matrix.  Reports are JSON/CSV with SVG figures alongside;
identical configurations (including the seed) produce byte-identical
JSON and CSV.

Exit codes: 0 success, 2 validation error, 3 unresolved at this
resolution, 4 internal error.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import john, mazurkiewicz as maz, modulus, plots
from .acceptance import CRITERIA, run_criteria
from .domain import BoundaryPoint, GridDomain, dyadic_ladder
from .ends import enumerate_prime_ends_at
from .errors import InaccessibleError, PrimeEndsError, UnresolvedAtDepth
from .gallery import GALLERY_INFO, build_gallery, gallery_names
from .regions import Inaccessible, accessibility, component_report, finitely_connected_at
from .serialize import (
    dumps_json,
    load_chain,
    load_domain,
    load_region,
    save_domain,
    write_csv,
    write_json,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_UNRESOLVED = 3
EXIT_INTERNAL = 4

DEFAULT_H = {
    "unit_square": 1 / 128,
    "disk": 1 / 128,
    "slit_disk": 1 / 200,
    "topologist_comb": 2.0 ** -9,
    "double_equilateral_comb": 2.0 ** -9,
    "double_comb": 2.0 ** -9,
    "shrinking_pins": 1 / 256,
    "accumulating_pins": 2.0 ** -9,
    "jana_two_limits": 2.0 ** -9,
    "cubic_cusp": 1 / 256,
    "inward_cusp": 1 / 128,
}


def thread_count() -> int:
    """Worker cap for batch queries, from PRIMEEND_THREADS."""
    try:
        return max(1, int(os.environ.get("PRIMEEND_THREADS", "1")))
    except ValueError:
        return 1


def _parse_point(text: str) -> tuple[float, float]:
    x, y = text.split(",")
    return float(x), float(y)


def _resolve_domain(arg: str, h: float | None, depth: int | None) -> GridDomain:
    if arg in GALLERY_INFO:
        params = {}
        if depth is not None:
            params["depth"] = depth
        return build_gallery(arg, h or DEFAULT_H[arg], params)
    return load_domain(arg)


def _report(out: Path, stem: str, payload: dict, figures: dict | None = None) -> dict:
    payload = {"tool": "primeends", "version": __version__, **payload}
    path = write_json(out / f"{stem}.json", payload)
    written = {"json": str(path)}
    if figures:
        written.update({k: str(v) for k, v in figures.items()})
    return written


# -- subcommands --------------------------------------------------------------------


def cmd_gallery(args) -> int:
    if args.action == "list":
        for name in gallery_names():
            print(f"{name:26s} {GALLERY_INFO[name]}")
        return EXIT_OK
    dom = build_gallery(args.name, args.h or DEFAULT_H.get(args.name, 1 / 128),
                        {"depth": args.depth} if args.depth else {})
    out = Path(args.out)
    save_domain(out / f"{dom.name}.json", dom)
    fig = plots.render_domain(dom, out / f"{dom.name}.svg")
    print(f"wrote {out / (dom.name + '.json')} and {fig}")
    return EXIT_OK


def cmd_analyze(args) -> int:
    dom = _resolve_domain(args.domain, args.h, args.depth)
    pos = _parse_point(args.point)
    hint = _parse_point(args.side) if args.side else None
    pt = BoundaryPoint(pos, side_hint=hint)
    out = Path(args.out)
    radii = None
    if args.rmax:
        radii = list(dyadic_ladder(args.rmax, 4 * dom.h))

    ladder = radii or list(dyadic_ladder(min(0.5, dom.diameter / 4), 4 * dom.h))
    reports = [component_report(dom, pt, r).to_dict() for r in ladder]
    verdict = finitely_connected_at(dom, pt, radii=ladder)
    wit = accessibility(dom, pt)
    payload = {
        "config": {"domain": args.domain, "h": dom.h, "point": list(pos),
                   "side_hint": list(hint) if hint else None},
        "component_reports": reports,
        "connectedness": verdict.to_dict(),
        "accessible": not isinstance(wit, Inaccessible),
        "checks": ["component_ladder", "finite_connectedness", "accessibility",
                   "prime_end_enumeration"],
    }
    figures = {}
    if isinstance(wit, Inaccessible):
        payload["inaccessible_reason"] = wit.reason
        payload["prime_ends"] = {"count": 0}
    else:
        en = enumerate_prime_ends_at(dom, pt, radii=ladder)
        payload["prime_ends"] = {
            "count": en.count,
            "stabilized_n": en.stabilized_n,
            "growing": en.growing,
            "singleton_flags": [r.singleton for r in en.records],
            "impression_diameters": [r.impression.diameter for r in en.records],
        }
        poly = wit.positions
        figures["witness_svg"] = plots.render_path(
            dom, poly, out / "witness_path.svg", title=f"approach to {pos}")
        write_csv(out / "witness_path.csv", ["x", "y"],
                  [(p[0], p[1]) for p in poly])
        if en.records:
            figures["chain_svg"] = plots.render_chain(
                dom, en.records[0].chain.levels, out / "prime_end_chain.svg",
                title=f"chain at {pos}")
    written = _report(out, "analyze", payload, figures)
    print(dumps_json({"outputs": written, "summary": payload["prime_ends"]}), end="")
    if verdict.verdict == "unresolved":
        return EXIT_UNRESOLVED
    return EXIT_OK


def cmd_modulus(args) -> int:
    dom = _resolve_domain(args.domain, args.h, args.depth)
    E = load_region(args.plates[0], dom)
    F = load_region(args.plates[1], dom)
    res = modulus.capacity(modulus.CapacityProblem(dom, E, F, args.p), tol=args.tol)
    out = Path(args.out)
    payload = {
        "config": {"domain": args.domain, "p": args.p, "tol": args.tol},
        "value": res.value,
        "residual": res.residual,
        "iterations": res.iterations,
        "empty_family": res.empty_family,
        "checks": ["condenser_capacity"],
    }
    figures = {"potential_svg": plots.render_potential(
        dom, res.potential, out / "potential.svg",
        title=f"p={args.p} potential, value {res.value:.5g}")}
    rows = [(int(i), float(v)) for i, v in enumerate(res.potential)]
    write_csv(out / "potential.csv", ["cell", "u"], rows)
    written = _report(out, "modulus", payload, figures)
    print(dumps_json({"outputs": written, "value": res.value}), end="")
    return EXIT_OK


def cmd_decay(args) -> int:
    dom = _resolve_domain(args.domain, args.h, args.depth)
    chain = load_chain(args.chain, dom)
    K = load_region(args.K, dom)
    verdict = modulus.modp_chain_decay(chain, K, args.p)
    out = Path(args.out)
    write_csv(out / "decay_series.csv", ["level", "scale", "value"],
              [(k, s, v) for k, (s, v) in
               enumerate(zip(verdict.scales, verdict.series))])
    figures = {"series_svg": plots.render_series(
        verdict.scales, verdict.series, out / "decay_series.svg",
        xlabel="scale", ylabel="capacity", title=f"verdict: {verdict.verdict}")}
    payload = {
        "config": {"domain": args.domain, "p": args.p},
        "verdict": verdict.verdict,
        "series": verdict.series,
        "scales": verdict.scales,
        "fitted_limit": verdict.fitted_limit,
        "checks": ["capacity_decay"],
    }
    written = _report(out, "decay", payload, figures)
    print(dumps_json({"outputs": written, "verdict": verdict.verdict}), end="")
    return EXIT_OK


def cmd_mazurkiewicz(args) -> int:
    dom = _resolve_domain(args.domain, args.h, args.depth)
    out = Path(args.out)
    if args.action == "distance":
        if args.a is None or args.b is None:
            raise PrimeEndsError("distance needs --a x,y and --b x,y")
        a = _parse_point(args.a)
        b = _parse_point(args.b)
        r = maz.maz_distance(dom, a, b)
        payload = {
            "config": {"domain": args.domain, "a": list(a), "b": list(b)},
            "value": r.value,
            "lower_bound": r.lower_bound,
            "connected": r.connected,
            "checks": ["inner_distance"],
        }
        figures = {}
        if r.polyline is not None:
            figures["path_svg"] = plots.render_path(
                dom, r.polyline, out / "maz_path.svg",
                title=f"inner distance {r.value:.5g}")
            write_csv(out / "maz_path.csv", ["x", "y"],
                      [(p[0], p[1]) for p in r.polyline])
        written = _report(out, "maz_distance", payload, figures)
        print(dumps_json({"outputs": written, "value": r.value}), end="")
        return EXIT_OK
    atlas = maz.maz_boundary(dom, args.tau)
    payload = {
        "config": {"domain": args.domain, "tau": atlas.tau},
        "clusters": [
            {"index": c.index, "anchor": list(c.anchor.position),
             "members": int(len(c.members)), "verified": c.verified}
            for c in atlas.clusters
        ],
        "rejected": len(atlas.rejected),
        "checks": ["metric_boundary_atlas"],
    }
    write_csv(out / "atlas_anchors.csv", ["cluster", "x", "y", "members"],
              [(c.index, c.anchor.position[0], c.anchor.position[1],
                len(c.members)) for c in atlas.clusters])
    figures = {"atlas_svg": plots.render_atlas(dom, atlas, out / "atlas.svg")}
    written = _report(out, "maz_boundary", payload, figures)
    print(dumps_json({"outputs": written, "clusters": len(atlas.clusters)}), end="")
    return EXIT_OK


def cmd_john(args) -> int:
    dom = _resolve_domain(args.domain, args.h, args.depth)
    out = Path(args.out)
    if args.action == "assess":
        center = _parse_point(args.center)
        rng = np.random.default_rng(args.seed)
        ids = np.nonzero(dom.trusted)[0]
        samples = [int(i) for i in rng.choice(ids, size=args.samples, replace=False)]
        a = john.john_assess(dom, center, samples)
        payload = {
            "config": {"domain": args.domain, "center": list(center),
                       "samples": args.samples, "seed": args.seed},
            "verdict": a.verdict,
            "constant_estimate": (a.constant_estimate
                                  if math.isfinite(a.constant_estimate) else None),
            "checks": ["john_center_condition"],
        }
        written = _report(out, "john_assess", payload)
        print(dumps_json({"outputs": written, "verdict": a.verdict}), end="")
        return EXIT_OK if a.verdict != "unresolved" else EXIT_UNRESOLVED
    if args.action == "chain":
        center = _parse_point(args.center)
        target = _parse_point(args.target)
        c0 = dom.cell_index(center)
        x = dom.cell_index(target)
        C = john.john_constant(dom, c0, x)
        if not math.isfinite(C):
            raise UnresolvedAtDepth("no curve satisfies the center condition")
        curve = john.john_curve(dom, x, c0, C * 1.1)
        rho0 = float(dom.delta[c0]) / 8
        bc = john.build_ball_chain(dom, c0, rho0, x, curve, C * 1.2)
        checks = john.validate_ball_chain(dom, bc)
        payload = {
            "config": {"domain": args.domain, "center": list(center),
                       "target": list(target)},
            "constant": C,
            "M": bc.M,
            "balls": len(bc.balls),
            "checks_passed": {c.name: c.passed for c in checks},
            "checks": ["ball_chain_conditions"],
        }
        write_csv(out / "ball_chain.csv", ["x", "y", "radius", "level", "index"],
                  [(b[0][0], b[0][1], b[1], b[2], b[3]) for b in bc.balls])
        written = _report(out, "john_chain", payload)
        print(dumps_json({"outputs": written,
                          "all_checks": all(c.passed for c in checks)}), end="")
        return EXIT_OK
    reg = load_region(args.region, dom)
    est = john.hausdorff_content(reg, args.s)
    payload = {
        "config": {"domain": args.domain, "s": args.s},
        "upper": est.upper,
        "lower": est.lower,
        "checks": ["hausdorff_content"],
    }
    written = _report(out, "content", payload)
    print(dumps_json({"outputs": written, "upper": est.upper, "lower": est.lower}),
          end="")
    return EXIT_OK


def cmd_regress(args) -> int:
    only = set(args.only.split(",")) if args.only else None
    if only:
        unknown = only - set(CRITERIA)
        if unknown:
            raise PrimeEndsError(f"unknown criteria {sorted(unknown)}")

    def progress(res):
        print(res.line(), file=sys.stderr, flush=True)

    results = run_criteria(only=only, seed=args.seed, progress=progress)
    payload = {
        "tool": "primeends",
        "version": __version__,
        "config": {"suite": args.suite, "seed": args.seed,
                   "only": sorted(only) if only else None,
                   "threads": thread_count()},
        "criteria": [
            {"cid": r.cid, "name": r.name, "passed": r.passed, "details": r.details}
            for r in results
        ],
        "all_passed": all(r.passed for r in results),
    }
    report_path = Path(args.report)
    write_json(report_path, payload)
    for r in results:
        print(r.line())
    print(f"report: {report_path}")
    return EXIT_OK if payload["all_passed"] else EXIT_VALIDATION


# -- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="primeends",
        description="Boundary structure of planar grid domains: prime ends, "
                    "inner-metric boundary, p-capacity, John classification.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gallery", help="list or build the example domains")
    g.add_argument("action", choices=["list", "build"])
    g.add_argument("name", nargs="?", help="gallery domain name")
    g.add_argument("--h", type=float, default=None)
    g.add_argument("--depth", type=int, default=None)
    g.add_argument("--out", default="primeends_out")
    g.set_defaults(fn=cmd_gallery)

    a = sub.add_parser("analyze", help="boundary-point analysis")
    a.add_argument("domain")
    a.add_argument("--point", required=True, help="x,y on the boundary")
    a.add_argument("--side", default=None, help="dx,dy side hint")
    a.add_argument("--rmax", type=float, default=None)
    a.add_argument("--h", type=float, default=None)
    a.add_argument("--depth", type=int, default=None)
    a.add_argument("--out", default="primeends_out")
    a.set_defaults(fn=cmd_analyze)

    m = sub.add_parser("modulus", help="condenser capacity")
    m.add_argument("domain")
    m.add_argument("--plates", nargs=2, required=True, metavar=("E.json", "F.json"))
    m.add_argument("--p", type=float, default=2.0)
    m.add_argument("--tol", type=float, default=1e-6)
    m.add_argument("--h", type=float, default=None)
    m.add_argument("--depth", type=int, default=None)
    m.add_argument("--out", default="primeends_out")
    m.set_defaults(fn=cmd_modulus)

    d = sub.add_parser("decay", help="capacity decay along a chain")
    d.add_argument("domain")
    d.add_argument("--chain", required=True)
    d.add_argument("--K", required=True)
    d.add_argument("--p", type=float, default=2.0)
    d.add_argument("--h", type=float, default=None)
    d.add_argument("--depth", type=int, default=None)
    d.add_argument("--out", default="primeends_out")
    d.set_defaults(fn=cmd_decay)

    z = sub.add_parser("mazurkiewicz", help="inner metric and its boundary")
    z.add_argument("domain")
    z.add_argument("action", choices=["distance", "boundary"])
    z.add_argument("--a", default=None, help="x,y (distance)")
    z.add_argument("--b", default=None, help="x,y (distance)")
    z.add_argument("--tau", type=float, default=None)
    z.add_argument("--h", type=float, default=None)
    z.add_argument("--depth", type=int, default=None)
    z.add_argument("--out", default="primeends_out")
    z.set_defaults(fn=cmd_mazurkiewicz)

    j = sub.add_parser("john", help="John/uniform classification tools")
    j.add_argument("domain")
    j.add_argument("action", choices=["assess", "chain", "content"])
    j.add_argument("region", nargs="?", help="region JSON for content")
    j.add_argument("--center", default="0.5,0.5")
    j.add_argument("--target", default=None)
    j.add_argument("--samples", type=int, default=12)
    j.add_argument("--s", type=float, default=1.0)
    j.add_argument("--seed", type=int, default=20240801)
    j.add_argument("--h", type=float, default=None)
    j.add_argument("--depth", type=int, default=None)
    j.add_argument("--out", default="primeends_out")
    j.set_defaults(fn=cmd_john)

    r = sub.add_parser("regress", help="run the acceptance matrix")
    r.add_argument("--suite", default="gallery")
    r.add_argument("--report", default="primeends_out/regress.json")
    r.add_argument("--only", default=None, help="comma-separated criterion ids")
    r.add_argument("--seed", type=int, default=20240801)
    r.set_defaults(fn=cmd_regress)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args)
    except UnresolvedAtDepth as exc:
        print(dumps_json({"error": str(exc), "kind": "unresolved"}), end="",
              file=sys.stderr)
        return EXIT_UNRESOLVED
    except (PrimeEndsError, InaccessibleError, FileNotFoundError, ValueError) as exc:
        print(dumps_json({"error": str(exc), "kind": type(exc).__name__}), end="",
              file=sys.stderr)
        return EXIT_VALIDATION
    except Exception as exc:  # pragma: no cover - defensive
        print(dumps_json({"error": str(exc), "kind": "internal"}), end="",
              file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
