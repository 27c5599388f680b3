"""Command-line front end: sections, limits, scans, classification, suite.

Reports are JSON by default (schema_version 1, resolved run configuration
embedded) or delimited CSV with --format csv; --plot-dir additionally
renders matplotlib figures next to the tabular output.
"""

from __future__ import annotations

import argparse
import csv
import datetime
import io
import json
import sys

import numpy as np

from . import battery, plots
from .asymptotics import LadderConfig, lemma8_estimate
from .characterize import (
    CONDITIONS,
    classify,
    default_point_grid,
    infer_curvature,
    mean_value_scan,
    scan_condition,
    u_transform_check,
)
from .errors import HypersectError, InvalidParameterError
from .quad import QuadratureConfig
from .region import OffsetMode, SectionSpec
from .sections import section_measures
from .surface import (
    parse_kv_file,
    point_at,
    surface_from_config,
    surface_from_string,
)

EXIT_OK = 0
EXIT_SCAN_FAILS = 2
EXIT_INCONCLUSIVE = 3
EXIT_USAGE = 64
EXIT_DOMAIN = 65

SCHEMA_VERSION = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _parse_floats(text: str) -> list[float]:
    return [float(v) for v in text.split(",") if v.strip()]


def _parse_points(text: str) -> list[np.ndarray]:
    return [np.array(_parse_floats(chunk)) for chunk in text.split(";") if chunk.strip()]


def _common_flags(parser: _Parser) -> None:
    parser.add_argument("--config", help="key-value config file")
    parser.add_argument("--radial-nodes", type=int)
    parser.add_argument("--directions", type=int)
    parser.add_argument("--mc-samples", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--target-rel-err", type=float)
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    parser.add_argument("--output", help="report file (default stdout)")
    parser.add_argument("--plot-dir", help="render figures into this directory")


_QUAD_KEYS = {
    "radial_nodes": int,
    "directions": int,
    "mc_samples": int,
    "seed": int,
    "target_rel_err": float,
}


def _resolve(args):
    """Merge config file and flags into a QuadratureConfig; flags win."""
    file_cfg = parse_kv_file(args.config) if args.config else {}
    kw = {}
    for key, cast in _QUAD_KEYS.items():
        val = getattr(args, key if key != "directions" else "directions", None)
        if val is None and key in file_cfg:
            val = cast(file_cfg[key])
        if val is not None:
            kw["direction_count" if key == "directions" else key] = val
    cfg = QuadratureConfig(**kw)
    run_config = {
        "quadrature": {
            "radial_nodes": cfg.radial_nodes,
            "direction_count": cfg.direction_count,
            "mc_samples": cfg.mc_samples,
            "seed": cfg.seed,
            "target_rel_err": cfg.target_rel_err,
        },
        "format": args.format,
    }
    return cfg, run_config, file_cfg


def _get_surface(args, file_cfg):
    if getattr(args, "surface", None):
        return surface_from_string(args.surface)
    if file_cfg.get("kind"):
        return surface_from_config(file_cfg)
    raise InvalidParameterError("no surface given: use --surface or a config file")


def _jsonify(obj):
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    raise TypeError(f"not JSON serializable: {type(obj)}")


def _emit(args, command, run_config, result, csv_rows):
    """Write the report as JSON or CSV to --output / stdout."""
    if args.format == "json":
        doc = {
            "schema_version": SCHEMA_VERSION,
            "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "command": command,
            "run_config": run_config,
            "result": result,
        }
        text = json.dumps(doc, indent=2, default=_jsonify) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf)
        for row in csv_rows:
            writer.writerow(row)
        text = buf.getvalue()
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _integral_dict(val):
    return {"value": val.value, "abs_err_est": val.abs_err_est,
            "method": val.method, "evaluations": val.evaluations}


def _cmd_section(args):
    cfg, run_config, file_cfg = _resolve(args)
    surface = _get_surface(args, file_cfg)
    point = point_at(surface, _parse_floats(args.point))
    mode = OffsetMode.NORMAL if args.mode == "normal" else OffsetMode.VERTICAL
    spec = SectionSpec(mode, args.magnitude)
    measure = section_measures(surface, point, spec, cfg)
    run_config.update({"surface": surface.label, "point": list(point.x0),
                       "mode": args.mode, "magnitude": args.magnitude})
    fields = ("a_star", "v_star", "s_star", "a_loc", "v_loc", "s_loc", "n_loc")
    result = {name: _integral_dict(getattr(measure, name)) for name in fields}
    result["w"] = point.w
    result["k_curv"] = point.k_curv
    rows = [("quantity", "value", "abs_err_est", "method")]
    rows += [(name, getattr(measure, name).value, getattr(measure, name).abs_err_est,
              getattr(measure, name).method) for name in fields]
    _emit(args, "section", run_config, result, rows)
    if args.plot_dir:
        from .region import build_region
        plots.section_boundary(build_region(surface, point, spec), args.plot_dir)
    return EXIT_OK


def _cmd_limits(args):
    cfg, run_config, file_cfg = _resolve(args)
    surface = _get_surface(args, file_cfg)
    point = point_at(surface, _parse_floats(args.point))
    ladder = LadderConfig(t0=args.t0, ratio=args.rho, rungs=args.rungs)
    quantities = ("A", "V", "S") if args.quantity == "all" else (args.quantity,)
    estimates = [lemma8_estimate(surface, point, q, ladder, cfg)
                 for q in quantities]
    run_config.update({"surface": surface.label, "point": list(point.x0),
                       "quantity": args.quantity, "t0": args.t0,
                       "rho": args.rho, "rungs": args.rungs})
    result = {est.quantity: {
        "extrapolated": est.extrapolated, "uncertainty": est.uncertainty,
        "predicted": est.predicted, "rel_dev": est.rel_dev,
        "ladder": est.ladder} for est in estimates}
    rows = [("quantity", "t", "normalized_value")]
    for est in estimates:
        rows += [(est.quantity, t, y) for t, y in est.ladder]
    _emit(args, "limits", run_config, result, rows)
    if args.plot_dir:
        plots.limit_ladder(estimates, args.plot_dir)
    return EXIT_OK


def _scan_points(args, surface):
    if args.points:
        return _parse_points(args.points)
    if args.points_file:
        with open(args.points_file) as fh:
            return [np.array(_parse_floats(line)) for line in fh
                    if line.strip() and not line.startswith("#")]
    return list(default_point_grid(surface, count=args.grid, box=args.box))


def _cmd_scan(args):
    cfg, run_config, file_cfg = _resolve(args)
    surface = _get_surface(args, file_cfg)
    points = _scan_points(args, surface)
    offsets = _parse_floats(args.offsets)
    report = scan_condition(surface, args.condition, points, offsets,
                            cfg, threshold=args.threshold)
    run_config.update({"surface": surface.label, "condition": args.condition,
                       "points": [list(p.x0) for p in report.points],
                       "offsets": report.offsets,
                       "threshold": report.threshold})
    result = {
        "condition": report.condition, "verdict": report.verdict,
        "threshold": report.threshold,
        "values": report.values, "rel_errs": report.rel_errs,
        "spread": report.spread,
    }
    if report.condition in ("Vstar", "Astar") and report.verdict == "holds":
        inf = infer_curvature(report)
        result["inferred"] = {
            "limit_constant": inf.limit_constant,
            "k_curv": inf.k_curv,
            "hessian_det": inf.hessian_det,
        }
    rows = [("point", *[f"offset={o:g}" for o in report.offsets])]
    for p, vals in zip(report.points, report.values):
        rows.append((";".join(f"{c:g}" for c in p.x0), *vals))
    rows.append(("spread", *report.spread) if report.condition not in ("Vss", "Ass")
                else ("per-point spread", *report.spread))
    _emit(args, "scan", run_config, result, rows)
    if args.plot_dir:
        plots.scan_spread(report, args.plot_dir)
    if report.verdict == "fails":
        return EXIT_SCAN_FAILS
    if report.verdict == "inconclusive":
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def _cmd_classify(args):
    cfg, run_config, file_cfg = _resolve(args)
    surface = _get_surface(args, file_cfg)
    result = classify(surface, count=args.grid, box=args.box,
                      threshold=args.threshold)
    run_config.update({"surface": surface.label, "grid": args.grid,
                       "box": args.box, "threshold": args.threshold})
    out = {
        "verdict": result["verdict"],
        "k_spread": result["k_spread"],
        "det_spread": result["det_spread"],
        "k_values": result["k_values"],
        "det_values": result["det_values"],
        "points": [list(p.x0) for p in result["points"]],
    }
    rows = [("point", "k_curv", "hessian_det")]
    rows += [(";".join(f"{c:g}" for c in p.x0), k, d)
             for p, k, d in zip(result["points"], result["k_values"],
                                result["det_values"])]
    rows.append(("verdict", result["verdict"], ""))
    _emit(args, "classify", run_config, out, rows)
    if args.plot_dir:
        plots.classification_values(result, args.plot_dir)
    return EXIT_OK


def _cmd_meanvalue(args):
    cfg, run_config, file_cfg = _resolve(args)
    coeffs = _parse_floats(args.coeffs)
    centers = _parse_points(args.centers)
    radii = _parse_floats(args.radii)
    report = mean_value_scan(coeffs, centers, radii, cfg,
                             test_fn=args.test_fn, tolerance=args.tolerance)
    run_config.update({"coeffs": coeffs, "centers": [list(q) for q in centers],
                       "radii": report.radii, "test_fn": report.test_fn})
    result = {
        "test_fn": report.test_fn,
        "ratios": report.ratios,
        "q_spread": report.q_spread,
        "harmonic_verdict": report.harmonic_verdict,
        "tolerance": report.tolerance,
    }
    rows = [("center", *[f"r={r:g}" for r in report.radii])]
    rows += [(";".join(f"{c:g}" for c in q), *vals)
             for q, vals in zip(report.centers, report.ratios)]
    rows.append(("q_spread", *report.q_spread))
    _emit(args, "meanvalue", run_config, result, rows)
    if args.plot_dir:
        plots.mean_value_ratios(report, args.plot_dir)
    return EXIT_OK


def _cmd_ucheck(args):
    cfg, run_config, file_cfg = _resolve(args)
    coeffs = _parse_floats(args.coeffs)
    if args.points:
        samples = _parse_points(args.points)
    else:
        rng = np.random.default_rng(cfg.seed)
        samples = [rng.uniform(-args.box, args.box, size=len(coeffs))
                   for _ in range(args.samples)]
    result = u_transform_check(coeffs, samples)
    run_config.update({"coeffs": coeffs, "samples": len(samples)})
    rows = [("key", "value")] + [(k, v) for k, v in result.items()]
    _emit(args, "ucheck", run_config, result, rows)
    return EXIT_OK


def _cmd_suite(args):
    cfg, run_config, file_cfg = _resolve(args)
    summary = battery.run_battery(cfg)
    for crit in summary["criteria"]:
        status = "PASS" if crit["passed"] else "FAIL"
        print(f"{status}  {crit['name']}", file=sys.stderr)
    rows = [("criterion", "passed")]
    rows += [(c["name"], c["passed"]) for c in summary["criteria"]]
    _emit(args, "suite", run_config, summary, rows)
    if args.plot_dir:
        plots.suite_summary(summary, args.plot_dir)
    return EXIT_OK if summary["passed"] else 1


def build_parser() -> _Parser:
    parser = _Parser(prog="hypersect", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("section", parents=[], help="section functionals at one cell")
    p.add_argument("--surface", help="kind:params, e.g. paraboloid:1,1 or sphere:2")
    p.add_argument("--point", required=True, help="comma-separated coordinates")
    p.add_argument("--mode", choices=("normal", "vertical"), default="vertical")
    p.add_argument("--magnitude", type=float, required=True)
    _common_flags(p)
    p.set_defaults(func=_cmd_section)

    p = sub.add_parser("limits", help="small-offset limit extrapolation")
    p.add_argument("--surface")
    p.add_argument("--point", required=True)
    p.add_argument("--quantity", choices=("A", "V", "S", "all"), default="all")
    p.add_argument("--t0", type=float, default=0.1)
    p.add_argument("--rho", type=float, default=0.5)
    p.add_argument("--rungs", type=int, default=6)
    _common_flags(p)
    p.set_defaults(func=_cmd_limits)

    p = sub.add_parser("scan", help="constancy scan of a section condition")
    p.add_argument("--surface")
    p.add_argument("--condition", choices=CONDITIONS, required=True)
    p.add_argument("--points", help="semicolon-separated points, e.g. '0,0;1,0'")
    p.add_argument("--points-file")
    p.add_argument("--grid", type=int, default=8, help="low-discrepancy point count")
    p.add_argument("--box", type=float, help="half-width of the sample box")
    p.add_argument("--offsets", required=True, help="comma-separated magnitudes")
    p.add_argument("--threshold", type=float)
    _common_flags(p)
    p.set_defaults(func=_cmd_scan)

    p = sub.add_parser("classify", help="sphere-like / paraboloid-like / neither")
    p.add_argument("--surface")
    p.add_argument("--grid", type=int, default=8)
    p.add_argument("--box", type=float)
    p.add_argument("--threshold", type=float, default=1e-6)
    _common_flags(p)
    p.set_defaults(func=_cmd_classify)

    p = sub.add_parser("meanvalue", help="ball-average ratios of the stretch factor")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--centers", required=True)
    p.add_argument("--radii", required=True)
    p.add_argument("--test-fn", help="registry function instead of the stretch factor")
    p.add_argument("--tolerance", type=float, default=1e-9)
    _common_flags(p)
    p.set_defaults(func=_cmd_meanvalue)

    p = sub.add_parser("ucheck", help="stretch-factor derivative identities")
    p.add_argument("--coeffs", required=True)
    p.add_argument("--points", help="explicit sample points")
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--box", type=float, default=2.0)
    _common_flags(p)
    p.set_defaults(func=_cmd_ucheck)

    p = sub.add_parser("suite", help="run the full acceptance battery")
    _common_flags(p)
    p.set_defaults(func=_cmd_suite)

    return parser


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if exc.code is not None else EXIT_USAGE
    try:
        return args.func(args)
    except HypersectError as exc:
        print(f"hypersect: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    raise SystemExit(run())


if __name__ == "__main__":
    main()
