"""``airykdv`` command line.

Every run writes into ``--out``:

* ``run_config.json`` -- the fully resolved parameters (feed it back with
  ``--config`` to reproduce the run),
* the report JSON plus a CSV (ratios, series or scan rows),
* PNG figures unless ``--no-plots``.

Exit codes: 0 success, 1 usage or parameter error, 2 property violation,
3 numerical abort.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__

EXIT_OK, EXIT_USAGE, EXIT_PROPERTY, EXIT_NUMERICAL = 0, 1, 2, 3
RUN_CONFIG_SCHEMA = 1

COMMON = {"n": 256, "length": 2 * math.pi * 16, "nt": None, "tspan": None, "s": 0.0, "b": 0.55,
          "bprime": -0.45, "samples": 20, "seed": 0, "threads": 1, "sigma": 0.0, "delta": 0.25,
          "no_plots": False}

DEFAULTS = {
    "verify-bilinear": {"tladder": [25.0, 50.0, 100.0]},
    "verify-transfer": {"n": 128, "tspan": 1.0, "width": 4},
    "verify-strichartz": {"n": 128, "tspan": 0.5, "case": "L8", "mode": "free", "width": 4},
    "verify-quadrilinear": {"n": 64, "length": 2 * math.pi * 8, "tspan": 1.0, "width": 2},
    "region-scan": {"radius": 10.0, "s": -0.1, "step": 1.0, "cutoff": 1.0, "theta": 0.99,
                    "points": False},
    "solve": {"n": 512, "length": 80.0, "p": 4, "dt": 1e-4, "tend": 1.0, "stride": 1000,
              "soliton": None, "zero": False, "gaussian": None, "width": 2.0, "linear_only": False},
    "experiment": {"p": 4, "dt": None, "tend": None, "lam": 2.0, "cutoffs": [32.0, 64.0, 128.0],
                   "amplitude": None, "ns": None},
}


# grid defaults per experiment kind
_EXPERIMENT_GRIDS = {
    "conservation": {"n": 512, "length": 80.0},
    "order": {"n": 128, "length": 40.0},
    "scaling": {"length": 40.0},
    "picard": {"n": 128, "length": 40.0},
    "rough": {"n": 512, "length": 2 * math.pi},
}


class UsageError(Exception):
    pass


class PropertyViolation(Exception):
    pass


# -- parser ----------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    S = argparse.SUPPRESS
    g = p.add_argument_group("common")
    g.add_argument("--n", type=int, default=S, help="spatial mode count (even)")
    g.add_argument("--length", type=float, default=S, help="torus circumference L")
    g.add_argument("--nt", type=int, default=S, help="time samples (default: resolved automatically)")
    g.add_argument("--tspan", type=float, default=S, help="time window length T")
    g.add_argument("--s", type=float, default=S, help="Sobolev exponent")
    g.add_argument("--b", type=float, default=S, help="Bourgain exponent b")
    g.add_argument("--bprime", type=float, default=S, help="dual Bourgain exponent b'")
    g.add_argument("--samples", type=int, default=S, help="random samples")
    g.add_argument("--seed", type=int, default=S, help="64-bit seed")
    g.add_argument("--threads", type=int, default=S, help="worker threads (results do not depend on it)")
    g.add_argument("--sigma", type=float, default=S, help="regularity of sampled data")
    g.add_argument("--delta", type=float, default=S, help="envelope excess over the borderline decay")
    g.add_argument("--out", default=S, help="output directory")
    g.add_argument("--config", default=S, help="JSON run config; explicit flags override it")
    g.add_argument("--no-plots", dest="no_plots", action="store_true", default=S,
                   help="skip figure rendering")


def build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    parser = argparse.ArgumentParser(prog="airykdv", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"airykdv {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify-bilinear", help="bilinear smoothing of free Airy waves + resonance identity")
    _common(p)
    p.add_argument("--tladder", type=float, nargs="+", default=S, help="window lengths for the identity trend")

    p = sub.add_parser("verify-transfer", help="bilinear estimate for X_{0,b} fields")
    _common(p)
    p.add_argument("--width", type=int, default=S, help="modulation band half-width (lattice steps)")

    p = sub.add_parser("verify-strichartz", help="mixed-norm Strichartz ratios")
    _common(p)
    p.add_argument("--case", default=S, help="L8, L4, kato:<p> or mixed:<p>")
    p.add_argument("--mode", choices=["free", "xsb"], default=S)
    p.add_argument("--width", type=int, default=S)

    p = sub.add_parser("verify-quadrilinear", help="the quartic X_{s,b} estimate")
    _common(p)
    p.add_argument("--width", type=int, default=S)

    p = sub.add_parser("region-scan", help="exhaustive lattice scan of the frequency regions")
    _common(p)
    p.add_argument("--radius", type=float, default=S)
    p.add_argument("--step", type=float, default=S, help="lattice spacing")
    p.add_argument("--cutoff", type=float, default=S, help="region-A cutoff")
    p.add_argument("--theta", type=float, default=S, help="near-threshold of region B")
    p.add_argument("--points", action="store_true", default=S, help="write every lattice point")

    p = sub.add_parser("solve", help="integrate gKdV-p and write a trace")
    _common(p)
    p.add_argument("--p", type=int, default=S, help="nonlinearity power")
    p.add_argument("--dt", type=float, default=S)
    p.add_argument("--tend", type=float, default=S)
    p.add_argument("--stride", type=int, default=S, help="steps between snapshots")
    data = p.add_mutually_exclusive_group()
    data.add_argument("--soliton", type=float, default=S, metavar="C", help="soliton of speed C")
    data.add_argument("--zero", action="store_true", default=S, help="zero data")
    data.add_argument("--gaussian", type=float, default=S, metavar="A", help="Gaussian bump of height A")
    p.add_argument("--width", type=float, default=S, help="Gaussian width")
    p.add_argument("--linear-only", dest="linear_only", action="store_true", default=S)

    p = sub.add_parser("experiment", help="solver experiments")
    p.add_argument("kind", choices=["conservation", "order", "scaling", "picard", "rough"])
    _common(p)
    p.add_argument("--p", type=int, default=S)
    p.add_argument("--dt", type=float, default=S)
    p.add_argument("--tend", type=float, default=S)
    p.add_argument("--lambda", dest="lam", type=float, default=S)
    p.add_argument("--cutoffs", type=float, nargs="+", default=S)
    p.add_argument("--amplitude", type=float, default=S)
    p.add_argument("--ns", type=int, nargs="+", default=S, help="resolution ladder (scaling)")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    explicit = vars(args).copy()
    command = explicit.pop("command")
    config_path = explicit.pop("config", None)
    from_file = {}
    if config_path:
        try:
            from_file = json.loads(Path(config_path).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {config_path}: {exc}") from exc
        if from_file.get("command", command) != command:
            raise UsageError(f"config is for {from_file['command']!r}, not {command!r}")
        from_file = {k: v for k, v in from_file.items() if k not in ("command", "schema_version")}
    defaults = {**COMMON, **DEFAULTS[command]}
    if command == "experiment":
        defaults.update(_EXPERIMENT_GRIDS[explicit["kind"]])
    cfg = {**defaults, **from_file, **explicit}
    cfg.setdefault("out", str(Path("airykdv-out") / (command + (f"-{cfg['kind']}" if "kind" in cfg else ""))))
    return {"command": command, "schema_version": RUN_CONFIG_SCHEMA, **cfg}


# -- helpers ---------------------------------------------------------------------------

def _grid(cfg):
    from .spectral import make_spatial_grid
    try:
        return make_spatial_grid(cfg["n"], cfg["length"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _spec(cfg, **overrides):
    from .estimates.sampling import RandomFieldSpec
    values = {"sigma": cfg["sigma"], "seed": cfg["seed"], "delta": cfg["delta"]}
    values.update(overrides)
    return RandomFieldSpec(**values)


def _spacetime_window(cfg, grid):
    from .estimates.sampling import spacetime_window
    from .spectral import make_time_window
    if cfg["nt"]:
        return make_time_window(cfg["nt"], cfg["tspan"])
    return spacetime_window(grid, cfg["tspan"], cfg["width"])


def _write_report(report, cfg, out: Path, figures: list) -> list:
    paths = report.write(out)
    written = [paths["json"], paths["csv"]]
    if not cfg["no_plots"]:
        from .plotting import plot_estimate_report
        written.append(plot_estimate_report(report, out / f"{report.name}.png"))
    return written + figures


def _params(cfg):
    from .norms import WeightParams
    return WeightParams(cfg["s"], cfg["b"], cfg["bprime"])


# -- commands ---------------------------------------------------------------------------

def cmd_verify_bilinear(cfg, out: Path) -> list:
    from .estimates.bilinear import verify_bilinear
    grid = _grid(cfg)
    ladder = [float(t) for t in cfg["tladder"]]
    tspan = cfg["tspan"] or max(ladder)
    report = verify_bilinear(_spec(cfg), grid, tspan, cfg["samples"], ladder, cfg["threads"])
    written = _write_report(report, cfg, out, [])
    problems = []
    if not report.extras["residual_decreasing"]:
        problems.append("identity residual is not decreasing in T")
    if not report.extras["cross_le_product"]:
        problems.append("term_cross exceeds term_product")
    if problems:
        raise PropertyViolation("; ".join(problems))
    return written


def cmd_verify_transfer(cfg, out: Path) -> list:
    from .estimates.transfer import verify_transfer
    grid = _grid(cfg)
    if not cfg["b"] > 0.5:
        raise UsageError(f"requires b > 1/2 (got b={cfg['b']:g})")
    report = verify_transfer(_spec(cfg), cfg["b"], grid, _spacetime_window(cfg, grid),
                             cfg["samples"], cfg["width"], cfg["threads"])
    return _write_report(report, cfg, out, [])


def cmd_verify_strichartz(cfg, out: Path) -> list:
    from .estimates.strichartz import StrichartzCase, strichartz_window, verify_strichartz
    from .spectral import make_time_window
    grid = _grid(cfg)
    try:
        case = StrichartzCase.parse(cfg["case"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if not cfg["b"] > case.min_b:
        raise UsageError(f"{case.kind} case requires b > {case.min_b:.4g} (got b={cfg['b']:g})")
    if cfg["mode"] == "free":
        window = (make_time_window(cfg["nt"], cfg["tspan"]) if cfg["nt"]
                  else strichartz_window(grid, cfg["tspan"]))
    else:
        window = _spacetime_window(cfg, grid)
    report = verify_strichartz(case, _spec(cfg), cfg["b"], grid, window, cfg["samples"],
                               cfg["mode"], cfg["width"], threads=cfg["threads"])
    return _write_report(report, cfg, out, [])


def cmd_verify_quadrilinear(cfg, out: Path) -> list:
    from .estimates.quadrilinear import verify_quadrilinear
    params = _params(cfg)
    problems = params.quadrilinear_violations()
    if problems:
        raise UsageError("; ".join(problems))
    grid = _grid(cfg)
    report = verify_quadrilinear(_spec(cfg), params, grid, _spacetime_window(cfg, grid),
                                 cfg["samples"], cfg["width"], cfg["threads"])
    return _write_report(report, cfg, out, [])


def cmd_region_scan(cfg, out: Path) -> list:
    from .estimates.regions import scan_regions
    if cfg["s"] > 0:
        print("warning: the region-B bound is stated for s <= 0", file=sys.stderr)
    try:
        scan = scan_regions(cfg["radius"], cfg["s"], cfg["step"], cfg["cutoff"], cfg["theta"],
                            keep_points=cfg["points"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out.mkdir(parents=True, exist_ok=True)
    summary = scan.summary()
    (out / "region_scan.json").write_text(json.dumps(_clean(summary), indent=2, sort_keys=True) + "\n")
    (out / "region_scan_shells.csv").write_text(scan.shells_csv())
    written = [out / "region_scan.json", out / "region_scan_shells.csv"]
    if cfg["points"]:
        (out / "region_scan_points.csv").write_text(scan.points_csv())
        written.append(out / "region_scan_points.csv")
    if not cfg["no_plots"]:
        from .plotting import plot_region_scan
        written.append(plot_region_scan(scan, out / "region_scan.png"))
    print(f"B: min margin {scan.b_min_margin:.6g} at {scan.b_argmin}; "
          f"C: min cq/sum<xi_i>^3 {scan.c_min_ratio:.6g} at {scan.c_argmin}")
    problems = []
    if not scan.partition_ok:
        problems.append("region labels do not partition the lattice")
    if scan.b_failures:
        problems.append(f"{scan.b_failures} region-B points without a permutation certificate")
    if scan.counts["C"] and not scan.c_min_ratio > 0:
        problems.append("region-C resonance ratio reaches zero")
    if problems:
        raise PropertyViolation("; ".join(problems))
    return written


def _clean(obj):
    from .estimates.report import _jsonable
    return _jsonable(obj)


def cmd_solve(cfg, out: Path) -> list:
    from .experiments import gaussian_bump
    from .solver import SolverConfig, soliton_profile, solve
    from .spectral import SpectralField
    grid = _grid(cfg)
    try:
        config = SolverConfig(grid, cfg["dt"], cfg["tend"], cfg["p"], record_stride=cfg["stride"],
                              linear_only=cfg["linear_only"])
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if cfg["zero"]:
        u0 = SpectralField(grid, np.zeros(grid.n, complex), None, True)
    elif cfg["gaussian"] is not None:
        u0 = gaussian_bump(grid, cfg["gaussian"], cfg["width"])
    else:
        u0 = soliton_profile(cfg["soliton"] if cfg["soliton"] is not None else 1.0, cfg["p"], grid)
    trace = solve(config, u0)
    written = [trace.write(out)]
    if not cfg["no_plots"]:
        from .plotting import plot_trace
        written.append(plot_trace(trace, out / "trace.png"))
    print(f"max relative L2 drift {trace.max_l2_drift():.3e}, mass drift {trace.max_mass_drift():.3e}")
    return written


def cmd_experiment(cfg, out: Path) -> list:
    from . import experiments as ex
    from .solver import SolverConfig, soliton_profile
    kind, p = cfg["kind"], cfg["p"]
    if kind == "conservation":
        grid = _grid(cfg)
        config = SolverConfig(grid, cfg["dt"] or 1e-4, cfg["tend"] or 1.0, p, record_stride=100)
        report = ex.experiment_l2_conservation(config, soliton_profile(1.0, p, grid))
    elif kind == "order":
        grid = _grid(cfg)
        config = SolverConfig(grid, cfg["dt"] or 1 / 640, cfg["tend"] or 1.0, p)
        report = ex.experiment_temporal_order(config, soliton_profile(1.0, p, grid))
    elif kind == "scaling":
        ns = cfg["ns"] or [64, 96, 128, 192]
        report = ex.scaling_refinement(ns, cfg["length"], cfg["dt"] or 1e-4, cfg["tend"] or 0.05,
                                       cfg["lam"], p, cfg["amplitude"] or 1.0, threads=cfg["threads"])
        report.checks["finest_within_tolerance"] = report.results["discrepancies"][-1] <= 1e-3
    elif kind == "picard":
        grid = _grid(cfg)
        config = SolverConfig(grid, cfg["dt"] or 1e-3, cfg["tend"] or 0.05, p)
        u0 = ex.gaussian_bump(grid, cfg["amplitude"] or 1e-3, 2.0)
        report = ex.experiment_picard(config, u0, norm=(cfg["s"], 0.0))
    else:
        grid = _grid(cfg)
        spec = _spec(cfg, amplitude=cfg["amplitude"] or 0.3)
        report = ex.experiment_rough_data_convergence(spec, grid, cfg["cutoffs"], cfg["tend"] or 0.1,
                                                      cfg["dt"] or 2e-5, p, threads=cfg["threads"])
    paths = report.write(out)
    written = [paths["json"], paths["csv"]]
    if not cfg["no_plots"]:
        from .plotting import plot_experiment
        written.append(plot_experiment(report, out / f"{report.name}.png"))
    print(json.dumps(_clean({"results": report.results, "checks": report.checks}), sort_keys=True))
    if not report.passed:
        failed = [k for k, v in report.checks.items() if not v]
        raise PropertyViolation("failed checks: " + ", ".join(failed))
    return written


COMMANDS = {
    "verify-bilinear": cmd_verify_bilinear,
    "verify-transfer": cmd_verify_transfer,
    "verify-strichartz": cmd_verify_strichartz,
    "verify-quadrilinear": cmd_verify_quadrilinear,
    "region-scan": cmd_region_scan,
    "solve": cmd_solve,
    "experiment": cmd_experiment,
}



def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    from .solver import SolverError
    try:
        cfg = resolve_config(args)
        out = Path(cfg["out"])
        out.mkdir(parents=True, exist_ok=True)
        (out / "run_config.json").write_text(json.dumps(cfg, indent=2, sort_keys=True) + "\n")
        COMMANDS[args.command](cfg, out)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PropertyViolation as exc:
        print(f"property violation: {exc}", file=sys.stderr)
        return EXIT_PROPERTY
    except SolverError as exc:
        print(f"numerical abort: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
