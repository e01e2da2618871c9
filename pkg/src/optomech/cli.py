"""Command-line front end.

Exit status: 0 success, 1 validation failure, 2 usage or configuration
error, 3 numerical failure.  Every command writes ``manifest.json`` next to
its outputs, including when it fails part way.
"""
from __future__ import annotations

import argparse
import dataclasses
import json
import math
import sys
import time
from datetime import datetime, timezone
from pathlib import Path

from . import __version__, analytics, figures, langevin, quadratures, validation
from .core import SystemParams, params_from_mapping, read_config
from .errors import ConfigError, OptomechError

EXIT_OK, EXIT_VALIDATION, EXIT_USAGE, EXIT_NUMERICAL = 0, 1, 2, 3
SIM_FIELDS = {f.name for f in dataclasses.fields(langevin.SimConfig)}


class RunManifest:
    def __init__(self, command: str, argv: list, out_dir: Path):
        self.data = {
            "command": command,
            "argv": list(argv),
            "version": __version__,
            "started": _now(),
            "seeds": [],
            "outputs": [],
            "status": "running",
        }
        self.out_dir = out_dir

    def params(self, p: SystemParams):
        self.data["params"] = {"si": p.as_dict(), "kappa_normalised": p.scaled(), "warnings": list(p.warnings)}

    def output(self, path: Path):
        self.data["outputs"].append(str(path))

    def write(self, status: str, error: str | None = None) -> Path:
        self.data.update(status=status, finished=_now())
        if error:
            self.data["error"] = error
        self.out_dir.mkdir(parents=True, exist_ok=True)
        path = self.out_dir / "manifest.json"
        path.write_text(json.dumps(self.data, indent=2, default=_json_default) + "\n", encoding="utf-8")
        return path


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _json_default(o):
    if hasattr(o, "item"):
        return o.item()
    if isinstance(o, tuple):
        return list(o)
    raise TypeError(f"not serialisable: {type(o).__name__}")


def _clean(obj):
    """Replace non-finite floats so the JSON stays standard."""
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    return obj


def _write_json(path: Path, data) -> None:
    path.write_text(json.dumps(_clean(data), indent=2, default=_json_default) + "\n", encoding="utf-8")


# ---------------------------------------------------------------------------
# configuration


def parse_overrides(items) -> dict:
    out = {}
    for item in items or ():
        key, sep, value = item.partition("=")
        if not sep or not key.strip():
            raise ConfigError(f"--set expects key=value, got {item!r}")
        out[key.strip()] = value.strip()
    return out


def _load_mapping(args) -> dict:
    data = read_config(args.config) if args.config else {}
    sim = data.pop("sim", None)
    if isinstance(sim, dict):
        data = {**sim, **data}
    return {**data, **parse_overrides(args.set)}


def _coerce(key, text):
    if not isinstance(text, str):
        return text
    low = text.lower()
    if low in ("true", "false"):
        return low == "true"
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


# ---------------------------------------------------------------------------
# commands


def cmd_figure(args, manifest: RunManifest) -> int:
    spec = figures.get_figure(args.name)
    overrides = {k: float(v) for k, v in _load_mapping(args).items() if not isinstance(v, dict)}
    manifest.params(spec.params(**{k: v for k, v in overrides.items()}))
    axes = None
    if args.axis:
        if len(args.axis) != 2:
            raise ConfigError("figure axes are replaced as a pair: give --axis twice")
        axes = tuple(figures.Axis.parse(a) for a in args.axis)
    grid = figures.figure_grid(args.name, overrides, axes=axes, jobs=args.jobs)
    path = _write_grid(grid, Path(args.out), args.name, args.format)
    manifest.output(path)
    return EXIT_OK


def _write_grid(grid, out: Path, stem: str, fmt: str) -> Path:
    out.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        path = out / f"{stem}.json"
        _write_json(path, {"value": grid.value_name, "rows": grid.to_records()})
    else:
        path = out / f"{stem}.csv"
        grid.to_csv(path)
    return path


def cmd_sweep(args, manifest: RunManifest) -> int:
    mapping = _load_mapping(args)
    base = params_from_mapping(mapping)
    manifest.params(base)
    axes = [figures.Axis.parse(a) for a in args.axis or ()]
    grid = figures.sweep(base, axes, args.quantity, jobs=args.jobs)
    path = _write_grid(grid, Path(args.out), f"sweep_{args.quantity}", args.format)
    manifest.output(path)
    return EXIT_OK


def _sim_config(p: SystemParams, mapping: dict, mode: str, seed) -> langevin.SimConfig:
    given = {k: _coerce(k, v) for k, v in mapping.items() if k in SIM_FIELDS}
    values = {"duration": 200.0 / p.kappa, "n_traj": 20, "record_every": 10, **given}
    if "dt" not in given:
        # whole numbers of steps and of records per mechanical period keep the demodulation exact
        rec = int(values["record_every"])
        per_period = rec * math.ceil(2 * math.pi * 50 * max(p.kappa, p.omega_m) / p.omega_m / rec)
        values["dt"] = 2 * math.pi / p.omega_m / per_period
    if mode == "ringdown":
        values.setdefault("x0", 1e-3 * p.omega_m / p.g0 * p.x_zpt)
        damping = p.gamma_m + abs(float(analytics.optical_damping(p)))
        if "duration" not in given and damping > 0:
            cap = 2000 * 2 * math.pi / p.omega_m
            values["duration"] = max(values["duration"], min(3.0 / damping, cap))
    if seed is not None:
        values["seed"] = seed
    return langevin.SimConfig(**values)


def _z(est, ref, u_ref):
    err = math.hypot(est.std_error, u_ref)
    return (est.value - ref) / err if err > 0 else float("nan")


def cmd_simulate(args, manifest: RunManifest) -> int:
    mapping = _load_mapping(args)
    p = params_from_mapping(mapping)
    manifest.params(p)
    cfg = _sim_config(p, mapping, args.mode, args.seed)
    manifest.data["seeds"] = [cfg.seed]
    manifest.data["sim_config"] = dataclasses.asdict(cfg)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    summary: dict = {"mode": args.mode}

    if args.mode == "trajectory":
        ens = langevin.simulate(p, cfg, jobs=args.jobs)
        path = out / "trajectory.csv"
        ens.to_csv(path)
        manifest.output(path)
        summary["final_mean_x"] = float(ens.x[:, -1].mean())
    elif args.mode == "ringdown":
        fit = langevin.ring_down(p, cfg, paired=not args.unpaired, jobs=args.jobs)
        g_ref = p.gamma_m + float(analytics.optical_damping(p))
        w_ref = p.omega_m + float(analytics.frequency_shift(p))
        summary.update(
            gamma_eff=fit.gamma_eff.as_dict(),
            omega_eff=fit.omega_eff.as_dict(),
            analytic={"gamma_eff": g_ref, "omega_eff": w_ref},
            # the closed forms assume steady oscillation; their error is O(Gamma_opt Gamma_eff / kappa)
            model_uncertainty=abs(g_ref - p.gamma_m) * abs(g_ref) / p.kappa,
            z_scores={
                "gamma_eff": _z(fit.gamma_eff, g_ref, abs(g_ref - p.gamma_m) * abs(g_ref) / p.kappa),
                "omega_eff": _z(fit.omega_eff, w_ref, abs(g_ref - p.gamma_m) * abs(g_ref) / p.kappa),
            },
            unstable=fit.unstable,
        )
    elif args.mode == "intensity":
        est = langevin.mean_intensity_mc(p, cfg, jobs=args.jobs)
        ref = float(analytics.intracavity_energy(p))
        summary.update(beta0_sq=est.as_dict(), analytic={"beta0_sq": ref}, z_score=est.z_score(ref))
    else:
        vx, vy = langevin.quadrature_variance_mc(p, cfg, burn_in=args.burn_in, jobs=args.jobs)
        ref = quadratures.quadrature_variances(p)
        summary.update(
            var_x=vx.as_dict(),
            var_y=vy.as_dict(),
            analytic={"var_x": ref.var_x, "var_y": ref.var_y, "validity": ref.validity},
        )
    path = out / "estimates.json"
    _write_json(path, summary)
    manifest.output(path)
    if summary.get("unstable"):
        print("warning: effective damping is negative (mechanical instability)", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args, manifest: RunManifest) -> int:
    only = None
    if args.only:
        try:
            only = [int(s) for s in args.only.split(",") if s.strip()]
        except ValueError:
            raise ConfigError("--only expects a comma separated list of criterion numbers") from None
        bad = [n for n in only if n not in validation.CRITERIA]
        if bad:
            raise ConfigError(f"unknown criteria {bad}")
    report = validation.run_all(args.profile, only=only, jobs=args.jobs)
    for line in report["lines"]:
        print(line)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "validation.json"
    _write_json(path, report)
    manifest.output(path)
    return EXIT_OK if report["passed"] else EXIT_VALIDATION


def cmd_plot_script(args, manifest: RunManifest) -> int:
    csv_path = args.csv or f"{args.name}.csv"
    text = figures.gnuplot_script(args.name, csv_path)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / f"{args.name}.gp"
    path.write_text(text, encoding="utf-8")
    manifest.output(path)
    return EXIT_OK


def cmd_config(args, manifest: RunManifest) -> int:
    p = params_from_mapping(_load_mapping(args))
    manifest.params(p)
    doc = {"si": p.as_dict(), "kappa_normalised": p.scaled(), "g0": p.g0, "n_max": p.n_max, "warnings": list(p.warnings)}
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    path = out / "params.json"
    _write_json(path, doc)
    manifest.output(path)
    print(json.dumps(_clean(doc), indent=2))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON or key=value parameter file")
    common.add_argument("--out", default=".", help="output directory (default: current)")
    common.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a parameter (repeatable)")
    common.add_argument("--jobs", type=int, default=None, help="worker processes (default: $OPTOMECH_JOBS or 1)")
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--format", choices=("csv", "json"), default="csv")

    parser = argparse.ArgumentParser(prog="optomech", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("figure", parents=[common], help="write the data grid of a figure")
    p.add_argument("name", choices=sorted(figures.FIGURES))
    p.add_argument("--axis", action="append", metavar="FIELD=START:STOP:NUM", help="replace both axes (give twice)")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("sweep", parents=[common], help="evaluate a quantity over one or two parameter axes")
    p.add_argument("--axis", action="append", required=True, metavar="FIELD=START:STOP:NUM|V1,V2,...")
    p.add_argument("--quantity", required=True, choices=sorted(figures.QUANTITIES))
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("simulate", parents=[common], help="run the stochastic integrator")
    p.add_argument("--mode", choices=("ringdown", "trajectory", "intensity", "quadrature"), default="ringdown")
    p.add_argument("--unpaired", action="store_true", help="ring-down without the shared-noise baseline run")
    p.add_argument("--burn-in", type=float, default=0.0, help="seconds discarded before quadrature averaging")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", parents=[common], help="run the acceptance checks")
    p.add_argument("--profile", choices=validation.PROFILES, default="full")
    p.add_argument("--only", help="comma separated criterion numbers")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("plot-script", parents=[common], help="write a gnuplot script for a figure CSV")
    p.add_argument("name", choices=sorted(figures.FIGURES))
    p.add_argument("--csv", help="path of the CSV the script should read")
    p.set_defaults(func=cmd_plot_script)

    p = sub.add_parser("config", parents=[common], help="resolve and echo a parameter set")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    manifest = RunManifest(args.command, argv, Path(args.out))
    t0 = time.perf_counter()
    try:
        code = args.func(args, manifest)
    except ConfigError as exc:
        manifest.write("config_error", str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OptomechError, ArithmeticError) as exc:
        manifest.write("numerical_error", f"{type(exc).__name__}: {exc}")
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except KeyError as exc:  # unknown figure and similar lookups
        manifest.write("config_error", str(exc))
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    manifest.data["elapsed_s"] = time.perf_counter() - t0
    manifest.write("ok" if code == EXIT_OK else "validation_failed")
    return code


if __name__ == "__main__":
    sys.exit(main())
