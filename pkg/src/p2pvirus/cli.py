"""Command-line front end.

Exit status: 0 on success, 1 on runtime or numeric failure, 2 on usage or
configuration errors.
"""

from __future__ import annotations

import argparse
import difflib
import sys
from pathlib import Path

from . import experiments
from .epidemic import EpidemicParams, OdeModel, OdeState, integrate_ode
from .errors import ConfigError, NumericError
from .malware import builtin_catalog, builtin_catalog_text, compare_catalog, serialize_catalog
from .metrics import export_comparison_csv, export_csv, export_mean_csv, export_ode_csv, export_sweep_csv
from .scenario import read_scenario
from .simcore import init_scenario, run

EXIT_OK, EXIT_RUNTIME, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _parse_sets(pairs) -> dict[str, str]:
    out = {}
    for pair in pairs or ():
        key, sep, value = pair.partition("=")
        if not sep or not key.strip():
            raise UsageError(f"--set expects key=value, got {pair!r}")
        out[key.strip()] = value.strip()
    return out


def _load_scenario(path):
    if not Path(path).is_file():
        raise UsageError(f"scenario file not found: {path}")
    return read_scenario(path)


def cmd_run(args) -> int:
    config = _load_scenario(args.scenario).with_overrides(_parse_sets(args.set))
    series = run(init_scenario(config))
    if args.out:
        export_csv(series, args.out)
    final = {name: series.final(name) for name in
             ("susceptible", "exposed", "infected", "removed", "downloads", "scan_hits", "infections")}
    print(" ".join(f"{k}={v}" for k, v in final.items()))
    return EXIT_OK


def _axis_values(name: str, text: str | None):
    if text is None:
        return None
    if name in ("reinfection", "populations"):
        raise UsageError(f"experiment {name!r} takes no --values")
    parts = [p for p in text.split(",") if p.strip()]
    try:
        if name == "vulnerability":
            return [float(p) for p in parts]
        return [int(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad --values {text!r}") from None


def _value_tag(value) -> str:
    if isinstance(value, bool):
        return "on" if value else "off"
    return str(value)


def cmd_experiment(args) -> int:
    if args.name not in experiments.EXPERIMENTS:
        raise UsageError(f"unknown experiment {args.name!r}; valid names: {', '.join(experiments.EXPERIMENTS)}")
    base = _load_scenario(args.scenario) if args.scenario else experiments.BASE_SCENARIO
    base = base.with_overrides(_parse_sets(args.set))
    values = _axis_values(args.name, args.values)
    result = experiments.run_experiment(args.name, base, values, args.seeds, args.jobs)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for rec in result.records:
        stem = f"run_seed{rec.seed}" if args.name == "populations" else f"run_{_value_tag(rec.value)}_seed{rec.seed}"
        export_csv(rec.series, out / f"{stem}.csv")
    export_sweep_csv(result.sweep, out / "sweep.csv")
    if args.name == "populations":
        export_mean_csv(result.details["means"], out / "populations_mean.csv")
        export_ode_csv(result.details["ode"], out / "ode.csv")
    print(result.status_line())
    return EXIT_OK


def _nearest(name: str, names) -> str:
    close = difflib.get_close_matches(name, names, n=1, cutoff=0.0)
    return f"; did you mean {close[0]!r}?" if close else ""


def cmd_catalog(args) -> int:
    catalog = builtin_catalog()
    names = [p.name for p in catalog]
    if args.action == "list":
        for name in names:
            print(name)
    elif args.action == "show":
        if not args.name:
            raise UsageError("catalog show needs a virus name")
        matches = [p for p in catalog if p.name.lower() == args.name.lower()]
        if not matches:
            raise UsageError(f"unknown virus {args.name!r}{_nearest(args.name, names)}")
        sys.stdout.write(serialize_catalog(matches))
    elif args.action == "compare":
        text = export_comparison_csv(compare_catalog(catalog), args.out)
        if not args.out:
            sys.stdout.write(text)
    elif args.action == "export":
        text = builtin_catalog_text()
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8")
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_ode(args) -> int:
    params = EpidemicParams(args.beta, args.sigma, args.delta, args.model not in ("SIR", "SEIR"), args.vulnerability)
    x0 = OdeState.from_infected(args.i0, args.e0, args.r0)
    trajectory = integrate_ode(x0, params, OdeModel(args.model), args.horizon, args.dt)
    text = export_ode_csv(trajectory, args.out)
    if not args.out:
        sys.stdout.write(text)
    s, e, i, r = trajectory.states[-1]
    print(f"t={trajectory.times[-1]:g} s={s:.6f} e={e:.6f} i={i:.6f} r={r:.6f}", file=sys.stderr)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="p2pvirus", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="run one simulation")
    p.add_argument("scenario", help="scenario file (key = value lines)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE", help="override a scenario key")
    p.add_argument("--out", help="series CSV path")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("experiment", help="run one of the experiment sweeps")
    p.add_argument("name", help=", ".join(experiments.EXPERIMENTS))
    p.add_argument("--scenario", help="base scenario file (default: built-in)")
    p.add_argument("--set", action="append", metavar="KEY=VALUE")
    p.add_argument("--values", help="comma-separated axis values")
    p.add_argument("--seeds", type=int, help="seeds per axis value")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("catalog", help="inspect the malware catalog")
    p.add_argument("action", choices=("list", "show", "compare", "export"))
    p.add_argument("name", nargs="?")
    p.add_argument("--out")
    p.set_defaults(func=cmd_catalog)

    p = sub.add_parser("ode", help="integrate a mean-field model")
    p.add_argument("--model", choices=[m.value for m in OdeModel], default="SIS")
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--delta", type=float, default=0.0)
    p.add_argument("--vulnerability", type=float, default=1.0)
    p.add_argument("--i0", type=float, default=0.01)
    p.add_argument("--e0", type=float, default=0.0)
    p.add_argument("--r0", type=float, default=0.0)
    p.add_argument("--horizon", type=float, required=True)
    p.add_argument("--dt", type=float, default=0.01)
    p.add_argument("--out")
    p.set_defaults(func=cmd_ode)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except (RuntimeError, OSError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
