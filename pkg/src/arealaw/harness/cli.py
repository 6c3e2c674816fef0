"""Command line front end.

Exit status: 0 success, 2 configuration error, 3 invariant or oracle
failure, 4 every sample rejected at some volume.
"""

import argparse
import sys

from ..errors import NumericalConsistencyError
from . import config as cfgmod, experiments, output, selfcheck

EXIT_OK, EXIT_CONFIG, EXIT_INVARIANT, EXIT_REJECTED = 0, 2, 3, 4

_COMMANDS = {
    "area-law": "area_law",
    "thermal": "thermal_sweep",
    "correlator": "correlator",
    "selfcheck": "selfcheck",
}


def build_parser():
    p = argparse.ArgumentParser(prog="arealaw", description="Disorder-averaged entanglement of oscillator systems on graphs.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="experiment config file (optional for selfcheck)", required=name != "selfcheck")
        s.add_argument("--seed", type=int)
        s.add_argument("--samples", type=int)
        s.add_argument("--out", help="output path prefix")
        s.add_argument("--workers", type=int)
        if name == "selfcheck":
            s.add_argument("--inject", choices=selfcheck.INJECTIONS[1:], help="plant a fault (mutation test)")
    return p


def _load(args, kind):
    base = cfgmod.load(args.config, kind) if args.config else cfgmod.ExperimentConfig(kind=kind, samples=5, sizes=(10,))
    return base.with_overrides(seed=args.seed, samples=args.samples, out=args.out, workers=args.workers)


def _report(res, paths):
    for agg in res.aggregates:
        if "mean_negativity" in agg:
            print(f"n={agg['n']} beta={agg['beta']}: mean N = {output.fmt(agg['mean_negativity'])} "
                  f"+- {output.fmt(agg['se_negativity'])} ({agg['accepted']}/{agg['requested']} accepted)")
    if res.correlator is not None:
        for name, fit in res.correlator["fits"].items():
            if fit["status"] == "ok":
                print(f"{name}: mu' = {fit['mu']:.6g} +- {fit['mu_stderr']:.2g}, R^2 = {fit['r2']:.6f}")
            else:
                print(f"{name}: fit {fit['status']} ({fit['reason']})")
    for v in res.violations[:20]:
        print(f"VIOLATION {v}", file=sys.stderr)
    for p in paths:
        print(f"wrote {p}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    kind = _COMMANDS[args.command]
    try:
        cfg = _load(args, kind)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    if kind == "selfcheck":
        report = selfcheck.run_selfcheck(cfg, args.inject)
        for line in report.lines():
            print(line)
        if args.out or args.config:
            output.write_json(output.prefix_path(cfg.out, "selfcheck.json"), report.as_dict())
        return EXIT_OK if report.ok else EXIT_INVARIANT

    runner = {
        "area_law": experiments.run_area_law,
        "thermal_sweep": experiments.run_thermal_sweep,
        "correlator": experiments.run_correlator,
    }[kind]
    try:
        res = runner(cfg)
    except cfgmod.ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except experiments.AllRejected as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_REJECTED
    except NumericalConsistencyError as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    paths = experiments.write_outputs(res)
    _report(res, paths)
    return EXIT_INVARIANT if res.violations else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
