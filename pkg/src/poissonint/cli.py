"""Command line front end.

Subcommands
-----------
run <config.toml>         integrate and write <name>.csv / <name>.json
order-study <config.toml> dt-refinement table and slope
drift <trajectory.csv>    invariant drift summary of a written trajectory
fixtures                  re-run the checks under fixtures/

Exit codes: 0 success, 2 configuration or parse error, 3 numerical
failure, 4 fixture mismatch.
"""

import argparse
import sys

from .errors import (
    ConfigError,
    NewtonDiverged,
    NumericalFailure,
    ParseError,
    UsageError,
)
from .harness import (
    drift_report,
    load_config,
    order_study,
    record_from_csv,
    run,
    run_fixtures,
    write_order_study,
    write_trajectory,
)

_EXIT_CONFIG = 2
_EXIT_NUMERICAL = 3
_EXIT_FIXTURE = 4


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="poissonint",
        description="Poisson integrator benchmark harness",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="integrate one configured trajectory")
    p_run.add_argument("config", help="TOML run configuration")
    p_run.add_argument("--out", default=".", help="output directory")
    p_run.add_argument("--quiet", action="store_true", help="suppress progress text")

    p_ord = sub.add_parser("order-study", help="global error under dt refinement")
    p_ord.add_argument("config", help="TOML run configuration with [order_study]")
    p_ord.add_argument("--out", default=".", help="output directory")
    p_ord.add_argument("--quiet", action="store_true", help="suppress progress text")

    p_drift = sub.add_parser("drift", help="invariant drift of a stored trajectory")
    p_drift.add_argument("trajectory", help="CSV written by the run subcommand")

    p_fix = sub.add_parser("fixtures", help="re-run the bundled fixture checks")
    p_fix.add_argument("--dir", default="fixtures", help="fixture directory")
    p_fix.add_argument("--quiet", action="store_true", help="only report failures")
    return parser


def _say(quiet, text):
    if not quiet:
        print(text)


def _cmd_run(args):
    cfg = load_config(args.config)
    record = run(cfg)
    csv_path, meta_path = write_trajectory(record, args.out)
    _say(args.quiet, f"wrote {csv_path}")
    _say(args.quiet, f"wrote {meta_path}")
    if "drift" in cfg.outputs:
        _print_drift(drift_report(record), quiet=args.quiet)
    if "order-study" in cfg.outputs:
        result = order_study(cfg)
        ocsv, ometa = write_order_study(result, cfg, args.out)
        _say(args.quiet, f"wrote {ocsv}")
        _say(args.quiet, f"wrote {ometa}")
        _say(args.quiet, f"slope {result.slope:.4f} vs {result.reference}")
    return 0


def _cmd_order_study(args):
    cfg = load_config(args.config)
    if not cfg.order_dts or cfg.order_reference is None:
        raise ConfigError("order-study needs an [order_study] section")
    result = order_study(cfg)
    csv_path, meta_path = write_order_study(result, cfg, args.out)
    _say(args.quiet, f"wrote {csv_path}")
    _say(args.quiet, f"wrote {meta_path}")
    for dt, err in result.rows:
        _say(args.quiet, f"dt {dt:<12g} error {err:.6e}")
    print(f"slope {result.slope:.4f} vs {result.reference}")
    return 0


def _print_drift(report, quiet=False):
    print(f"max |H - H_0|: {report.h_drift:.6e}")
    for j, d in enumerate(report.casimir_drifts):
        print(f"max |C{j} - C{j}_0|: {d:.6e}")
    if not quiet:
        buckets = ", ".join(f"{k}: {v}" for k, v in report.newton_histogram.items())
        print(f"newton iterations over {report.steps} steps: {{{buckets}}}")
    return 0


def _cmd_drift(args):
    return _print_drift(drift_report(record_from_csv(args.trajectory)))


def _cmd_fixtures(args):
    results = run_fixtures(args.dir)
    failed = 0
    for r in results:
        if r.passed:
            _say(args.quiet, f"PASS {r.name}: {r.detail}")
        else:
            failed += 1
            print(f"FAIL {r.name}: {r.detail}")
    print(f"{len(results) - failed}/{len(results)} fixtures passed")
    return _EXIT_FIXTURE if failed else 0


_COMMANDS = {
    "run": _cmd_run,
    "order-study": _cmd_order_study,
    "drift": _cmd_drift,
    "fixtures": _cmd_fixtures,
}


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, ParseError, UsageError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (NumericalFailure, NewtonDiverged) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
