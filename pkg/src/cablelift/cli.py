"""Command-line entry point.

Subcommands:
  run <scenario|groupA|groupB|groupC> [--mode adaptive|baseline] [--out DIR]
      [--dt SECONDS] [--duration SECONDS] [--seed N]
  compare <group> [--out DIR]
  validate <scenario-file>

Exit codes: 0 success, 1 configuration error, 2 divergence.
"""
import argparse
import sys

from .errors import ConfigurationError, DivergenceError
from .harness import compare, run, write_outputs
from .scenarios import load_scenario


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="cablelift",
        description="Multi-quadrotor cable-suspended payload transport simulator")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="simulate one scenario")
    p_run.add_argument("scenario", help="built-in group name or YAML scenario file")
    p_run.add_argument("--mode", choices=("adaptive", "baseline"), default=None)
    p_run.add_argument("--out", default="out")
    p_run.add_argument("--dt", type=float, default=None, metavar="SECONDS")
    p_run.add_argument("--duration", type=float, default=None, metavar="SECONDS")
    p_run.add_argument("--seed", type=int, default=None,
                       help="accepted for interface stability; the simulator is "
                            "deterministic and ignores it")

    p_cmp = sub.add_parser("compare", help="baseline vs adaptive on one group")
    p_cmp.add_argument("group", help="built-in group name or YAML scenario file")
    p_cmp.add_argument("--out", default="out")

    p_val = sub.add_parser("validate", help="validate a scenario file")
    p_val.add_argument("scenario_file")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "run":
            overrides = {}
            if args.mode is not None:
                overrides["mode"] = args.mode
            if args.dt is not None:
                overrides["dt"] = args.dt
            if args.duration is not None:
                overrides["duration"] = args.duration
            scenario = load_scenario(args.scenario, **overrides)
            tr, metrics = run(scenario)
            write_outputs(tr, metrics, args.out, scenario)
            print(f"wrote {args.out}/trajectory.csv "
                  f"({tr.n_records} records, diverged={tr.diverged})")
            if tr.diverged:
                print(f"divergence at t={tr.divergence_time} s", file=sys.stderr)
                return 2
            return 0

        if args.command == "compare":
            report = compare(args.group, out_dir=args.out)
            print(f"comparison written to {report['report_path']}")
            for mode in ("baseline", "adaptive"):
                if report[mode]["diverged"]:
                    print(f"{mode} run diverged", file=sys.stderr)
                    return 2
            return 0

        # validate
        load_scenario(args.scenario_file)
        print(f"{args.scenario_file}: valid")
        return 0

    except ConfigurationError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"divergence: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
