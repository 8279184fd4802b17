"""Command line entry point: ``advisearch {bounds,plan,simulate,exact,sweep}``.

Exit codes: 0 success, 1 a bound check failed under ``--assert-bounds``,
2 configuration error, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .errors import ConfigError, InvalidArgument, InvalidChannel, UnsupportedEngine
from .geometric import block_plan
from .harness import ExperimentConfig, coerce, emit_report, load_config_file, run

EXIT_OK, EXIT_BOUNDS, EXIT_CONFIG, EXIT_IO = 0, 1, 2, 3

_MODES = {"simulate": "monte_carlo", "exact": "exact", "bounds": "bounds", "sweep": "sweep"}

# flag dest -> config key
_FLAG_KEYS = {
    "n": "N",
    "delta": "delta",
    "advice": "advice",
    "p": "p",
    "corollary_q": "corollary_q",
    "epsilon": "epsilon",
    "c": "c",
    "max_rounds": "max_rounds",
    "engine": "engine",
    "trials": "trials",
    "seed": "seed",
    "channel": "channel",
    "grid": "grid",
    "sweep_trials": "sweep_trials",
    "threads": "threads",
}


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="flat key = value file; flags override it")
    common.add_argument("--n", type=str, help="database size N")
    common.add_argument("--delta", type=str, help="power-law exponent offset (default 1/N)")
    common.add_argument("--advice", choices=("power_law", "uniform"))
    noise = common.add_mutually_exclusive_group()
    noise.add_argument("--p", type=str, help="noise probability")
    noise.add_argument("--corollary-q", type=str, help="use p = 1/(ln N)^q")
    common.add_argument("--epsilon", type=str)
    common.add_argument("--c", type=str)
    common.add_argument("--max-rounds", type=str)
    common.add_argument("--engine", choices=("auto", "full", "reduced"))
    common.add_argument("--trials", type=str)
    common.add_argument("--seed", type=str)
    common.add_argument("--channel", choices=("depolarizing", "dephasing"))
    common.add_argument("--grid", type=str, help="sweep sizes, e.g. 2^7,2^10,2^14")
    common.add_argument("--sweep-trials", type=str, help="Monte Carlo trials per sweep row (0 = exact)")
    common.add_argument("--threads", type=str, help="worker threads (results do not depend on it)")
    common.add_argument("--format", choices=("json", "csv", "text"), default="json")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--assert-bounds", action="store_true", help="exit 1 if any check fails")

    parser = argparse.ArgumentParser(prog="advisearch", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("bounds", parents=[common], help="closed-form bounds only")
    sub.add_parser("plan", parents=[common], help="print the block plan for N")
    sub.add_parser("simulate", parents=[common], help="Monte Carlo estimate of the expected queries")
    sub.add_parser("exact", parents=[common], help="exact expected queries and bounds")
    sub.add_parser("sweep", parents=[common], help="one CSV/JSON row per N in --grid")
    return parser


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    if args.config:
        values.update(load_config_file(args.config))
    for dest, key in _FLAG_KEYS.items():
        raw = getattr(args, dest, None)
        if raw is None:
            continue
        _, value = coerce(key, raw) if isinstance(raw, str) else (key, raw)
        values[key] = value
    # a noise flag replaces whichever noise setting the file chose
    if args.p is not None:
        values["corollary_q"] = None
    elif args.corollary_q is not None:
        values["p"] = None
    if args.command in _MODES:
        values["mode"] = _MODES[args.command]
    return ExperimentConfig(**values)


def _plan_output(N: int, fmt: str) -> str:
    plan = block_plan(N)
    if fmt == "json":
        blocks = [{"start": b.start, "end": b.end, "size": b.size, "mode": b.mode} for b in plan]
        return json.dumps({"N": N, "blocks": blocks}, indent=2) + "\n"
    if fmt == "csv":
        return "start,end,size,mode\n" + "".join(f"{b.start},{b.end},{b.size},{b.mode}\n" for b in plan)
    return "".join(f"[{b.start}, {b.end}]  size={b.size}  {b.mode}\n" for b in plan)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        config = build_config(args)
        if args.command == "plan":
            text = _plan_output(config.N, args.format)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text)
            else:
                sys.stdout.write(text)
            return EXIT_OK
        report = run(config)
        text = emit_report(report, args.format, args.out)
    except (ConfigError, InvalidArgument, InvalidChannel, UnsupportedEngine) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    if not args.out:
        sys.stdout.write(text)
    if args.assert_bounds and not report.passed:
        return EXIT_BOUNDS
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
