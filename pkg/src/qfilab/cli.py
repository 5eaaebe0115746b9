"""`qfi` command line front end.

Exit codes: 0 success, 2 config error, 3 capability error,
4 acceptance-verdict failure (only when --check is passed).
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import CapabilityError, ConfigError
from .experiments import PRESETS, load_config, preset_config, run_experiment
from .weingarten import weingarten_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_CAPABILITY = 3
EXIT_VERDICT = 4


def _add_run_flags(sub):
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--seed", type=int, default=None, help="override master seed")
    sub.add_argument("--samples", type=int, default=None, help="override sample count")
    sub.add_argument("--threads", type=int, default=None, help="worker threads")
    sub.add_argument("--check", action="store_true",
                     help="exit with code 4 if any verdict fails")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qfi",
                                     description="QFI scaling experiments for chaotic "
                                                 "Floquet dynamics")
    subs = parser.add_subparsers(dest="command", required=True)

    run = subs.add_parser("run", help="run an experiment from a JSON config")
    run.add_argument("config", help="path to config.json")
    _add_run_flags(run)

    preset = subs.add_parser("preset", help="run a named preset")
    preset.add_argument("name", help="preset name (see list-presets)")
    _add_run_flags(preset)

    wg = subs.add_parser("weingarten", help="dump a Weingarten table as JSON")
    wg.add_argument("--t", type=int, required=True, help="degree (<= 6)")
    wg.add_argument("--n", type=int, required=True, help="dimension N")
    wg.add_argument("--out", default=None, help="write JSON here instead of stdout")

    subs.add_parser("list-presets", help="list available presets")
    return parser


def _run_and_report(cfg: dict, args, default_name: str) -> int:
    out_dir = args.out or f"qfi_out/{default_name}"
    report = run_experiment(cfg, out_dir=out_dir, seed=args.seed,
                            samples=args.samples, workers=args.threads)
    for v in report.verdicts:
        print(f"[{'PASS' if v.passed else 'FAIL'}] {v.name}: {v.detail}")
    print(f"artifacts written to {out_dir}")
    if args.check and not report.passed:
        return EXIT_VERDICT
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            cfg = load_config(args.config)
            name = cfg.get("experiment", "run") if isinstance(cfg, dict) else "run"
            return _run_and_report(cfg, args, str(name))
        if args.command == "preset":
            cfg = preset_config(args.name)
            return _run_and_report(cfg, args, args.name)
        if args.command == "weingarten":
            table = weingarten_table(args.t, args.n)
            text = json.dumps(table.to_json_dict(), indent=2)
            if args.out:
                with open(args.out, "w", encoding="utf-8") as fh:
                    fh.write(text + "\n")
            else:
                print(text)
            return EXIT_OK
        if args.command == "list-presets":
            for name in sorted(PRESETS):
                print(f"{name}: {PRESETS[name]['experiment']}")
            return EXIT_OK
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except CapabilityError as exc:
        print(f"capability error: {exc}", file=sys.stderr)
        return EXIT_CAPABILITY
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    raise AssertionError("unreachable")


if __name__ == "__main__":
    raise SystemExit(main())
