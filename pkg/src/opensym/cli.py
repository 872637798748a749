"""
Command-line front end.

Subcommands::

    opensym check <config>       run every check in a YAML config
    opensym classify <config>    classify R(t) for the config's candidates
    opensym spectrum <config>    eigenvalues of the config's H
    opensym paper-examples       regression over the whole catalog

Exit codes: 0 everything passes or matches, 1 a check fails or an
expectation mismatches, 2 the configuration (or command line) is invalid.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from . import engine as E
from .catalog import PAPER_EXAMPLES, CatalogCheck, paper_catalog
from .config import DEFAULT_SEED, CheckSpec, RunConfig, parse_config
from .errors import OpenSymError
from .report import (EXIT_CONFIG, emit_machine, format_human, paper_examples_report, run_checks,
                     spectrum_report)
from .runner import run_model, spectrum


def _times(text: str) -> tuple:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("need at least one time")
    return vals


def _positive_float(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number, got {text!r}") from None
    if v <= 0:
        raise argparse.ArgumentTypeError("must be positive")
    return v


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--tol", type=_positive_float, help="absolute pass threshold (overrides defaults)")
    common.add_argument("--times", type=_times, help="comma-separated evaluation times")
    common.add_argument("--guard", type=_positive_int, help="Fock levels excluded at each cutoff")
    common.add_argument("--seed", type=int, help=f"seed for randomized checks (default {DEFAULT_SEED})")
    common.add_argument("--format", choices=("human", "machine"), help="report format (default human)")
    common.add_argument("--out", type=Path, help="write the report here instead of stdout")
    common.add_argument("--timings", action="store_true",
                        help="add wall-clock timings (makes the report non-deterministic)")
    common.add_argument("--jobs", type=_positive_int, default=1, help="run checks concurrently")

    p = _Parser(prog="opensym", description="Symmetry checks for open quantum dynamics.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name, helptext in (("check", "run every check in a config"),
                           ("classify", "classify R(t) for the config's candidates"),
                           ("spectrum", "dump the eigenvalues of the config's Hamiltonian")):
        sp = sub.add_parser(name, parents=[common], help=helptext)
        sp.add_argument("config", type=Path)
    sub.add_parser("paper-examples", parents=[common], help="regression over every catalog model")
    return p


def _overrides(args) -> dict:
    return {"times": args.times, "tolerance": args.tol, "guard": args.guard, "seed": args.seed}


def _load(args) -> RunConfig:
    try:
        text = args.config.read_text()
    except OSError as exc:
        raise OpenSymError(f"cannot read config {args.config}: {exc.strerror}") from None
    config = parse_config(text, _overrides(args))
    config.source = str(args.config)
    return config


def _classify_config(config: RunConfig) -> RunConfig:
    """Replace the config's checks with one classification per candidate."""
    own = {s.check.candidate: s for s in config.checks if s.check.kind == "classify"}
    names = [s.check.candidate for s in config.checks if s.check.candidate]
    names = list(dict.fromkeys(names)) or sorted(config.model.candidates)
    base = config.checks[0].settings
    checks = []
    for n in names:
        if n in own:
            checks.append(own[n])
            continue
        exp = next((dict(c.expect) for c in config.model.checks
                    if c.kind == "classify" and c.candidate == n), None)
        checks.append(CheckSpec(CatalogCheck("classify", exp or {}, n), base, exp is not None))
    return RunConfig(config.model, checks, config.seed, config.output, config.source)


def _run_paper_examples(args):
    runs, tim = [], {} if args.timings else None
    for name, params in PAPER_EXAMPLES:
        model = paper_catalog(name, **params)
        settings = None
        if args.times is not None or args.tol is not None or args.guard is not None:
            guard = args.guard or (model.truncation or {}).get("guard", 2)
            settings = E.CheckSettings(args.times or E.DEFAULT_TIMES, E.DEFAULT_S_VALUES, args.tol, guard)
        t0 = time.perf_counter()
        run = run_model(model, settings)
        run.params = E._plain(dict(params))
        runs.append(run)
        if tim is not None:
            tim[f"{name} {run.params}"] = time.perf_counter() - t0
    seed = DEFAULT_SEED if args.seed is None else args.seed
    return paper_examples_report(runs, seed, tim)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    fmt, out = args.format, args.out
    try:
        if args.command == "paper-examples":
            report = _run_paper_examples(args)
        else:
            config = _load(args)
            fmt = fmt or config.output.get("format")
            out = out or (Path(config.output["path"]) if config.output.get("path") else None)
            if args.command == "spectrum":
                report = spectrum_report(config.model, spectrum(config.model), config.seed)
            else:
                if args.command == "classify":
                    config = _classify_config(config)
                report = run_checks(config, args.command, timings=args.timings, jobs=args.jobs)
    except OpenSymError as exc:
        print(f"opensym: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = emit_machine(report) if fmt == "machine" else format_human(report)
    if out is not None:
        out.write_text(text)
    else:
        sys.stdout.write(text)
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
