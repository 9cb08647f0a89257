"""Command-line entry point: ``irsmith <subcommand> [flags]``.

Exit codes: 0 on success, 1 on usage, config or input errors, 2 when a
fuzz campaign found at least one bug group. Artifacts go to standard output
(or ``--output``); diagnostics go to standard error.

Configuration precedence is defaults < ``--config`` file < flags.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Optional, Sequence

from irsmith import dialects  # noqa: F401  (registers the dialects)
from irsmith.builder import GenerationError, generate_module
from irsmith.config import ConfigError, GenConfig, apply_settings, dump_config, load_config
from irsmith.difftest import VerdictKind, differential_check, input_vectors
from irsmith.fuzz import Budget, program_filename, run_campaign
from irsmith.interp import DEFAULT_FUEL, InterpreterError, describe, interpret
from irsmith.ir import Module
from irsmith.passes import DEFAULT_PIPELINE, BugInjection, parse_passes, run_pipeline
from irsmith.registry import REGISTRY
from irsmith.rng import derive_seed
from irsmith.stats import (
    FreqModelParams,
    compare_while_frequency,
    measure_op_frequencies,
    monte_carlo_while,
    while_success_probability,
)
from irsmith.textio import ParseError, parse_module, print_module
from irsmith.verify import verify_module


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        raise UsageError(f"{self.prog}: {message}")


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("common flags")
    g.add_argument("--seed", type=_u64, help="generator (or campaign master) seed")
    g.add_argument("--config", metavar="PATH", help="config file of 'key = value' lines")
    g.add_argument("--dump-config", metavar="PATH",
                   help="write the resolved config ('-' for stdout) and exit")
    g.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key, e.g. --set weight.scf.while=0")
    g.add_argument("--unsafe-memory", action="store_true", default=None,
                   help="allow out-of-bounds indices and repeated deallocs")
    g.add_argument("--output", "-o", metavar="PATH", help="output file (default stdout)")
    g.add_argument("--count", "-n", type=int, help="number of programs")


def _u64(text: str) -> int:
    v = int(text, 0)
    if not 0 <= v < 1 << 64:
        raise argparse.ArgumentTypeError(f"seed out of 64-bit range: {text}")
    return v


def _inject_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--inject", default="", help="comma list of injected bugs (b1, b2)")


def _passes_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--passes", default=",".join(x.value for x in DEFAULT_PIPELINE),
                   help="comma list of passes (constfold, cse, dce)")


def _fuel_flag(p: argparse.ArgumentParser) -> None:
    p.add_argument("--fuel", type=int, default=DEFAULT_FUEL, help="ops per interpreter run")


def build_parser() -> argparse.ArgumentParser:
    top = _Parser(prog="irsmith",
                  description="Random program generator and differential tester for a small SSA IR.")
    sub = top.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("generate", help="generate random programs")
    _common(p)

    p = sub.add_parser("verify", help="parse and verify a .rir file")
    _common(p)
    p.add_argument("file")

    p = sub.add_parser("run", help="interpret a .rir file")
    _common(p)
    p.add_argument("file")
    p.add_argument("--args", default="", help="comma list of integer arguments for main")
    _fuel_flag(p)

    p = sub.add_parser("opt", help="optimize a .rir file")
    _common(p)
    p.add_argument("file")
    _passes_flag(p)
    _inject_flag(p)

    p = sub.add_parser("diff", help="differentially test one program")
    _common(p)
    p.add_argument("file", nargs="?", help=".rir file; generated from --seed when omitted")
    p.add_argument("--args", action="append", default=[],
                   help="one input vector (repeatable); default derives vectors from the seed")
    p.add_argument("--inputs", type=int, default=4, help="derived input vectors per program")
    _passes_flag(p)
    _inject_flag(p)
    _fuel_flag(p)

    p = sub.add_parser("fuzz", help="run a differential fuzzing campaign")
    _common(p)
    p.add_argument("--output-dir", default="campaign")
    p.add_argument("--seconds", type=float, help="wall-clock budget instead of --count")
    p.add_argument("--inputs", type=int, default=4, help="input vectors per program")
    p.add_argument("--jobs", type=int, default=1)
    _passes_flag(p)
    _inject_flag(p)
    _fuel_flag(p)

    p = sub.add_parser("stats", help="analytic, Monte-Carlo and measured op frequencies")
    _common(p)
    p.add_argument("--trials", type=int, default=100_000, help="Monte-Carlo trials")
    p.add_argument("--p-bool", type=float, default=1 / 90,
                   help="p_bool of the idealized model (default 1/90)")
    return top


# -- helpers -------------------------------------------------------------------


def resolve_config(args: argparse.Namespace) -> GenConfig:
    config = GenConfig()
    if args.config:
        config = load_config(args.config, config)
    items = {}
    for kv in args.set:
        key, sep, value = kv.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {kv!r}")
        items[key.strip()] = value.strip()
    config = apply_settings(config, items, "--set")
    if args.seed is not None:
        config = config.replace(seed=args.seed)
    if args.unsafe_memory:
        config = config.replace(allow_unsafe_memory=True)
    config.validate([s.name for s in REGISTRY.poolable()])
    return config


def _emit(text: str, output: Optional[str]) -> None:
    if output and output != "-":
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _read_module(path: str) -> Module:
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {p}: {exc.strerror}") from None
    try:
        return parse_module(text)
    except ParseError as exc:
        raise UsageError(f"{p}:{exc}") from None


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x, 0) for x in text.split(",") if x.strip())
    except ValueError:
        raise UsageError(f"bad argument list {text!r}") from None


def _inject(text: str) -> BugInjection:
    try:
        return BugInjection.parse(text.split(","))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _passes(text: str):
    try:
        return parse_passes(text)
    except ValueError as exc:
        raise UsageError(f"unknown pass in --passes: {exc}") from None


# -- subcommands ---------------------------------------------------------------


def cmd_generate(args: argparse.Namespace, config: GenConfig) -> int:
    count = args.count or 1
    if count == 1:
        _emit(print_module(generate_module(config)), args.output)
        return 0
    if not args.output:
        raise UsageError("generate -n N with N > 1 needs --output DIR")
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    for i in range(count):
        seed = derive_seed(config.seed, i)
        (out / program_filename(i, seed)).write_text(
            print_module(generate_module(config.replace(seed=seed)))
        )
    return 0


def cmd_verify(args: argparse.Namespace, config: GenConfig) -> int:
    module = _read_module(args.file)
    problems = verify_module(module)
    for v in problems:
        print(f"{v.kind}: {v.path}: {v.message}")
    if problems:
        return 1
    print(f"{args.file}: ok")
    return 0


def cmd_run(args: argparse.Namespace, config: GenConfig) -> int:
    module = _read_module(args.file)
    try:
        outcome = interpret(module, _int_list(args.args), args.fuel)
    except InterpreterError as exc:
        raise UsageError(str(exc)) from None
    print(describe(outcome))
    return 0


def cmd_opt(args: argparse.Namespace, config: GenConfig) -> int:
    module = _read_module(args.file)
    result = run_pipeline(module, _passes(args.passes), _inject(args.inject))
    if not result.reached_fixpoint:
        print(f"warning: no fixpoint after {result.iterations} iterations", file=sys.stderr)
    _emit(print_module(result.module), args.output)
    return 0


def cmd_diff(args: argparse.Namespace, config: GenConfig) -> int:
    module = _read_module(args.file) if args.file else generate_module(config)
    vectors = [_int_list(a) for a in args.args] or input_vectors(module, config.seed, args.inputs)
    try:
        verdicts = differential_check(
            module, vectors, _passes(args.passes), _inject(args.inject), args.fuel
        )
    except InterpreterError as exc:
        raise UsageError(str(exc)) from None
    lines = [f"({', '.join(map(str, v.args))}) {v.message}" for v in verdicts]
    _emit("\n".join(lines) + "\n", args.output)
    return 0 if all(v.kind is VerdictKind.AGREE for v in verdicts) else 2


def cmd_fuzz(args: argparse.Namespace, config: GenConfig) -> int:
    if args.seconds is not None:
        budget = Budget(seconds=args.seconds)
    else:
        budget = Budget(programs=args.count if args.count is not None else 100)
    report = run_campaign(
        config,
        _inject(args.inject),
        budget,
        inputs_per_program=args.inputs,
        output_dir=args.output_dir,
        fuel=args.fuel,
        passes=_passes(args.passes),
        jobs=args.jobs,
    )
    _emit(report.summary(), args.output)
    return 2 if report.groups else 0


def cmd_stats(args: argparse.Namespace, config: GenConfig) -> int:
    ideal = FreqModelParams(config.p_stop, args.p_bool)
    mc = monte_carlo_while(ideal, args.trials, config.seed)
    report = measure_op_frequencies(config, args.count if args.count is not None else 1000)
    measured, matched = compare_while_frequency(report, config.p_stop)
    lines = [
        f"# analytic while success (p_g={ideal.p_g}, p_bool={ideal.p_bool:.6f}): "
        f"{while_success_probability(ideal):.6f}",
        f"# monte-carlo ({mc.trials} trials): {mc.estimate:.6f} +- {mc.std_error:.6f}",
        f"# programs: {report.programs}, ops: {report.total_ops}, "
        f"bool-producer fraction: {report.bool_fraction:.6f}",
        f"# measured scf.while fraction: {measured:.6f}; analytic at matched "
        f"(p_stop, p_bool): {matched:.6f}; difference {100 * (measured - matched):+.2f} pp",
    ]
    _emit("\n".join(lines) + "\n" + report.to_tsv(), args.output)
    return 0


COMMANDS = {
    "generate": cmd_generate,
    "verify": cmd_verify,
    "run": cmd_run,
    "opt": cmd_opt,
    "diff": cmd_diff,
    "fuzz": cmd_fuzz,
    "stats": cmd_stats,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        config = resolve_config(args)
        if args.dump_config:
            _emit(dump_config(config, [s.name for s in REGISTRY.poolable()]),
                  args.dump_config)
            return 0
        return COMMANDS[args.command](args, config)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GenerationError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
