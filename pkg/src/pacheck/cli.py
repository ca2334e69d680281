"""Command-line workbench binding the engines: build, compare, check, minimize, corpus.

Exit codes follow one contract everywhere: 0 when the command succeeded and
any requested property holds (or models are equivalent), 1 when a property
fails or models are inequivalent, 2 for usage, parse, or state-bound errors.
Error messages are single lines carrying source positions when available;
no command ever prints a stack trace.  Output depends only on the inputs
and flags, so runs are reproducible.
"""

from __future__ import annotations

import argparse
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Sequence

from .casestudies import format_outcome, load_corpus, run_corpus
from .equivalence import check_equivalence, disjoint_union, minimize_lts
from .formats import export_aut, export_dot, parse_aut
from .hml import evaluate_formula, render_formula, render_trace
from .parsing import ModelFile, ModelSyntaxError, parse_formula, parse_model_file
from .semantics import (
    DEFAULT_MAX_STATES,
    InvalidEnvironmentError,
    Lts,
    StateBoundExceededError,
    build_lts,
)


@dataclass(frozen=True)
class RunReport:
    """What a CLI invocation did: verdict text, artifacts, timing, exit code."""

    command: str
    verdict: str
    artifacts_written: tuple[str, ...]
    elapsed_ms: float
    exit_code: int


class _CliError(Exception):
    """User-facing failure; the message is printed and the exit code is 2."""


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message):  # argparse would sys.exit(2) with its own format
        raise _CliError(f"{self.prog}: {message}")


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise _CliError(f"cannot read {path}: {err.strerror or err}") from err


def _load_model(path: str) -> ModelFile:
    try:
        return parse_model_file(_read_text(path))
    except ModelSyntaxError as err:
        raise _CliError(f"{path}:{err.diagnostic}") from err


def _build_checked(model: ModelFile, path: str, max_states: int) -> Lts:
    try:
        return build_lts(model.env, max_states=max_states)
    except StateBoundExceededError as err:
        raise _CliError(
            f"{path}: state bound {err.max_states} exceeded "
            f"with {err.frontier_size} states still unexplored"
        ) from err
    except InvalidEnvironmentError as err:
        raise _CliError(f"{path}: {err}") from err


def _load_lts(path: str, max_states: int) -> Lts:
    """Build an LTS from a model file, or import one from an .aut file."""
    if path.endswith(".aut"):
        try:
            return parse_aut(_read_text(path))
        except ModelSyntaxError as err:
            raise _CliError(f"{path}:{err.diagnostic}") from err
    return _build_checked(_load_model(path), path, max_states)


def _write(path: str, text: str) -> None:
    try:
        Path(path).write_text(text, encoding="utf-8")
    except OSError as err:
        raise _CliError(f"cannot write {path}: {err.strerror or err}") from err


def _cmd_lts(args) -> tuple[str, list[str], int]:
    lts = _load_lts(args.model, args.max_states)
    text = export_dot(lts) if args.format == "dot" else export_aut(lts)
    verdict = f"{lts.n_states} states, {len(lts.transitions)} transitions"
    if args.output:
        _write(args.output, text)
        print(f"wrote {args.output} ({verdict})")
        return verdict, [args.output], 0
    print(text, end="")
    return verdict, [], 0


def _cmd_bisim(args) -> tuple[str, list[str], int]:
    left = _load_lts(args.model1, args.max_states)
    right = _load_lts(args.model2, args.max_states)
    verdict = check_equivalence(left, right, args.kind)
    artifacts = []
    if verdict.equivalent:
        print(f"equivalent ({args.kind})")
        if args.witness:
            union, _ = disjoint_union(left, right)
            _write(args.witness, export_dot(union, partition=verdict.witness_partition))
            artifacts.append(args.witness)
        return "equivalent", artifacts, 0
    formula = render_formula(verdict.distinguishing)
    print(f"not equivalent ({args.kind})")
    print(f"distinguishing: {formula}")
    if args.witness:
        _write(args.witness, formula + "\n")
        artifacts.append(args.witness)
    return "not equivalent", artifacts, 1


def _cmd_check(args) -> tuple[str, list[str], int]:
    if args.formula:
        try:
            formula = parse_formula(args.formula)
        except ModelSyntaxError as err:
            raise _CliError(f"--formula:{err.diagnostic}") from err
        lts = _load_lts(args.model, args.max_states)
    else:
        if args.model.endswith(".aut"):
            raise _CliError("declared properties require a model file, not an .aut file")
        model = _load_model(args.model)
        try:
            formula = model.property_named(args.property).formula
        except KeyError as err:
            raise _CliError(str(err.args[0])) from err
        lts = _build_checked(model, args.model, args.max_states)
    result = evaluate_formula(lts, 0, formula)
    if result.holds:
        print("holds")
        return "holds", [], 0
    print("fails")
    print(render_trace(result.trace, lts))
    return "fails", [], 1


def _cmd_minimize(args) -> tuple[str, list[str], int]:
    lts = _load_lts(args.model, args.max_states)
    reduced = minimize_lts(lts, args.kind)
    text = export_dot(reduced) if args.output.endswith(".dot") else export_aut(reduced)
    _write(args.output, text)
    verdict = f"{reduced.n_states} states, {len(reduced.transitions)} transitions"
    print(f"wrote {args.output} ({verdict}, {args.kind} quotient)")
    return verdict, [args.output], 0


def _cmd_diff(args) -> tuple[str, list[str], int]:
    left = _load_lts(args.model1, args.max_states)
    right = _load_lts(args.model2, args.max_states)
    verdict = check_equivalence(left, right, args.kind)
    if verdict.equivalent:
        raise _CliError(f"models are equivalent ({args.kind}); there is nothing to distinguish")
    formula = render_formula(verdict.distinguishing)
    print(formula)
    return formula, [], 0


def _cmd_corpus(args) -> tuple[str, list[str], int]:
    try:
        outcomes = run_corpus(load_corpus(), study=args.study)
    except KeyError as err:
        raise _CliError(str(err.args[0])) from err
    for outcome in outcomes:
        print(format_outcome(outcome))
    passed = sum(outcome.passed for outcome in outcomes)
    verdict = f"{passed}/{len(outcomes)} checks passed"
    print(verdict)
    return verdict, [], 0 if passed == len(outcomes) else 1


def _add_max_states(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--max-states",
        type=int,
        default=DEFAULT_MAX_STATES,
        help="state bound for LTS construction (error when exceeded)",
    )


def _build_parser() -> _ArgumentParser:
    parser = _ArgumentParser(
        prog="pacheck",
        description="Process-algebra verification workbench.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    lts = sub.add_parser("lts", help="build a model's LTS and export it")
    lts.add_argument("model", help="model file (.pa) or LTS file (.aut)")
    lts.add_argument("--format", choices=("aut", "dot"), default="aut")
    lts.add_argument("-o", "--output", help="write here instead of stdout")
    _add_max_states(lts)
    lts.set_defaults(handler=_cmd_lts)

    bisim = sub.add_parser("bisim", help="decide equivalence of two models")
    bisim.add_argument("model1")
    bisim.add_argument("model2")
    bisim.add_argument("--kind", choices=("strong", "weak"), required=True)
    bisim.add_argument(
        "--witness",
        help="write the witness here: a colored DOT partition when equivalent, "
        "the distinguishing formula when not",
    )
    _add_max_states(bisim)
    bisim.set_defaults(handler=_cmd_bisim)

    check = sub.add_parser("check", help="evaluate a formula on a model's initial state")
    check.add_argument("model")
    what = check.add_mutually_exclusive_group(required=True)
    what.add_argument("--formula", help="formula text")
    what.add_argument("--property", help="name of a property declared in the model file")
    _add_max_states(check)
    check.set_defaults(handler=_cmd_check)

    minimize = sub.add_parser("minimize", help="write the quotient LTS")
    minimize.add_argument("model")
    minimize.add_argument("--kind", choices=("strong", "weak"), required=True)
    minimize.add_argument("-o", "--output", required=True, help=".aut or .dot path")
    _add_max_states(minimize)
    minimize.set_defaults(handler=_cmd_minimize)

    diff = sub.add_parser("diff", help="print only a distinguishing formula")
    diff.add_argument("model1")
    diff.add_argument("model2")
    diff.add_argument("--kind", choices=("strong", "weak"), required=True)
    _add_max_states(diff)
    diff.set_defaults(handler=_cmd_diff)

    corpus = sub.add_parser("corpus", help="run the case-study corpus")
    corpus.add_argument("action", choices=("run",))
    corpus.add_argument("study", nargs="?", help="run only this case study")
    corpus.set_defaults(handler=_cmd_corpus)

    return parser


def run(argv: Sequence[str] | None = None) -> RunReport:
    """Execute one CLI invocation and report what happened (never raises for
    user errors; those become exit code 2 with a message on stderr)."""
    start = time.perf_counter()
    command = "?"
    try:
        args = _build_parser().parse_args(argv)
        command = args.command
        handler: Callable = args.handler
        verdict, artifacts, code = handler(args)
    except _CliError as err:
        print(f"error: {err}", file=sys.stderr)
        verdict, artifacts, code = f"error: {err}", [], 2
    elapsed_ms = (time.perf_counter() - start) * 1000.0
    return RunReport(
        command=command,
        verdict=verdict,
        artifacts_written=tuple(artifacts),
        elapsed_ms=elapsed_ms,
        exit_code=code,
    )


def main(argv: Sequence[str] | None = None) -> int:
    return run(argv).exit_code


if __name__ == "__main__":
    sys.exit(main())
