"""Command-line entry point: validate, run, and benchmark bundles.

Exit codes are a total function of the outcome class: 0 for a completed
traversal (even with zero paths), 1 for usage errors, 2 for import or
validation failures, 3 for a verification failure under the strict
policy.
"""

import argparse
import json
import os
import sys

from .bundle import BundleError, ValidationFailed, import_network
from .model import UnknownEntity
from .report import render_json_report, render_text_report
from .traverse import (
    CACHE_ALWAYS,
    CACHE_ONCE,
    InvalidNetwork,
    TraversalOptions,
    benchmark,
    find_paths,
)
from .verify import DEFAULT_TIMEOUT_MS, LENIENT, STRICT, VerificationFailed

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INVALID = 2
EXIT_VERIFICATION = 3

TIMEOUT_ENV_VAR = "TWINPATH_TIMEOUT_MS"

_CACHE_BY_FLAG = {"once": CACHE_ONCE, "always": CACHE_ALWAYS}


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1; argparse's default of 2 is reserved for
    # validation failures
    def error(self, message):
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="twinpath",
                     description="Traverse digital-twin networks with environment verifiers.")
    subparsers = parser.add_subparsers(dest="command", required=True)

    def add_traversal_flags(sub, with_iterations: bool):
        sub.add_argument("bundle", help="bundle directory to import")
        sub.add_argument("--start", required=True, help="start container id")
        sub.add_argument("--goal", required=True, help="goal container id")
        if with_iterations:
            sub.add_argument("--iterations", type=int, required=True,
                             help="number of timed traversals (>= 1)")
        sub.add_argument("--no-verifiers", action="store_true",
                         help="read imported fact values without checking the environment")
        sub.add_argument("--cache", choices=sorted(_CACHE_BY_FLAG), default="once",
                         help="verify each fact once per traversal, or on every read")
        sub.add_argument("--lenient", action="store_true",
                         help="record verifier errors and continue instead of aborting")
        sub.add_argument("--timeout-ms", type=int, default=None,
                         help=f"per-subprocess timeout (default {DEFAULT_TIMEOUT_MS}, "
                              f"override with ${TIMEOUT_ENV_VAR})")

    run = subparsers.add_parser("run", help="enumerate paths and report")
    add_traversal_flags(run, with_iterations=False)
    run.add_argument("--dry-run", action="store_true",
                     help="apply rule postconditions but skip action subprocesses")
    run.add_argument("--report", choices=["text", "json"], default="text")

    bench = subparsers.add_parser("benchmark", help="time repeated traversals")
    add_traversal_flags(bench, with_iterations=True)
    bench.add_argument("--compare", action="store_true",
                       help="benchmark with and without verifiers and report the ratio")

    val = subparsers.add_parser("validate", help="check a bundle's invariants")
    val.add_argument("bundle", help="bundle directory to import")
    return parser


def _resolve_timeout(args) -> int:
    timeout_ms = args.timeout_ms
    if timeout_ms is None:
        raw = os.environ.get(TIMEOUT_ENV_VAR)
        if raw is None:
            timeout_ms = DEFAULT_TIMEOUT_MS
        else:
            try:
                timeout_ms = int(raw)
            except ValueError:
                raise _UsageError(f"${TIMEOUT_ENV_VAR} must be an integer, got {raw!r}")
    if timeout_ms <= 0:
        raise _UsageError("timeout must be positive")
    return timeout_ms


def _options(args, verifiers_enabled: bool, dry_run: bool = False) -> TraversalOptions:
    return TraversalOptions(
        verifiers_enabled=verifiers_enabled,
        cache_policy=_CACHE_BY_FLAG[args.cache],
        error_policy=LENIENT if args.lenient else STRICT,
        timeout_ms=_resolve_timeout(args),
        dry_run_actions=dry_run,
    )


def _print_stats(stats, heading: "str | None" = None) -> None:
    if heading:
        print(heading)
    print(f"Iterations: {stats.iterations}")
    print(f"Mean ticks: {stats.mean_ticks}")
    print(f"Median ticks: {stats.median_ticks}")
    print(f"Min ticks: {stats.min_ticks}")
    print(f"Max ticks: {stats.max_ticks}")
    print(f"Stddev ticks: {stats.stddev_ticks}")


def cmd_run(args) -> int:
    network = import_network(args.bundle)
    verifiers_enabled = not args.no_verifiers
    options = _options(args, verifiers_enabled, dry_run=args.dry_run)
    result = find_paths(network, args.start, args.goal, options)
    if args.report == "json":
        print(json.dumps(render_json_report(network, result, verifiers_enabled), indent=2))
    else:
        print(render_text_report(network, result, verifiers_enabled), end="")
    return EXIT_OK


def cmd_benchmark(args) -> int:
    if args.iterations < 1:
        raise _UsageError("--iterations must be >= 1")
    if args.compare and args.no_verifiers:
        raise _UsageError("--compare already runs both scenarios; drop --no-verifiers")
    network = import_network(args.bundle)
    if args.compare:
        with_stats = benchmark(network, args.start, args.goal,
                               _options(args, verifiers_enabled=True), args.iterations)
        without_stats = benchmark(network, args.start, args.goal,
                                  _options(args, verifiers_enabled=False), args.iterations)
        _print_stats(with_stats, "Verifiers on:")
        print()
        _print_stats(without_stats, "Verifiers off:")
        print()
        ratio = with_stats.mean_ticks / max(without_stats.mean_ticks, 1)
        print(f"Overhead ratio (verifiers on / off): {ratio:.2f}x")
    else:
        stats = benchmark(network, args.start, args.goal,
                          _options(args, verifiers_enabled=not args.no_verifiers),
                          args.iterations)
        _print_stats(stats)
    return EXIT_OK


def cmd_validate(args) -> int:
    try:
        import_network(args.bundle)
    except ValidationFailed as exc:
        for violation in exc.violations:
            print(violation)
        return EXIT_INVALID
    print("OK")
    return EXIT_OK


def main(argv: "list[str] | None" = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "run":
            return cmd_run(args)
        if args.command == "benchmark":
            return cmd_benchmark(args)
        return cmd_validate(args)
    except _UsageError as exc:
        print(f"twinpath: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownEntity as exc:
        print(f"twinpath: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except VerificationFailed as exc:
        print(f"twinpath: verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFICATION
    except (BundleError, InvalidNetwork) as exc:
        print(f"twinpath: invalid network: {exc}", file=sys.stderr)
        return EXIT_INVALID


def entry_point() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry_point()
