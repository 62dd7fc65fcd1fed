"""External-process fact verification.

Resolves format arguments from fact properties, assembles the subprocess
command, executes it with a timeout, parses the boolean result, and
updates the fact, producing one audit record per execution attempt.
"""

import re
import subprocess
import time
from dataclasses import dataclass

from .model import (
    PLACEHOLDER_RE,
    CommandSpec,
    Network,
    TwinpathError,
    UnknownEntity,
    effective_verifiers,
)

TICKS_PER_SECOND = 10_000_000  # 1 tick = 100 ns
DEFAULT_TIMEOUT_MS = 30_000

STRICT = "strict"
LENIENT = "lenient"
ERROR_POLICIES = (STRICT, LENIENT)

DESCRIPTION_ARG = "Description"


class VerifierError(TwinpathError):
    """Base class for verification failures."""


class NoMatchingArgument(VerifierError):
    """No property on the fact matches the requested format argument."""

    def __init__(self, fact_id: str, arg_name: str):
        super().__init__(f"fact {fact_id}: no property matches format argument '{arg_name}'")
        self.fact_id = fact_id
        self.arg_name = arg_name


class PlaceholderOutOfRange(VerifierError):
    def __init__(self, spec_id: str, index: int, arg_count: int):
        super().__init__(
            f"{spec_id}: placeholder {{{index}}} out of range (got {arg_count} format args)"
        )
        self.spec_id = spec_id
        self.index = index
        self.arg_count = arg_count


class QuoteInArgument(VerifierError):
    """Argument values may not contain double quotes; there is no escaping rule."""

    def __init__(self, arg_name: str, value: str):
        super().__init__(f"argument '{arg_name}' contains a double quote: {value!r}")
        self.arg_name = arg_name
        self.value = value


class UnbalancedQuote(VerifierError):
    def __init__(self, argument_string: str):
        super().__init__(f"unbalanced double quote in argument string: {argument_string!r}")
        self.argument_string = argument_string


class SpawnFailure(VerifierError):
    """The executable could not be started at all."""

    def __init__(self, executable: str, reason: str):
        super().__init__(f"cannot spawn '{executable}': {reason}")
        self.executable = executable
        self.reason = reason


class UnparsableOutput(VerifierError):
    def __init__(self, text: str):
        super().__init__(f"output is not a boolean: {text!r}")
        self.text = text


class VerifierTimeout(VerifierError):
    def __init__(self, verifier_id: str, timeout_ms: int):
        super().__init__(f"verifier {verifier_id} exceeded {timeout_ms} ms and was terminated")
        self.verifier_id = verifier_id
        self.timeout_ms = timeout_ms


class VerificationFailed(VerifierError):
    """Strict-policy wrapper: a verifier could not produce a usable value."""

    def __init__(self, fact_id: str, verifier_id: str, cause: VerifierError,
                 records: list["VerificationRecord"]):
        super().__init__(f"verifying fact {fact_id} with {verifier_id} failed: {cause}")
        self.fact_id = fact_id
        self.verifier_id = verifier_id
        self.cause = cause
        self.records = records


@dataclass
class CommandLine:
    """Assembled subprocess invocation.

    ``argv`` is the complete vector passed to the OS: the executable
    followed by the tokenized argument string.
    """

    executable: str
    argument_string: str
    argv: list[str]


@dataclass
class ProcessOutcome:
    """Captured result of one subprocess run; duration in 100 ns ticks."""

    stdout: str
    stderr: str
    exit_code: int
    duration_ticks: int
    timed_out: bool


@dataclass
class VerificationRecord:
    """Audit entry for one verifier execution attempt.

    ``command`` is absent when argument resolution failed, ``outcome``
    when the process never spawned. ``error`` is set exactly when
    ``parsed_value`` is absent; the fact keeps its previous value then.
    """

    verifier_id: str
    fact_id: str
    command: CommandLine | None
    outcome: ProcessOutcome | None
    parsed_value: bool | None
    previous_value: bool
    new_value: bool
    error: str | None = None


def resolve_format_argument(network: Network, fact_id: str, arg_name: str) -> str:
    """Return the value a format argument stands for on the given fact.

    ``"Description"`` (exact, case-sensitive) is reserved and returns the
    fact's own description, shadowing any common property of that name.
    Anything else returns the description of the first custom property,
    in fact order, whose common property's description equals arg_name.
    """
    fact = network.fact(fact_id)
    if arg_name == DESCRIPTION_ARG:
        return fact.description
    for custom in fact.custom_properties:
        common = network.common_properties.get(custom.common_property_id)
        if common is not None and common.description == arg_name:
            return custom.description
    raise NoMatchingArgument(fact_id, arg_name)


def tokenize_arguments(argument_string: str) -> list[str]:
    """Split an argument string into process argv tokens.

    Tokens break on runs of whitespace; double-quoted substrings join
    into a single token with the quotes stripped. No escape sequences.
    """
    tokens: list[str] = []
    current: list[str] = []
    in_quotes = False
    started = False
    for char in argument_string:
        if char == '"':
            in_quotes = not in_quotes
            started = True
        elif char.isspace() and not in_quotes:
            if started:
                tokens.append("".join(current))
                current = []
                started = False
        else:
            current.append(char)
            started = True
    if in_quotes:
        raise UnbalancedQuote(argument_string)
    if started:
        tokens.append("".join(current))
    return tokens


def _find_spec(network: Network, spec_id: str) -> CommandSpec:
    spec = network.verifiers.get(spec_id) or network.actions.get(spec_id)
    if spec is None:
        raise UnknownEntity("verifier", spec_id)
    return spec


def build_command(network: Network, verifier_id: str, fact_id: str) -> CommandLine:
    """Substitute every placeholder and tokenize into a runnable command.

    Pure: the same network state always yields a byte-identical argument
    string. ``verifier_id`` may name a verifier or an action (actions use
    the same assembly machinery). Resolved values containing double
    quotes are rejected rather than escaped.
    """
    spec = _find_spec(network, verifier_id)
    resolved: dict[int, str] = {}

    def substitute(match: re.Match) -> str:
        index = int(match.group(1))
        if index >= len(spec.format_args):
            raise PlaceholderOutOfRange(spec.id, index, len(spec.format_args))
        if index not in resolved:
            arg_name = spec.format_args[index]
            value = resolve_format_argument(network, fact_id, arg_name)
            if '"' in value:
                raise QuoteInArgument(arg_name, value)
            resolved[index] = value
        return resolved[index]

    argument_string = PLACEHOLDER_RE.sub(substitute, spec.format_string)
    argv = [spec.executable_path, *tokenize_arguments(argument_string)]
    return CommandLine(spec.executable_path, argument_string, argv)


def execute_process(command: CommandLine, timeout_ms: int,
                    cwd: "str | None" = None) -> ProcessOutcome:
    """Spawn the command, capturing stdout/stderr until exit or timeout.

    On timeout the process is killed and ``timed_out`` set; whatever
    output was produced is still captured. Only failure to start at all
    raises (SpawnFailure).
    """
    if timeout_ms <= 0:
        raise ValueError("timeout_ms must be positive")
    start = time.perf_counter_ns()
    try:
        process = subprocess.Popen(
            command.argv,
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            cwd=cwd,
            text=True,
            encoding="utf-8",
            errors="replace",
        )
    except OSError as exc:
        raise SpawnFailure(command.executable, str(exc)) from exc
    try:
        stdout, stderr = process.communicate(timeout=timeout_ms / 1000.0)
        timed_out = False
    except subprocess.TimeoutExpired:
        process.kill()
        stdout, stderr = process.communicate()
        timed_out = True
    duration_ticks = (time.perf_counter_ns() - start) // 100
    return ProcessOutcome(stdout, stderr, process.returncode, duration_ticks, timed_out)


def parse_boolean(stdout: str) -> bool:
    """Parse a verifier's stdout: trimmed, case-insensitive true/false."""
    text = stdout.strip()
    lowered = text.lower()
    if lowered == "true":
        return True
    if lowered == "false":
        return False
    raise UnparsableOutput(text)


def verify_fact(network: Network, fact_id: str, *,
                timeout_ms: int = DEFAULT_TIMEOUT_MS,
                error_policy: str = STRICT) -> list[VerificationRecord]:
    """Run every effective verifier of a fact in order, updating its value.

    Each successful parse overwrites the fact's value immediately, so with
    several verifiers the last successful result wins; every attempt is
    recorded either way. Stdout is parsed regardless of exit code (the
    exit code is recorded). Under the strict policy the first error
    aborts the sequence with VerificationFailed; under the lenient policy
    errors are recorded, the fact keeps its previous value, and the
    sequence continues. A fact with no effective verifiers is never
    touched.
    """
    if error_policy not in ERROR_POLICIES:
        raise ValueError(f"unknown error policy {error_policy!r}")
    fact = network.fact(fact_id)
    cwd = str(network.script_dir) if network.script_dir is not None else None
    records: list[VerificationRecord] = []
    for verifier_id in effective_verifiers(network, fact_id):
        previous = fact.value
        command: CommandLine | None = None
        outcome: ProcessOutcome | None = None
        parsed: bool | None = None
        cause: VerifierError | None = None
        try:
            command = build_command(network, verifier_id, fact_id)
        except VerifierError as exc:
            cause = exc
        if cause is None:
            try:
                outcome = execute_process(command, timeout_ms, cwd=cwd)
            except SpawnFailure as exc:
                cause = exc
        if cause is None:
            if outcome.timed_out:
                cause = VerifierTimeout(verifier_id, timeout_ms)
            else:
                try:
                    parsed = parse_boolean(outcome.stdout)
                except UnparsableOutput as exc:
                    cause = exc
        new_value = parsed if parsed is not None else previous
        records.append(VerificationRecord(
            verifier_id=verifier_id,
            fact_id=fact_id,
            command=command,
            outcome=outcome,
            parsed_value=parsed,
            previous_value=previous,
            new_value=new_value,
            error=None if cause is None else str(cause),
        ))
        if parsed is not None:
            fact.value = parsed
        elif error_policy == STRICT:
            raise VerificationFailed(fact_id, verifier_id, cause, records)
    return records
