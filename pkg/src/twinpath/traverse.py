"""Rule-gated path enumeration with on-read verification.

Traversal walks the container graph depth-first, enumerating simple paths
from a start container to a goal container. A link is traversable when it
has no gating rule or when some gating rule evaluates true; evaluating a
rule verifies each precondition fact against the real environment first
(when verifiers are enabled), so the reported paths reflect the
environment at traversal time. A timing harness aggregates repeated runs.
"""

import statistics
import time
from dataclasses import dataclass, field

from .model import Link, Network, Rule, TwinpathError, effective_verifiers, validate
from .verify import (
    DEFAULT_TIMEOUT_MS,
    ERROR_POLICIES,
    STRICT,
    CommandLine,
    NoMatchingArgument,
    PlaceholderOutOfRange,
    ProcessOutcome,
    QuoteInArgument,
    SpawnFailure,
    UnbalancedQuote,
    VerificationRecord,
    build_command,
    execute_process,
    verify_fact,
)

CACHE_ONCE = "once-per-traversal"
CACHE_ALWAYS = "always-rerun"
CACHE_POLICIES = (CACHE_ONCE, CACHE_ALWAYS)


class InvalidNetwork(TwinpathError):
    """Traversal refused: the network has structural violations."""

    def __init__(self, violations: list[str]):
        super().__init__("network is invalid: " + "; ".join(violations))
        self.violations = violations


@dataclass
class TraversalOptions:
    """Knobs for one traversal.

    ``cache_policy`` decides whether a fact is re-verified on every rule
    read (``always-rerun``, for environments that change mid-run) or at
    most once per traversal (the default; deterministic and bounds
    subprocess cost). ``error_policy`` strict aborts on the first broken
    verifier, lenient records it and keeps going.
    """

    verifiers_enabled: bool = True
    cache_policy: str = CACHE_ONCE
    error_policy: str = STRICT
    timeout_ms: int = DEFAULT_TIMEOUT_MS
    max_depth: int = 64
    dry_run_actions: bool = False

    def __post_init__(self):
        if self.cache_policy not in CACHE_POLICIES:
            raise ValueError(f"unknown cache policy {self.cache_policy!r}")
        if self.error_policy not in ERROR_POLICIES:
            raise ValueError(f"unknown error policy {self.error_policy!r}")
        if self.timeout_ms <= 0:
            raise ValueError("timeout_ms must be positive")
        if self.max_depth < 1:
            raise ValueError("max_depth must be >= 1")


@dataclass
class PostconditionRecord:
    """One fact assignment applied by a firing rule."""

    rule_id: str
    fact_id: str
    previous_value: bool
    new_value: bool


@dataclass
class ActionRecord:
    """One action execution attempt (or its dry-run placeholder)."""

    rule_id: str
    action_id: str
    command: CommandLine | None
    outcome: ProcessOutcome | None
    skipped: bool = False
    error: str | None = None


@dataclass
class TraversalResult:
    """Everything one traversal produced.

    Paths are container-id sequences; each begins at the start container,
    ends at the goal, and crosses only links that were traversable at
    evaluation time. Records are in execution order; elapsed time is in
    100 ns ticks.
    """

    paths: list[list[str]]
    verification_records: list[VerificationRecord]
    action_records: list["PostconditionRecord | ActionRecord"]
    elapsed_ticks: int
    final_fact_values: dict[str, bool]


@dataclass
class TraversalState:
    """Book-keeping scoped to exactly one find_paths call."""

    verified_facts: set[str] = field(default_factory=set)
    fired_rules: set[str] = field(default_factory=set)
    verification_records: list[VerificationRecord] = field(default_factory=list)
    action_records: list["PostconditionRecord | ActionRecord"] = field(default_factory=list)


@dataclass
class BenchmarkStats:
    """Aggregate timing over repeated identical traversals, in ticks."""

    iterations: int
    mean_ticks: int
    median_ticks: int
    min_ticks: int
    max_ticks: int
    stddev_ticks: int


def evaluate_rule(network: Network, rule: Rule, options: TraversalOptions,
                  state: TraversalState) -> bool:
    """Check a rule's preconditions, verifying each fact on read.

    Facts with effective verifiers are verified before their value is
    compared, subject to the cache policy; the conjunction short-circuits,
    so facts after the first failed precondition are not read or verified.
    """
    for fact_id, required in rule.preconditions:
        fact = network.fact(fact_id)
        if (options.verifiers_enabled
                and effective_verifiers(network, fact_id)
                and (options.cache_policy == CACHE_ALWAYS
                     or fact_id not in state.verified_facts)):
            records = verify_fact(
                network, fact_id,
                timeout_ms=options.timeout_ms,
                error_policy=options.error_policy,
            )
            state.verification_records.extend(records)
            state.verified_facts.add(fact_id)
        if fact.value != required:
            return False
    return True


def fire_rule(network: Network, rule: Rule, options: TraversalOptions,
              state: TraversalState) -> list["PostconditionRecord | ActionRecord"]:
    """Apply a true rule's postconditions and fire its action.

    Postconditions apply on every firing and persist for the rest of the
    traversal, including across backtracking. The action runs at most
    once per rule per traversal (re-firing real-world commands on every
    branch would be destructive); its result is recorded, never parsed,
    and failures never abort the traversal.
    """
    applied: list[PostconditionRecord | ActionRecord] = []
    for fact_id, set_value in rule.postconditions:
        fact = network.fact(fact_id)
        applied.append(PostconditionRecord(rule.id, fact_id, fact.value, set_value))
        fact.value = set_value
    if rule.action_id is not None and rule.id not in state.fired_rules:
        if options.dry_run_actions:
            applied.append(ActionRecord(rule.id, rule.action_id, None, None, skipped=True))
        else:
            applied.append(_run_action(network, rule, options))
    state.fired_rules.add(rule.id)
    state.action_records.extend(applied)
    return applied


def _run_action(network: Network, rule: Rule, options: TraversalOptions) -> ActionRecord:
    # Arguments resolve against the rule's first precondition fact, the
    # fact whose state the rule is keyed on.
    context_fact_id = rule.preconditions[0][0]
    cwd = str(network.script_dir) if network.script_dir is not None else None
    command = None
    try:
        command = build_command(network, rule.action_id, context_fact_id)
        outcome = execute_process(command, options.timeout_ms, cwd=cwd)
    except (NoMatchingArgument, PlaceholderOutOfRange, QuoteInArgument,
            UnbalancedQuote, SpawnFailure) as exc:
        return ActionRecord(rule.id, rule.action_id, command, None, error=str(exc))
    error = f"timed out after {options.timeout_ms} ms" if outcome.timed_out else None
    return ActionRecord(rule.id, rule.action_id, command, outcome, error=error)


def find_paths(network: Network, start_id: str, goal_id: str,
               options: TraversalOptions | None = None) -> TraversalResult:
    """Enumerate every rule-traversable simple path from start to goal.

    Depth-first, deterministic: outgoing links are taken in ascending
    link-id order and gating rules tried in ascending rule-id order; the
    first true rule fires. Fact changes made by verifiers and
    postconditions persist on the network after the call; the verifier
    cache lives exactly as long as the call.
    """
    if options is None:
        options = TraversalOptions()
    violations = validate(network)
    if violations:
        raise InvalidNetwork(violations)
    network.container(start_id)
    network.container(goal_id)

    outgoing: dict[str, list[Link]] = {cid: [] for cid in network.containers}
    for link in sorted(network.links.values(), key=lambda l: l.id):
        outgoing[link.from_container_id].append(link)
    gating: dict[str, list[Rule]] = {}
    for rule in sorted(network.rules.values(), key=lambda r: r.id):
        if rule.gated_link_id is not None:
            gating.setdefault(rule.gated_link_id, []).append(rule)

    start = time.perf_counter_ns()
    state = TraversalState()
    paths: list[list[str]] = []
    path = [start_id]
    on_path = {start_id}

    def traversable(link: Link) -> bool:
        rules = gating.get(link.id)
        if not rules:
            return True
        for rule in rules:
            if evaluate_rule(network, rule, options, state):
                fire_rule(network, rule, options, state)
                return True
        return False

    def walk(current: str, hops: int) -> None:
        if current == goal_id:
            paths.append(list(path))
            return
        if hops >= options.max_depth:
            return
        for link in outgoing[current]:
            nxt = link.to_container_id
            if nxt in on_path:
                continue
            if not traversable(link):
                continue
            path.append(nxt)
            on_path.add(nxt)
            walk(nxt, hops + 1)
            path.pop()
            on_path.discard(nxt)

    walk(start_id, 0)
    elapsed_ticks = (time.perf_counter_ns() - start) // 100
    return TraversalResult(
        paths=paths,
        verification_records=state.verification_records,
        action_records=state.action_records,
        elapsed_ticks=elapsed_ticks,
        final_fact_values=network.snapshot_fact_values(),
    )


def benchmark(network: Network, start_id: str, goal_id: str,
              options: TraversalOptions | None = None,
              iterations: int = 1) -> BenchmarkStats:
    """Time repeated traversals, resetting fact values between runs.

    Fact values are restored to their state at call time before every
    iteration (and after the last), so each run starts from the same
    imported snapshot. Iterations run sequentially; parallel runs would
    corrupt timing and subprocess attribution.
    """
    if iterations < 1:
        raise ValueError("iterations must be >= 1")
    baseline = network.snapshot_fact_values()
    samples: list[int] = []
    try:
        for _ in range(iterations):
            network.restore_fact_values(baseline)
            result = find_paths(network, start_id, goal_id, options)
            samples.append(result.elapsed_ticks)
    finally:
        network.restore_fact_values(baseline)
    return BenchmarkStats(
        iterations=iterations,
        mean_ticks=round(statistics.fmean(samples)),
        median_ticks=round(statistics.median(samples)),
        min_ticks=min(samples),
        max_ticks=max(samples),
        stddev_ticks=round(statistics.pstdev(samples)),
    )
