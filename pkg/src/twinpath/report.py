"""Run-report rendering, human text and machine-readable JSON.

The text report surfaces the path count, each path by container name,
elapsed time, and one line per verifier/action execution so the operator
can see exactly which checks ran and how they changed the network. The
JSON form carries the complete traversal result, records included.
"""

from dataclasses import asdict

from .model import Network
from .traverse import ActionRecord, PostconditionRecord, TraversalResult
from .verify import TICKS_PER_SECOND, VerificationRecord

VERIFIERS_DISABLED_WARNING = (
    "Warning: verifiers disabled; fact values were not checked against the environment."
)


def format_elapsed(ticks: int) -> str:
    """Render a tick count as hh:mm:ss with exactly four fractional digits."""
    total_seconds, frac_ticks = divmod(ticks, TICKS_PER_SECOND)
    hours, remainder = divmod(total_seconds, 3600)
    minutes, seconds = divmod(remainder, 60)
    return f"{hours:02d}:{minutes:02d}:{seconds:02d}.{frac_ticks // 1000:04d}"


def _container_name(network: Network, container_id: str) -> str:
    container = network.containers.get(container_id)
    return container.name if container is not None else container_id


def _fact_description(network: Network, fact_id: str) -> str:
    fact = network.facts.get(fact_id)
    return fact.description if fact is not None else fact_id


def _verifier_line(network: Network, record: VerificationRecord) -> str:
    head = (
        f"  {record.verifier_id} \"{_fact_description(network, record.fact_id)}\": "
        f"{record.previous_value} -> {record.new_value}"
    )
    if record.outcome is not None:
        head += (f" (exit {record.outcome.exit_code}, "
                 f"{format_elapsed(record.outcome.duration_ticks)})")
    else:
        head += " (not run)"
    if record.error is not None:
        head += f" [error: {record.error}]"
    return head


def _action_line(network: Network, record: "PostconditionRecord | ActionRecord") -> str:
    if isinstance(record, PostconditionRecord):
        return (f"  {record.rule_id}: set "
                f"\"{_fact_description(network, record.fact_id)}\" -> {record.new_value}")
    if record.skipped:
        return f"  {record.action_id} (rule {record.rule_id}): skipped (dry run)"
    if record.outcome is None:
        return f"  {record.action_id} (rule {record.rule_id}): error: {record.error}"
    line = (f"  {record.action_id} (rule {record.rule_id}): "
            f"exit {record.outcome.exit_code}, "
            f"{format_elapsed(record.outcome.duration_ticks)}")
    if record.error is not None:
        line += f" [error: {record.error}]"
    return line


def render_text_report(network: Network, result: TraversalResult,
                       verifiers_enabled: bool = True) -> str:
    lines = []
    if not verifiers_enabled:
        lines.append(VERIFIERS_DISABLED_WARNING)
    lines.append(f"Found Paths: {len(result.paths)}")
    for number, path in enumerate(result.paths, start=1):
        display = " -> ".join(_container_name(network, cid) for cid in path)
        lines.append(f"Path {number}: {display}")
    lines.append(f"Elapsed: {format_elapsed(result.elapsed_ticks)}")
    if result.verification_records:
        lines.append("Verifier results:")
        lines.extend(_verifier_line(network, r) for r in result.verification_records)
    if result.action_records:
        lines.append("Action results:")
        lines.extend(_action_line(network, r) for r in result.action_records)
    return "\n".join(lines) + "\n"


def render_json_report(network: Network, result: TraversalResult,
                       verifiers_enabled: bool = True) -> dict:
    """Full traversal result as a JSON-serializable dict."""
    actions = []
    for record in result.action_records:
        entry = asdict(record)
        entry["kind"] = ("postcondition" if isinstance(record, PostconditionRecord)
                         else "action")
        actions.append(entry)
    return {
        "found_paths": len(result.paths),
        "paths": [list(path) for path in result.paths],
        "displayed_paths": [
            " -> ".join(_container_name(network, cid) for cid in path)
            for path in result.paths
        ],
        "elapsed_ticks": result.elapsed_ticks,
        "elapsed": format_elapsed(result.elapsed_ticks),
        "verifiers_enabled": verifiers_enabled,
        "final_fact_values": dict(result.final_fact_values),
        "verification_records": [asdict(r) for r in result.verification_records],
        "action_records": actions,
    }
