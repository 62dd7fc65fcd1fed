"""In-memory digital-twin network model.

A network mirrors one real-world system: containers group boolean facts,
links connect containers, and rules gate traversal across links on fact
values. Verifiers and actions are external-process specifications; facts
and common properties carry the verifier associations that the execution
engine resolves at traversal time.
"""

import re
from dataclasses import dataclass, field
from pathlib import Path


PLACEHOLDER_RE = re.compile(r"\{(\d+)\}")


class TwinpathError(Exception):
    """Base class for all errors raised by this package."""


class UnknownEntity(TwinpathError, LookupError):
    """An id lookup failed against the network."""

    def __init__(self, kind: str, entity_id: str):
        super().__init__(f"unknown {kind} '{entity_id}'")
        self.kind = kind
        self.entity_id = entity_id


@dataclass
class CommonProperty:
    """Network-wide attribute definition.

    The description doubles as the lookup key for verifier format
    arguments, so it must be unique across the network.
    """

    id: str
    description: str
    verifier_ids: list[str] = field(default_factory=list)


@dataclass
class CustomProperty:
    """Fact-local instance of a common property; description holds the value."""

    id: str
    common_property_id: str
    description: str


@dataclass
class Fact:
    """Boolean datum mirroring one real-world condition."""

    id: str
    description: str
    value: bool
    custom_properties: list[CustomProperty] = field(default_factory=list)
    verifier_ids: list[str] = field(default_factory=list)


@dataclass
class Container:
    """Grouping entity (a machine, a room, ...) holding facts."""

    id: str
    name: str
    fact_ids: list[str] = field(default_factory=list)


@dataclass
class Link:
    """Directed connection between two containers."""

    id: str
    from_container_id: str
    to_container_id: str


@dataclass
class Rule:
    """Conjunction of fact preconditions that gates a link.

    Preconditions and postconditions are ordered ``(fact_id, value)``
    pairs. A rule may optionally set facts and fire one action when it
    evaluates true during traversal.
    """

    id: str
    preconditions: list[tuple[str, bool]]
    gated_link_id: str | None = None
    postconditions: list[tuple[str, bool]] = field(default_factory=list)
    action_id: str | None = None


@dataclass
class CommandSpec:
    """External-process specification shared by verifiers and actions.

    ``format_string`` may contain zero-based placeholders of the exact
    form ``{0}``, ``{1}``, ... which are substituted with values resolved
    from the fact under inspection; ``format_args`` names, in placeholder
    order, the properties those values come from.
    """

    id: str
    executable_path: str
    format_string: str
    format_args: list[str] = field(default_factory=list)


@dataclass
class Verifier(CommandSpec):
    """Process whose parsed boolean stdout overwrites a fact's value."""


@dataclass
class Action(CommandSpec):
    """Process fired by a rule; its output is recorded, never parsed."""


@dataclass
class Network:
    """Id-keyed maps of every entity type plus the bundle script directory.

    ``script_dir`` is where subprocesses run (set on import, excluded from
    equality so re-imports from different paths still compare equal).
    Insertion order of each map is semantic: it drives verifier execution
    order and survives import/export.
    """

    common_properties: dict[str, CommonProperty] = field(default_factory=dict)
    verifiers: dict[str, Verifier] = field(default_factory=dict)
    actions: dict[str, Action] = field(default_factory=dict)
    facts: dict[str, Fact] = field(default_factory=dict)
    containers: dict[str, Container] = field(default_factory=dict)
    links: dict[str, Link] = field(default_factory=dict)
    rules: dict[str, Rule] = field(default_factory=dict)
    script_dir: Path | None = field(default=None, compare=False)

    def fact(self, fact_id: str) -> Fact:
        try:
            return self.facts[fact_id]
        except KeyError:
            raise UnknownEntity("fact", fact_id) from None

    def container(self, container_id: str) -> Container:
        try:
            return self.containers[container_id]
        except KeyError:
            raise UnknownEntity("container", container_id) from None

    def snapshot_fact_values(self) -> dict[str, bool]:
        """Capture all fact values, e.g. to reset between benchmark runs."""
        return {fact_id: fact.value for fact_id, fact in self.facts.items()}

    def restore_fact_values(self, values: dict[str, bool]) -> None:
        for fact_id, value in values.items():
            self.fact(fact_id).value = value


def _placeholder_violations(kind: str, spec: CommandSpec) -> list[str]:
    violations = []
    if not spec.executable_path:
        violations.append(f"{kind} {spec.id}: empty executable path")
    for match in PLACEHOLDER_RE.finditer(spec.format_string):
        index = int(match.group(1))
        if index >= len(spec.format_args):
            violations.append(
                f"{kind} {spec.id}: placeholder {{{index}}} out of range "
                f"(got {len(spec.format_args)} format args)"
            )
    return violations


def validate(network: Network) -> list[str]:
    """Check every structural invariant; return one message per violation.

    An empty list means every id lookup performed by any other operation
    in this package will succeed. Violations are data, not failures.
    """
    violations: list[str] = []

    by_description: dict[str, list[str]] = {}
    for common in network.common_properties.values():
        if not common.description:
            violations.append(f"common property {common.id}: empty description")
        by_description.setdefault(common.description, []).append(common.id)
        for verifier_id in common.verifier_ids:
            if verifier_id not in network.verifiers:
                violations.append(
                    f"common property {common.id}: unresolved verifier {verifier_id}"
                )
    for description, ids in by_description.items():
        if len(ids) > 1:
            violations.append(
                f"common properties {', '.join(ids)}: duplicate description '{description}'"
            )

    for verifier in network.verifiers.values():
        violations.extend(_placeholder_violations("verifier", verifier))
    for action in network.actions.values():
        violations.extend(_placeholder_violations("action", action))

    custom_property_owner: dict[str, str] = {}
    for fact in network.facts.values():
        if not fact.description:
            violations.append(f"fact {fact.id}: empty description")
        for verifier_id in fact.verifier_ids:
            if verifier_id not in network.verifiers:
                violations.append(f"fact {fact.id}: unresolved verifier {verifier_id}")
        seen_descriptions: dict[str, str] = {}
        for custom in fact.custom_properties:
            if custom.id in custom_property_owner:
                violations.append(
                    f"custom property {custom.id}: duplicate id "
                    f"(facts {custom_property_owner[custom.id]}, {fact.id})"
                )
            else:
                custom_property_owner[custom.id] = fact.id
            common = network.common_properties.get(custom.common_property_id)
            if common is None:
                violations.append(
                    f"fact {fact.id}: custom property {custom.id}: "
                    f"unresolved common property {custom.common_property_id}"
                )
                continue
            if common.description in seen_descriptions:
                violations.append(
                    f"fact {fact.id}: custom properties "
                    f"{seen_descriptions[common.description]}, {custom.id} "
                    f"share common-property description '{common.description}'"
                )
            else:
                seen_descriptions[common.description] = custom.id

    fact_owner: dict[str, str] = {}
    for container in network.containers.values():
        for fact_id in container.fact_ids:
            if fact_id not in network.facts:
                violations.append(f"container {container.id}: unresolved fact {fact_id}")
            if fact_id in fact_owner:
                violations.append(
                    f"fact {fact_id}: belongs to multiple containers "
                    f"{fact_owner[fact_id]}, {container.id}"
                )
            else:
                fact_owner[fact_id] = container.id

    for link in network.links.values():
        for endpoint in (link.from_container_id, link.to_container_id):
            if endpoint not in network.containers:
                violations.append(f"link {link.id}: unresolved container {endpoint}")
        if link.from_container_id == link.to_container_id:
            violations.append(f"link {link.id}: endpoints must differ")

    for rule in network.rules.values():
        if not rule.preconditions:
            violations.append(f"rule {rule.id}: empty preconditions")
        for fact_id, _ in list(rule.preconditions) + list(rule.postconditions):
            if fact_id not in network.facts:
                violations.append(f"rule {rule.id}: unresolved fact {fact_id}")
        if rule.gated_link_id is not None and rule.gated_link_id not in network.links:
            violations.append(f"rule {rule.id}: unresolved link {rule.gated_link_id}")
        if rule.action_id is not None and rule.action_id not in network.actions:
            violations.append(f"rule {rule.id}: unresolved action {rule.action_id}")

    return violations


def effective_verifiers(network: Network, fact_id: str) -> list[str]:
    """Ordered verifier ids attached to a fact, directly or via properties.

    The fact's own verifiers come first, then each custom property's
    common-property verifiers in property order; duplicates are dropped
    keeping the first occurrence. Deterministic and stable across
    import/export round trips.
    """
    fact = network.fact(fact_id)
    ordered = list(fact.verifier_ids)
    for custom in fact.custom_properties:
        common = network.common_properties.get(custom.common_property_id)
        if common is None:
            raise UnknownEntity("common property", custom.common_property_id)
        ordered.extend(common.verifier_ids)
    return list(dict.fromkeys(ordered))
