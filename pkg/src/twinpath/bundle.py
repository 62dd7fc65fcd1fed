"""Directory-bundle import/export.

A network is interchanged as a directory of seven JSON documents, one per
entity type, each a top-level array of objects, plus a ``scripts/``
subdirectory that becomes the working directory for verifier and action
subprocesses. Export is canonical: two equal networks always produce
byte-identical bundles, and array order is semantic (it drives argument
resolution and verifier execution order), so it survives round trips.
"""

import json
from dataclasses import dataclass
from pathlib import Path

from .model import (
    Action,
    CommonProperty,
    Container,
    CustomProperty,
    Fact,
    Link,
    Network,
    Rule,
    TwinpathError,
    Verifier,
    validate,
)

VERIFIERS_DOC = "verifiers.json"
ACTIONS_DOC = "actions.json"
COMMON_PROPERTIES_DOC = "common_properties.json"
FACTS_DOC = "facts.json"
CONTAINERS_DOC = "containers.json"
LINKS_DOC = "links.json"
RULES_DOC = "rules.json"
DOCUMENTS = (
    VERIFIERS_DOC,
    ACTIONS_DOC,
    COMMON_PROPERTIES_DOC,
    FACTS_DOC,
    CONTAINERS_DOC,
    LINKS_DOC,
    RULES_DOC,
)
SCRIPTS_DIR = "scripts"


class BundleError(TwinpathError):
    """Base class for import/export failures."""


class MissingDocument(BundleError):
    """The bundle directory is absent or holds none of the documents."""

    def __init__(self, root_path: "Path | str", reason: str):
        super().__init__(f"{root_path}: {reason}")
        self.root_path = Path(root_path)
        self.reason = reason


class MalformedDocument(BundleError):
    """A document failed to parse or has the wrong shape.

    ``position`` is a character offset for JSON syntax errors and an
    array index for schema errors.
    """

    def __init__(self, file: str, position: int, reason: str):
        super().__init__(f"{file} at {position}: {reason}")
        self.file = file
        self.position = position
        self.reason = reason


class ValidationFailed(BundleError):
    """The documents parsed but the assembled network breaks invariants."""

    def __init__(self, violations: list[str]):
        super().__init__("; ".join(violations))
        self.violations = violations


@dataclass
class NetworkBundle:
    """On-disk location of an exported network."""

    root_path: Path
    script_dir: Path


def _load_array(root: Path, name: str) -> list:
    path = root / name
    if not path.is_file():
        return []
    try:
        data = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise MalformedDocument(name, exc.pos, exc.msg) from exc
    if not isinstance(data, list):
        raise MalformedDocument(name, 0, "top-level value must be an array")
    return data


def _field(entry, key: str, kind: type, doc: str, index: int):
    if not isinstance(entry, dict):
        raise MalformedDocument(doc, index, "entry must be an object")
    if key not in entry:
        raise MalformedDocument(doc, index, f"missing key '{key}'")
    value = entry[key]
    # bool is an int subclass; never accept it where a non-bool is wanted
    if not isinstance(value, kind) or (kind is not bool and isinstance(value, bool)):
        raise MalformedDocument(doc, index, f"'{key}' must be {kind.__name__}")
    return value


def _str_list(entry, key: str, doc: str, index: int) -> list[str]:
    values = _field(entry, key, list, doc, index)
    for value in values:
        if not isinstance(value, str):
            raise MalformedDocument(doc, index, f"'{key}' must contain only strings")
    return list(values)


def _check_unique(entity_id: str, seen: set[str], doc: str, index: int) -> None:
    if entity_id in seen:
        raise MalformedDocument(doc, index, f"duplicate id '{entity_id}'")
    seen.add(entity_id)


def _load_command_specs(root: Path, doc: str, cls):
    specs = {}
    seen: set[str] = set()
    for index, entry in enumerate(_load_array(root, doc)):
        spec_id = _field(entry, "id", str, doc, index)
        _check_unique(spec_id, seen, doc, index)
        specs[spec_id] = cls(
            id=spec_id,
            executable_path=_field(entry, "executable_path", str, doc, index),
            format_string=_field(entry, "format_string", str, doc, index),
            format_args=_str_list(entry, "format_args", doc, index),
        )
    return specs


def _load_conditions(entry, key: str, value_key: str, doc: str, index: int,
                     required: bool) -> list[tuple[str, bool]]:
    if not required and key not in entry:
        return []
    conditions = []
    for item in _field(entry, key, list, doc, index):
        if not isinstance(item, dict):
            raise MalformedDocument(doc, index, f"'{key}' entries must be objects")
        conditions.append((
            _field(item, "fact", str, doc, index),
            _field(item, value_key, bool, doc, index),
        ))
    return conditions


def import_network(root_path: "Path | str") -> Network:
    """Parse a bundle directory into a validated network.

    Absent individual documents read as empty arrays (validation then
    catches any dangling references); a directory containing none of the
    seven documents, or no directory at all, is not a bundle. Failure
    never yields a partially built network.
    """
    root = Path(root_path)
    if not root.is_dir():
        raise MissingDocument(root, "bundle directory does not exist")
    if not any((root / name).is_file() for name in DOCUMENTS):
        raise MissingDocument(root, "no bundle documents found")

    network = Network()
    network.verifiers = _load_command_specs(root, VERIFIERS_DOC, Verifier)
    network.actions = _load_command_specs(root, ACTIONS_DOC, Action)

    seen: set[str] = set()
    for index, entry in enumerate(_load_array(root, COMMON_PROPERTIES_DOC)):
        common_id = _field(entry, "id", str, COMMON_PROPERTIES_DOC, index)
        _check_unique(common_id, seen, COMMON_PROPERTIES_DOC, index)
        network.common_properties[common_id] = CommonProperty(
            id=common_id,
            description=_field(entry, "description", str, COMMON_PROPERTIES_DOC, index),
            verifier_ids=_str_list(entry, "verifiers", COMMON_PROPERTIES_DOC, index),
        )

    seen = set()
    for index, entry in enumerate(_load_array(root, FACTS_DOC)):
        fact_id = _field(entry, "id", str, FACTS_DOC, index)
        _check_unique(fact_id, seen, FACTS_DOC, index)
        customs = []
        for item in _field(entry, "custom_properties", list, FACTS_DOC, index):
            if not isinstance(item, dict):
                raise MalformedDocument(FACTS_DOC, index,
                                        "'custom_properties' entries must be objects")
            customs.append(CustomProperty(
                id=_field(item, "id", str, FACTS_DOC, index),
                common_property_id=_field(item, "common_property_id", str, FACTS_DOC, index),
                description=_field(item, "description", str, FACTS_DOC, index),
            ))
        network.facts[fact_id] = Fact(
            id=fact_id,
            description=_field(entry, "description", str, FACTS_DOC, index),
            value=_field(entry, "value", bool, FACTS_DOC, index),
            custom_properties=customs,
            verifier_ids=_str_list(entry, "verifiers", FACTS_DOC, index),
        )

    seen = set()
    for index, entry in enumerate(_load_array(root, CONTAINERS_DOC)):
        container_id = _field(entry, "id", str, CONTAINERS_DOC, index)
        _check_unique(container_id, seen, CONTAINERS_DOC, index)
        network.containers[container_id] = Container(
            id=container_id,
            name=_field(entry, "name", str, CONTAINERS_DOC, index),
            fact_ids=_str_list(entry, "facts", CONTAINERS_DOC, index),
        )

    seen = set()
    for index, entry in enumerate(_load_array(root, LINKS_DOC)):
        link_id = _field(entry, "id", str, LINKS_DOC, index)
        _check_unique(link_id, seen, LINKS_DOC, index)
        network.links[link_id] = Link(
            id=link_id,
            from_container_id=_field(entry, "from", str, LINKS_DOC, index),
            to_container_id=_field(entry, "to", str, LINKS_DOC, index),
        )

    seen = set()
    for index, entry in enumerate(_load_array(root, RULES_DOC)):
        rule_id = _field(entry, "id", str, RULES_DOC, index)
        _check_unique(rule_id, seen, RULES_DOC, index)
        gates_link = entry.get("gates_link") if isinstance(entry, dict) else None
        if gates_link is not None and not isinstance(gates_link, str):
            raise MalformedDocument(RULES_DOC, index, "'gates_link' must be string or null")
        action_id = entry.get("action")
        if action_id is not None and not isinstance(action_id, str):
            raise MalformedDocument(RULES_DOC, index, "'action' must be a string")
        network.rules[rule_id] = Rule(
            id=rule_id,
            preconditions=_load_conditions(entry, "preconditions", "equals",
                                           RULES_DOC, index, required=True),
            gated_link_id=gates_link,
            postconditions=_load_conditions(entry, "postconditions", "set",
                                            RULES_DOC, index, required=False),
            action_id=action_id,
        )

    violations = validate(network)
    if violations:
        raise ValidationFailed(violations)
    network.script_dir = root.resolve() / SCRIPTS_DIR
    return network


def _spec_json(spec) -> dict:
    return {
        "id": spec.id,
        "executable_path": spec.executable_path,
        "format_string": spec.format_string,
        "format_args": list(spec.format_args),
    }


def _serialize(network: Network) -> dict[str, list]:
    documents: dict[str, list] = {
        VERIFIERS_DOC: [_spec_json(v) for v in network.verifiers.values()],
        ACTIONS_DOC: [_spec_json(a) for a in network.actions.values()],
        COMMON_PROPERTIES_DOC: [
            {"id": c.id, "description": c.description, "verifiers": list(c.verifier_ids)}
            for c in network.common_properties.values()
        ],
        FACTS_DOC: [
            {
                "id": f.id,
                "description": f.description,
                "value": f.value,
                "custom_properties": [
                    {"id": p.id, "common_property_id": p.common_property_id,
                     "description": p.description}
                    for p in f.custom_properties
                ],
                "verifiers": list(f.verifier_ids),
            }
            for f in network.facts.values()
        ],
        CONTAINERS_DOC: [
            {"id": c.id, "name": c.name, "facts": list(c.fact_ids)}
            for c in network.containers.values()
        ],
        LINKS_DOC: [
            {"id": l.id, "from": l.from_container_id, "to": l.to_container_id}
            for l in network.links.values()
        ],
    }
    rules = []
    for rule in network.rules.values():
        entry = {
            "id": rule.id,
            "preconditions": [{"fact": fid, "equals": value}
                              for fid, value in rule.preconditions],
            "gates_link": rule.gated_link_id,
        }
        if rule.postconditions:
            entry["postconditions"] = [{"fact": fid, "set": value}
                                       for fid, value in rule.postconditions]
        if rule.action_id is not None:
            entry["action"] = rule.action_id
        rules.append(entry)
    documents[RULES_DOC] = rules
    return documents


def export_network(network: Network, root_path: "Path | str") -> NetworkBundle:
    """Write the canonical bundle layout for a valid network.

    All documents are first written under temporary names, then renamed
    into place, so a crash never leaves a half-updated bundle. The
    ``scripts/`` directory is created (its contents are the caller's to
    manage; export never copies scripts).
    """
    violations = validate(network)
    if violations:
        raise ValidationFailed(violations)
    root = Path(root_path)
    root.mkdir(parents=True, exist_ok=True)
    script_dir = root / SCRIPTS_DIR
    script_dir.mkdir(exist_ok=True)
    documents = _serialize(network)
    temp_paths = []
    for name in DOCUMENTS:
        temp = root / (name + ".tmp")
        text = json.dumps(documents[name], indent=2, ensure_ascii=False) + "\n"
        temp.write_text(text, encoding="utf-8")
        temp_paths.append((temp, root / name))
    for temp, final in temp_paths:
        temp.replace(final)
    return NetworkBundle(root_path=root, script_dir=script_dir)
