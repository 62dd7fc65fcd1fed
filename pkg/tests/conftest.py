"""Shared fixture builders.

The demo network is the three-container escalation scenario used across
the suite: Container 1 links to Container 2 behind a pre-set fact, and
Container 2 links to Container 3 behind a fact whose value is verified
against a key file on disk. Flipping that key file is how tests couple
the traversal outcome to the environment.
"""

import random
import textwrap
from pathlib import Path

import pytest

from twinpath.bundle import export_network
from twinpath.model import (
    Action,
    CommonProperty,
    Container,
    CustomProperty,
    Fact,
    Link,
    Network,
    Rule,
    Verifier,
)

CORRECT_KEY = "Correct Goal Key"
WRONG_KEY = "Not Correct Goal Key"
KEY_FOLDER = "Has Goal Key"

KEY_CHECK_PY = textwrap.dedent('''\
    #!/usr/bin/env python3
    """Key-file check: first file in the named folder must equal the target.

    Usage: key_check.py <folder> <target>
    Prints True or False. Missing or empty folder is an error (exit 1).
    """
    import sys
    from pathlib import Path


    def main() -> int:
        if len(sys.argv) != 3:
            print("usage: key_check.py <folder> <target>", file=sys.stderr)
            return 1
        folder = Path(sys.argv[1])
        if not folder.is_dir():
            print(f"no such folder: {folder}", file=sys.stderr)
            return 1
        files = sorted(p for p in folder.iterdir() if p.is_file())
        if not files:
            print(f"no key file in {folder}", file=sys.stderr)
            return 1
        content = files[0].read_text(encoding="utf-8")
        print("True" if content == sys.argv[2] else "False")
        return 0


    if __name__ == "__main__":
        sys.exit(main())
''')

KEY_CHECK_SH = textwrap.dedent('''\
    #!/bin/sh
    # Key-file check, shell variant: first file in $1 must equal $2.
    # Note $(cat) strips trailing newlines; key files are written without one.
    folder="$1"
    target="$2"
    [ -d "$folder" ] || { echo "no such folder: $folder" >&2; exit 1; }
    file=$(ls "$folder" | sort | head -n 1)
    [ -n "$file" ] || { echo "no key file in $folder" >&2; exit 1; }
    content=$(cat "$folder/$file")
    if [ "$content" = "$target" ]; then echo True; else echo False; fi
''')

INTERPRETERS = {
    "python3": ("python3", 'key_check.py "{0}" "{1}"'),
    "sh": ("sh", 'key_check.sh "{0}" "{1}"'),
}


def build_demo_network(fact5_value: bool = False,
                       interpreter: str = "python3") -> Network:
    """Three containers, five facts, two gated links; no script_dir set."""
    executable, format_string = INTERPRETERS[interpreter]
    network = Network()
    network.verifiers["V1"] = Verifier(
        id="V1",
        executable_path=executable,
        format_string=format_string,
        format_args=["Description", "Target"],
    )
    network.common_properties["CP1"] = CommonProperty("CP1", "Target")
    network.common_properties["CP2"] = CommonProperty("CP2", "Ping Target")
    network.facts["F1"] = Fact(
        "F1", "Connected To Internet", True,
        custom_properties=[CustomProperty("P1", "CP2", "8.8.8.8")],
    )
    network.facts["F2"] = Fact("F2", "Reached Container 2", False)
    network.facts["F3"] = Fact("F3", "Reached Container 3", False)
    network.facts["F4"] = Fact("F4", "Has Intermediate Key", True)
    network.facts["F5"] = Fact(
        "F5", KEY_FOLDER, fact5_value,
        custom_properties=[CustomProperty("P2", "CP1", CORRECT_KEY)],
        verifier_ids=["V1"],
    )
    network.containers["C1"] = Container("C1", "Container 1", ["F1", "F4"])
    network.containers["C2"] = Container("C2", "Container 2", ["F2", "F5"])
    network.containers["C3"] = Container("C3", "Container 3", ["F3"])
    network.links["L1"] = Link("L1", "C1", "C2")
    network.links["L2"] = Link("L2", "C2", "C3")
    network.rules["R1"] = Rule(
        "R1", preconditions=[("F4", True)], gated_link_id="L1",
        postconditions=[("F2", True)],
    )
    network.rules["R2"] = Rule(
        "R2", preconditions=[("F5", True)], gated_link_id="L2",
        postconditions=[("F3", True)],
    )
    return network


def write_demo_scripts(script_dir: Path, key_text: "str | None" = CORRECT_KEY) -> None:
    script_dir.mkdir(parents=True, exist_ok=True)
    (script_dir / "key_check.py").write_text(KEY_CHECK_PY, encoding="utf-8")
    (script_dir / "key_check.sh").write_text(KEY_CHECK_SH, encoding="utf-8")
    if key_text is not None:
        set_environment_key(script_dir, key_text)


def set_environment_key(script_dir: Path, key_text: str) -> None:
    """Write the on-disk key the verifier samples; no trailing newline."""
    folder = script_dir / KEY_FOLDER
    folder.mkdir(exist_ok=True)
    (folder / "key.txt").write_text(key_text, encoding="utf-8")


def make_demo_bundle(root: Path, *, key_text: str = CORRECT_KEY,
                     fact5_value: bool = False,
                     interpreter: str = "python3") -> Path:
    bundle_dir = root / "bundle"
    bundle = export_network(build_demo_network(fact5_value, interpreter), bundle_dir)
    write_demo_scripts(bundle.script_dir, key_text)
    return bundle_dir


@pytest.fixture
def demo_network():
    return build_demo_network()


@pytest.fixture
def demo_bundle(tmp_path):
    return make_demo_bundle(tmp_path)


def echo_verifier(verifier_id: str, text: str) -> Verifier:
    """Verifier that prints a constant, for subprocess-cheap tests."""
    return Verifier(verifier_id, "echo", text, [])


def random_network(seed: int, with_postconditions: bool = True) -> Network:
    """Generate a structurally valid network; same seed, same network.

    Used by round-trip and path-validity property suites. All verifiers
    are echo-style (no scripts needed); descriptions are kept unique
    where validity demands it.
    """
    rng = random.Random(seed)
    network = Network()

    for index in range(rng.randint(0, 3)):
        vid = f"V{index}"
        network.verifiers[vid] = echo_verifier(vid, rng.choice(["True", "False"]))
    verifier_ids = list(network.verifiers)

    for index in range(rng.randint(0, 3)):
        cid = f"CP{index}"
        count = rng.randint(0, len(verifier_ids))
        network.common_properties[cid] = CommonProperty(
            cid, f"Attribute {index}", rng.sample(verifier_ids, count))
    common_ids = list(network.common_properties)

    custom_serial = 0
    for index in range(rng.randint(1, 8)):
        fid = f"F{index}"
        customs = []
        # at most one custom property per common property per fact, so
        # descriptions never collide within the fact
        for cid in rng.sample(common_ids, rng.randint(0, len(common_ids))):
            customs.append(CustomProperty(f"P{custom_serial}", cid,
                                          f"value {custom_serial}"))
            custom_serial += 1
        count = rng.randint(0, len(verifier_ids))
        network.facts[fid] = Fact(
            fid, f"Fact {index}", rng.random() < 0.5,
            custom_properties=customs,
            verifier_ids=rng.sample(verifier_ids, count),
        )
    fact_ids = list(network.facts)

    container_count = rng.randint(2, 5)
    for index in range(container_count):
        cid = f"C{index}"
        network.containers[cid] = Container(cid, f"Machine {index}")
    for fid in fact_ids:  # each fact lives in at most one container
        if rng.random() < 0.9:
            network.containers[f"C{rng.randrange(container_count)}"].fact_ids.append(fid)
    container_ids = list(network.containers)

    pairs = [(a, b) for a in container_ids for b in container_ids if a != b]
    for index, (src, dst) in enumerate(rng.sample(pairs, rng.randint(1, len(pairs)))):
        network.links[f"L{index}"] = Link(f"L{index}", src, dst)
    link_ids = list(network.links)

    for index in range(rng.randint(0, 6)):
        rid = f"R{index}"
        preconditions = [(fid, rng.random() < 0.5)
                         for fid in rng.sample(fact_ids, rng.randint(1, min(3, len(fact_ids))))]
        postconditions = []
        if with_postconditions and rng.random() < 0.5:
            postconditions = [(fid, rng.random() < 0.5)
                              for fid in rng.sample(fact_ids,
                                                    rng.randint(1, min(2, len(fact_ids))))]
        network.rules[rid] = Rule(
            rid,
            preconditions=preconditions,
            gated_link_id=rng.choice(link_ids + [None]),
            postconditions=postconditions,
        )
    return network
