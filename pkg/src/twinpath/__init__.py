"""Digital-twin network traversal with environment verifiers.

A network is a directed graph of containers whose links are gated by
rules over boolean facts. During traversal each fact consulted by a
rule can be re-checked against the live environment by spawning its
verifier subprocesses, so the reported attack paths reflect the
environment as it is, not as it was when the twin was exported.
"""

from .bundle import (
    DOCUMENTS,
    SCRIPTS_DIR,
    BundleError,
    MalformedDocument,
    MissingDocument,
    NetworkBundle,
    ValidationFailed,
    export_network,
    import_network,
)
from .model import (
    Action,
    CommandSpec,
    CommonProperty,
    Container,
    CustomProperty,
    Fact,
    Link,
    Network,
    Rule,
    TwinpathError,
    UnknownEntity,
    Verifier,
    effective_verifiers,
    validate,
)
from .report import (
    VERIFIERS_DISABLED_WARNING,
    format_elapsed,
    render_json_report,
    render_text_report,
)
from .traverse import (
    CACHE_ALWAYS,
    CACHE_ONCE,
    ActionRecord,
    BenchmarkStats,
    InvalidNetwork,
    PostconditionRecord,
    TraversalOptions,
    TraversalResult,
    benchmark,
    evaluate_rule,
    find_paths,
    fire_rule,
)
from .verify import (
    DEFAULT_TIMEOUT_MS,
    DESCRIPTION_ARG,
    LENIENT,
    STRICT,
    TICKS_PER_SECOND,
    CommandLine,
    NoMatchingArgument,
    PlaceholderOutOfRange,
    ProcessOutcome,
    QuoteInArgument,
    SpawnFailure,
    UnbalancedQuote,
    UnparsableOutput,
    VerificationFailed,
    VerificationRecord,
    VerifierError,
    VerifierTimeout,
    build_command,
    execute_process,
    parse_boolean,
    resolve_format_argument,
    tokenize_arguments,
    verify_fact,
)

__version__ = "0.1.0"

__all__ = [
    "Action",
    "ActionRecord",
    "BenchmarkStats",
    "BundleError",
    "CACHE_ALWAYS",
    "CACHE_ONCE",
    "CommandLine",
    "CommandSpec",
    "CommonProperty",
    "Container",
    "CustomProperty",
    "DEFAULT_TIMEOUT_MS",
    "DESCRIPTION_ARG",
    "DOCUMENTS",
    "Fact",
    "InvalidNetwork",
    "LENIENT",
    "Link",
    "MalformedDocument",
    "MissingDocument",
    "Network",
    "NetworkBundle",
    "NoMatchingArgument",
    "PlaceholderOutOfRange",
    "PostconditionRecord",
    "ProcessOutcome",
    "QuoteInArgument",
    "Rule",
    "SCRIPTS_DIR",
    "STRICT",
    "SpawnFailure",
    "TICKS_PER_SECOND",
    "TraversalOptions",
    "TraversalResult",
    "TwinpathError",
    "UnbalancedQuote",
    "UnknownEntity",
    "UnparsableOutput",
    "VERIFIERS_DISABLED_WARNING",
    "ValidationFailed",
    "VerificationFailed",
    "VerificationRecord",
    "Verifier",
    "VerifierError",
    "VerifierTimeout",
    "benchmark",
    "build_command",
    "effective_verifiers",
    "evaluate_rule",
    "execute_process",
    "export_network",
    "find_paths",
    "fire_rule",
    "format_elapsed",
    "import_network",
    "parse_boolean",
    "render_json_report",
    "render_text_report",
    "resolve_format_argument",
    "tokenize_arguments",
    "validate",
    "verify_fact",
]
