"""Shared vocabularies: IOC types, tactic names, step-name mapping.

Step identifiers in DSL source are plain identifiers (``t1552_002``,
``credential_access``); the rest of the pipeline works with their
normalized forms (``T1552.002``, ``credential-access``).  The two
mappings below are inverse bijections over the identifier space, which
is what makes parse/pretty-print round trips exact.
"""

from __future__ import annotations

import re

#: Indicator types understood by bind() and the IOC database.
IOC_TYPES = (
    "registry_hive",
    "process_name",
    "file_path",
    "domain",
    "command_line",
    "hash",
)

#: Canonical kill-chain ordering of tactic names.
CANONICAL_TACTICS = (
    "reconnaissance",
    "resource-development",
    "initial-access",
    "execution",
    "persistence",
    "privilege-escalation",
    "defense-evasion",
    "credential-access",
    "discovery",
    "lateral-movement",
    "collection",
    "command-and-control",
    "exfiltration",
    "impact",
)

TACTIC_ORDER = {name: i for i, name in enumerate(CANONICAL_TACTICS)}

#: Normalized technique ids look like T1552 or T1552.002.
TECHNIQUE_ID_RE = re.compile(r"^T\d{4}(\.\d{3})?$")

# Identifier-space counterpart: t1552 or t1552_002.
_TECHNIQUE_IDENT_RE = re.compile(r"^t\d{4}(_\d{3})?$")

IDENTIFIER_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


def normalize_step(ident: str) -> str:
    """Map a DSL identifier to its step name.

    ``t1552_002`` -> ``T1552.002``; anything else is treated as a
    tactic-style name with underscores turned into hyphens.
    """
    if _TECHNIQUE_IDENT_RE.match(ident):
        return "T" + ident[1:].replace("_", ".")
    return ident.replace("_", "-")


def step_identifier(step: str) -> str:
    """Inverse of :func:`normalize_step`."""
    if TECHNIQUE_ID_RE.match(step):
        return "t" + step[1:].replace(".", "_")
    return step.replace("-", "_")


def is_technique_id(step: str) -> bool:
    return bool(TECHNIQUE_ID_RE.match(step))


def is_known_step(step: str) -> bool:
    return is_technique_id(step) or step in TACTIC_ORDER
