"""The restricted threat-description DSL: grammar, parser, printer,
validator, and grammar-driven random generation."""

from .ast import (
    AstNode,
    NodeKind,
    NodePath,
    RELATION_VERBS,
    abstract_call,
    attribute_assign,
    bind,
    content_hash,
    function_def,
    get_node,
    identifier,
    instantiation,
    iter_nodes,
    literal,
    module,
    relation,
    replace_node,
    tree_depth,
)
from .description import DescriptionError, ThreatDescription
from .generate import AstGenerator, random_technique_id
from .grammar import DEFAULT_GRAMMAR, DslGrammar, GrammarError, NODE_NONTERMINAL, check_grammar
from .parser import DslSyntaxError, parse
from .printer import InvalidAstError, pretty_print, pretty_print_node
from .validate import Diagnostic, Severity, validate
from .vocab import (
    CANONICAL_TACTICS,
    IOC_TYPES,
    TACTIC_ORDER,
    is_known_step,
    is_technique_id,
    normalize_step,
    step_identifier,
)

__all__ = [
    "AstNode",
    "NodeKind",
    "NodePath",
    "RELATION_VERBS",
    "abstract_call",
    "attribute_assign",
    "bind",
    "content_hash",
    "function_def",
    "get_node",
    "identifier",
    "instantiation",
    "iter_nodes",
    "literal",
    "module",
    "relation",
    "replace_node",
    "tree_depth",
    "DescriptionError",
    "ThreatDescription",
    "AstGenerator",
    "random_technique_id",
    "DEFAULT_GRAMMAR",
    "DslGrammar",
    "GrammarError",
    "NODE_NONTERMINAL",
    "check_grammar",
    "DslSyntaxError",
    "parse",
    "InvalidAstError",
    "pretty_print",
    "pretty_print_node",
    "Diagnostic",
    "Severity",
    "validate",
    "CANONICAL_TACTICS",
    "IOC_TYPES",
    "TACTIC_ORDER",
    "is_known_step",
    "is_technique_id",
    "normalize_step",
    "step_identifier",
]
