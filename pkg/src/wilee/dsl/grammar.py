"""Grammar definition for the DSL.

The grammar serves three masters: it documents the accepted surface
syntax (see ``docs/grammar.bnf`` for the rendered BNF), it drives the
structural checks used by the pretty printer and validator, and it
defines the search space for the genetic perturbation engine, which
regenerates subtrees rooted at a nonterminal.

Nonterminals are lowercase symbols; terminals are uppercase token-class
names.  Productions map each nonterminal to its alternative right-hand
sides, each a sequence of symbols.
"""

from __future__ import annotations

from dataclasses import dataclass

from .ast import NodeKind


class GrammarError(ValueError):
    """A grammar violates one of its structural invariants."""


@dataclass(frozen=True)
class DslGrammar:
    nonterminals: frozenset[str]
    productions: dict[str, list[list[str]]]
    start_symbol: str

    def __post_init__(self):
        for problem in check_grammar(self):
            raise GrammarError(problem)

    def is_nonterminal(self, symbol: str) -> bool:
        return symbol in self.productions


def check_grammar(grammar: DslGrammar) -> list[str]:
    """Return human-readable descriptions of invariant violations."""
    problems = []
    if set(grammar.nonterminals) != set(grammar.productions):
        problems.append("nonterminal set does not match production keys")
    if grammar.start_symbol not in grammar.productions:
        problems.append(f"start symbol {grammar.start_symbol!r} has no productions")
    for nt, alts in grammar.productions.items():
        for alt in alts:
            for symbol in alt:
                if symbol.islower() and symbol not in grammar.productions:
                    problems.append(f"undefined nonterminal {symbol!r} in {nt!r}")
    # Every nonterminal must admit a finite derivation: iterate to the
    # fixed point of "productive" symbols (some alternative made only of
    # terminals and already-productive nonterminals).
    productive: set[str] = set()
    changed = True
    while changed:
        changed = False
        for nt, alts in grammar.productions.items():
            if nt in productive:
                continue
            for alt in alts:
                if all(
                    (not grammar.is_nonterminal(s)) or s in productive for s in alt
                ):
                    productive.add(nt)
                    changed = True
                    break
    dead = set(grammar.productions) - productive
    for nt in sorted(dead):
        problems.append(f"nonterminal {nt!r} has no finite derivation")
    return problems


def _make(productions: dict[str, list[list[str]]], start: str) -> DslGrammar:
    return DslGrammar(frozenset(productions), productions, start)


#: The shipped DSL grammar.  Module-level programs are function
#: definitions; a function body is either concrete statements
#: (instantiations, attribute assignments, relations) or bare abstract
#: calls naming workflow steps.
DEFAULT_GRAMMAR = _make(
    {
        "module": [["function_list"]],
        "function_list": [[], ["function", "function_list"]],
        "function": [["DEF", "NAME", "LPAREN", "RPAREN", "COLON", "body"]],
        "body": [["PASS"], ["statement_list"]],
        "statement_list": [["statement"], ["statement", "statement_list"]],
        "statement": [["instantiation"], ["assignment"], ["relation"], ["call"]],
        "instantiation": [["NAME", "ASSIGN", "NAME", "LPAREN", "RPAREN"]],
        "assignment": [["identifier", "DOT", "NAME", "ASSIGN", "value"]],
        "value": [["literal"], ["bind"]],
        "literal": [["STRING"]],
        "bind": [["BIND", "LPAREN", "BINDARGS", "RPAREN"]],
        "relation": [["identifier", "DOT", "VERB", "LPAREN", "identifier", "RPAREN"]],
        "call": [["NAME", "LPAREN", "RPAREN"]],
        "identifier": [["NAME"]],
    },
    "module",
)


#: Nonterminal each node kind derives from.  For genetic operators the
#: interesting label is the *position* a subtree hangs off, so literals
#: and binds both map to ``value`` and the three concrete statement
#: kinds plus abstract calls all map to ``statement``.
NODE_NONTERMINAL = {
    NodeKind.MODULE: "module",
    NodeKind.FUNCTION_DEF: "function",
    NodeKind.OBJECT_INSTANTIATION: "statement",
    NodeKind.ATTRIBUTE_ASSIGN: "statement",
    NodeKind.RELATION_STMT: "statement",
    NodeKind.ABSTRACT_CALL: "statement",
    NodeKind.LITERAL: "value",
    NodeKind.BIND_EXPR: "value",
    NodeKind.IDENTIFIER: "identifier",
}
