"""Genetic operators over candidate trees.

All three operators are closed over validity: offspring always pass
validation against the grammar and data model, or the parent comes back
unchanged with a flag after bounded retries.  Every operator is a pure
function of its inputs and an explicit seed.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Optional

from ..dsl import (
    AstNode,
    AstGenerator,
    DslGrammar,
    DEFAULT_GRAMMAR,
    NODE_NONTERMINAL,
    NodeKind,
    content_hash,
    get_node,
    iter_nodes,
    literal,
    replace_node,
    tree_depth,
    validate,
)
from ..dsl.ast import NodePath
from ..stores import DataModel, IocDb, ioc_type_for_variable, resolve_bind
from .behavior import Behavior, behavior_of

DEFAULT_MAX_DEPTH = 12
DEFAULT_RETRIES = 20

#: Nonterminal labels the operators may touch (module roots excluded;
#: whole-function regeneration is reserved for mutation).
MUTATION_LABELS = frozenset({"function", "statement", "value", "identifier"})
CROSSOVER_LABELS = frozenset({"statement", "value", "identifier"})


@dataclass(frozen=True)
class Lineage:
    parents: tuple[str, ...]
    operator: str
    paths: tuple[NodePath, ...] = ()
    flag: Optional[str] = None


@dataclass
class Candidate:
    uid: str
    ast: AstNode  # Module of concrete functions
    behavior: Behavior
    lineage: Lineage
    fitness: Optional[float] = None
    novelty: float = 0.0

    @classmethod
    def from_ast(cls, tree: AstNode, model: DataModel, lineage: Lineage) -> "Candidate":
        return cls(
            uid=content_hash(tree),
            ast=tree,
            behavior=behavior_of(tree, model),
            lineage=lineage,
        )


def is_valid(tree: AstNode, model: DataModel) -> bool:
    return not validate(tree, model)


def mutable_sites(tree: AstNode, labels: frozenset[str]) -> list[tuple[NodePath, AstNode]]:
    return [
        (path, node)
        for path, node in iter_nodes(tree)
        if path and NODE_NONTERMINAL[node.kind] in labels
    ]


def _scope_before(fn: AstNode, stmt_index: int) -> dict[str, str]:
    scope: dict[str, str] = {}
    for stmt in fn.children[:stmt_index]:
        if stmt.kind is NodeKind.OBJECT_INSTANTIATION:
            scope[stmt.attrs["var"]] = stmt.attrs["class_name"]
    return scope


def _attrs_assigned_later(fn: AstNode, stmt_index: int, var: str) -> frozenset[str]:
    needed = set()
    for stmt in fn.children[stmt_index + 1 :]:
        if (
            stmt.kind is NodeKind.ATTRIBUTE_ASSIGN
            and stmt.children[0].attrs["name"] == var
        ):
            needed.add(stmt.attrs["attribute"])
    return frozenset(needed)


def _var_used_later(fn: AstNode, stmt_index: int, var: str) -> bool:
    for stmt in fn.children[stmt_index + 1 :]:
        for _, node in iter_nodes(stmt):
            if node.kind is NodeKind.IDENTIFIER and node.attrs["name"] == var:
                return True
    return False


def _regenerate(
    tree: AstNode, path: NodePath, node: AstNode, gen: AstGenerator, model: DataModel
) -> Optional[AstNode]:
    """Fresh subtree for the same grammar position, respecting the
    variables in scope at the site."""
    if node.kind is NodeKind.FUNCTION_DEF:
        return gen.random_function(name=node.attrs["name"], abstract=_is_abstract(node))

    fn = get_node(tree, path[:1])
    stmt_index = path[1]
    scope = _scope_before(fn, stmt_index)
    abstract = _is_abstract(fn)

    if len(path) == 2:  # statement position
        if node.kind is NodeKind.OBJECT_INSTANTIATION and _var_used_later(
            fn, stmt_index, node.attrs["var"]
        ):
            # Later statements reference this object: keep the name and
            # pick a class still carrying the attributes assigned later.
            return gen.random_instantiation(
                scope,
                var=node.attrs["var"],
                must_have=_attrs_assigned_later(fn, stmt_index, node.attrs["var"]),
            )
        return gen.random_statement(scope, abstract)

    stmt = fn.children[stmt_index]
    if node.kind in (NodeKind.LITERAL, NodeKind.BIND_EXPR):
        return gen.random_value()
    if node.kind is NodeKind.IDENTIFIER:
        if stmt.kind is NodeKind.ATTRIBUTE_ASSIGN:
            attribute = stmt.attrs["attribute"]
            eligible = {
                var: cls
                for var, cls in scope.items()
                if attribute in dict(gen.classes or {}).get(cls, ())
            } or scope
            return gen.random_identifier(eligible)
        return gen.random_identifier(scope)
    return None


def _is_abstract(fn: AstNode) -> bool:
    return any(stmt.kind is NodeKind.ABSTRACT_CALL for stmt in fn.children)


def mutate(
    c: Candidate,
    grammar: DslGrammar = DEFAULT_GRAMMAR,
    model: Optional[DataModel] = None,
    rng_seed: int = 0,
    max_depth: int = DEFAULT_MAX_DEPTH,
    retries: int = DEFAULT_RETRIES,
) -> Candidate:
    """Replace one uniformly chosen mutable subtree with a grammar-
    generated one rooted at the same nonterminal.  After ``retries``
    failures to produce a valid, different tree the parent returns
    unchanged with a ``max-retries`` flag."""
    model = model or DataModel.default()
    rng = random.Random(rng_seed)
    gen = AstGenerator(rng, model=model, grammar=grammar)
    sites = mutable_sites(c.ast, MUTATION_LABELS)
    if not sites:
        return replace_lineage(c, Lineage((c.uid,), "mutate", flag="no-sites"))
    for _ in range(retries):
        path, node = sites[rng.randrange(len(sites))]
        replacement = _regenerate(c.ast, path, node, gen, model)
        if replacement is None:
            continue
        offspring = replace_node(c.ast, path, replacement)
        if offspring == c.ast or tree_depth(offspring) > max_depth:
            continue
        if is_valid(offspring, model):
            return Candidate.from_ast(
                offspring, model, Lineage((c.uid,), "mutate", (path,))
            )
    return replace_lineage(c, Lineage((c.uid,), "mutate", flag="max-retries"))


def replace_lineage(c: Candidate, lineage: Lineage) -> Candidate:
    return Candidate(uid=c.uid, ast=c.ast, behavior=c.behavior, lineage=lineage, fitness=c.fitness)


def crossover(
    a: Candidate,
    b: Candidate,
    grammar: DslGrammar = DEFAULT_GRAMMAR,
    model: Optional[DataModel] = None,
    rng_seed: int = 0,
    max_depth: int = DEFAULT_MAX_DEPTH,
    retries: int = DEFAULT_RETRIES,
) -> tuple[Candidate, Candidate]:
    """Swap subtrees rooted at a same-nonterminal node pair.  Parents
    come back flagged ``no-common-nonterminal`` when no such pair exists
    or no swap yields two valid offspring."""
    model = model or DataModel.default()
    rng = random.Random(rng_seed)
    sites_a = mutable_sites(a.ast, CROSSOVER_LABELS)
    sites_b = mutable_sites(b.ast, CROSSOVER_LABELS)
    by_label_a: dict[str, list] = {}
    for site in sites_a:
        by_label_a.setdefault(NODE_NONTERMINAL[site[1].kind], []).append(site)
    by_label_b: dict[str, list] = {}
    for site in sites_b:
        by_label_b.setdefault(NODE_NONTERMINAL[site[1].kind], []).append(site)
    common = sorted(set(by_label_a) & set(by_label_b))
    if not common:
        flag = Lineage((a.uid, b.uid), "crossover", flag="no-common-nonterminal")
        return replace_lineage(a, flag), replace_lineage(b, flag)

    for _ in range(retries):
        label = common[rng.randrange(len(common))]
        path_a, node_a = by_label_a[label][rng.randrange(len(by_label_a[label]))]
        path_b, node_b = by_label_b[label][rng.randrange(len(by_label_b[label]))]
        child_a = replace_node(a.ast, path_a, node_b)
        child_b = replace_node(b.ast, path_b, node_a)
        if tree_depth(child_a) > max_depth or tree_depth(child_b) > max_depth:
            continue
        if is_valid(child_a, model) and is_valid(child_b, model):
            lineage = Lineage((a.uid, b.uid), "crossover", (path_a, path_b))
            return (
                Candidate.from_ast(child_a, model, lineage),
                Candidate.from_ast(child_b, model, lineage),
            )
    flag = Lineage((a.uid, b.uid), "crossover", flag="no-common-nonterminal")
    return replace_lineage(a, flag), replace_lineage(b, flag)


def perturb_iocs(
    c: Candidate,
    db: IocDb,
    rng_seed: int = 0,
    probability: float = 0.5,
    model: Optional[DataModel] = None,
) -> Candidate:
    """Swap indicator values for different type-matched ones from the
    database.

    Bind sites draw uniformly from their resolved candidates; literal
    sites whose variable maps to an ioc_type draw uniformly from the
    other values of that type.  Sites with fewer than two candidates
    are left untouched, and substitution never crosses ioc_types.
    """
    model = model or DataModel.default()
    rng = random.Random(rng_seed)
    tree = c.ast
    changed: list[NodePath] = []
    for path, node in list(iter_nodes(c.ast)):
        if node.kind is not NodeKind.ATTRIBUTE_ASSIGN:
            continue
        value_path = path + (1,)
        value = node.children[1]
        if value.kind is NodeKind.BIND_EXPR:
            options = resolve_bind(db, value)
            if len(options) < 2:
                continue
            if rng.random() < probability:
                pick = options[rng.randrange(len(options))]
                tree = replace_node(tree, value_path, literal(pick.value))
                changed.append(value_path)
        else:
            ioc_type = ioc_type_for_variable(node.attrs["attribute"])
            if ioc_type is None:
                continue
            options = sorted(db.by_type(ioc_type), key=lambda r: r.value)
            if len(options) < 2:
                continue
            different = [r for r in options if r.value != value.attrs["value"]]
            if not different:
                continue
            if rng.random() < probability:
                pick = different[rng.randrange(len(different))]
                tree = replace_node(tree, value_path, literal(pick.value))
                changed.append(value_path)
    if not changed:
        return replace_lineage(c, Lineage((c.uid,), "perturb_iocs"))
    return Candidate.from_ast(
        tree, model, Lineage((c.uid,), "perturb_iocs", tuple(changed))
    )
