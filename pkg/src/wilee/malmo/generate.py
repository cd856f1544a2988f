"""Template filling: turn a technique description into a DSL function.

Selected classes become object instantiations; variables with a
compatible, technique-matching indicator in the IOC database become
attribute assignments (a literal for a single candidate, a bind for
several); relation statements come from priors mined over the existing
expert-authored store.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..dsl import (
    AstNode,
    NodeKind,
    attribute_assign,
    bind,
    function_def,
    instantiation,
    literal,
    relation,
    step_identifier,
    validate,
)
from ..stores import DataModel, IocDb, TtpStore, ioc_type_for_variable
from .phrases import extract_noun_phrases
from .scoring import ClassScore, score_classes, select_classes

DEFAULT_TOP_N = 5


class NoClassesSelected(Exception):
    """Every class scored zero against the description."""


Triple = tuple[str, str, str]  # (subject class, verb, object class)


@dataclass(frozen=True)
class RelationPrior:
    triples: dict[Triple, int] = field(default_factory=dict)


def mine_relation_priors(store: TtpStore) -> RelationPrior:
    """Count (subject class, verb, object class) triples across the
    store's expert-authored functions."""
    counts: dict[Triple, int] = {}
    for record in store.records:
        if record.source != "SME":
            continue
        classes: dict[str, str] = {}
        for stmt in record.ast.children:
            if stmt.kind is NodeKind.OBJECT_INSTANTIATION:
                classes[stmt.attrs["var"]] = stmt.attrs["class_name"]
            elif stmt.kind is NodeKind.RELATION_STMT:
                subj = classes.get(stmt.children[0].attrs["name"])
                obj = classes.get(stmt.children[1].attrs["name"])
                if subj and obj:
                    triple = (subj, stmt.attrs["verb"], obj)
                    counts[triple] = counts.get(triple, 0) + 1
    return RelationPrior(counts)


def object_name(class_name: str) -> str:
    return class_name.lower().replace("_", "") + "1"


def generate_dsl(
    technique_id: str,
    description_text: str,
    model: DataModel,
    ioc_db: IocDb,
    priors: RelationPrior,
    n: int = DEFAULT_TOP_N,
    pretagged: bool = False,
) -> tuple[AstNode, list[ClassScore]]:
    """Build a TTP function for the technique; returns the function AST
    together with the full score table for auditability.

    Raises :class:`NoClassesSelected` when nothing in the description
    matches the data model.
    """
    phrases = extract_noun_phrases(description_text, pretagged=pretagged)
    scores = score_classes(model, phrases)
    selected = select_classes(scores, n)
    if not selected:
        raise NoClassesSelected(f"no data-model class matches the {technique_id} description")

    body: list[AstNode] = []
    objects: dict[str, str] = {}  # class -> object name
    for class_name in selected:
        var = object_name(class_name)
        objects[class_name] = var
        body.append(instantiation(var, class_name))

    for class_name in selected:
        var = objects[class_name]
        for variable in model.variables_by_class[class_name]:
            ioc_type = ioc_type_for_variable(variable)
            if ioc_type is None:
                continue
            matching = sorted(
                (r for r in ioc_db.by_type(ioc_type) if r.technique_id == technique_id),
                key=lambda r: r.value,
            )
            if len(matching) == 1:
                body.append(attribute_assign(var, variable, literal(matching[0].value)))
            elif len(matching) > 1:
                body.append(
                    attribute_assign(
                        var, variable, bind(ioc_type, technique=technique_id)
                    )
                )

    for subj_cls, verb, obj_cls in sorted(priors.triples):
        if subj_cls in objects and obj_cls in objects:
            body.append(relation(objects[subj_cls], verb, objects[obj_cls]))

    fn = function_def(step_identifier(technique_id), tuple(body))
    problems = validate(fn, model)
    if problems:
        raise AssertionError(f"generated DSL failed validation: {problems}")
    return fn, scores


def scores_to_json(scores: list[ClassScore]) -> list[dict]:
    ordered = sorted(scores, key=lambda s: (-s.inclusion_value, s.class_name))
    return [
        {
            "class_name": s.class_name,
            "inclusion_value": s.inclusion_value,
            "per_variable": s.per_variable,
        }
        for s in ordered
    ]
