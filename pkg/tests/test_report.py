import json

import jsonschema
import pytest

from wilee.hunt import MatchResult, render_report

REPORT_SCHEMA = {
    "type": "object",
    "required": ["title", "partial", "threats"],
    "additionalProperties": False,
    "properties": {
        "title": {"type": "string"},
        "partial": {"type": "boolean"},
        "threats": {
            "type": "array",
            "items": {
                "type": "object",
                "required": [
                    "impl_id",
                    "description",
                    "techniques",
                    "confirmed",
                    "score",
                    "step_scores",
                    "witness",
                    "step_witness",
                    "host",
                ],
                "additionalProperties": False,
                "properties": {
                    "impl_id": {"type": "string"},
                    "description": {"type": "string"},
                    "techniques": {"type": "array", "items": {"type": "string"}},
                    "confirmed": {"type": "boolean"},
                    "score": {"type": "number", "minimum": 0, "maximum": 1},
                    "step_scores": {"type": "array", "items": {"type": "number"}},
                    "witness": {"type": "array", "items": {"type": "string"}},
                    "step_witness": {
                        "type": "array",
                        "items": {"type": "array", "items": {"type": "string"}},
                    },
                    "host": {"type": ["string", "null"]},
                },
            },
        },
    },
}


def result(impl_id="aaa", confirmed=True, score=1.0, techniques=("T1552.002",), host="ws-1"):
    steps = len(techniques)
    return MatchResult(
        impl_id=impl_id,
        description_name="putty_hunt",
        techniques=tuple(techniques),
        confirmed=confirmed,
        score=score,
        step_scores=tuple(1.0 if confirmed else 0.0 for _ in range(steps)),
        witness=("e00000",) if confirmed else (),
        step_witness=tuple(("e00000",) if confirmed else () for _ in range(steps)),
        host=host if confirmed else None,
    )


def test_empty_results_json():
    doc = json.loads(render_report([], "json"))
    assert doc["threats"] == []


def test_json_schema_validates():
    report = render_report(
        [result(), result("bbb", confirmed=False, score=0.25)], "json", title="demo"
    )
    jsonschema.validate(json.loads(report), REPORT_SCHEMA)


def test_markdown_mentions_technique_and_verdict():
    text = render_report([result()], "markdown")
    assert "T1552.002" in text
    assert "CONFIRMED" in text
    assert "| step | technique | score | witnesses |" in text


def test_markdown_refuted_label():
    text = render_report([result(confirmed=False, score=0.0)], "markdown")
    assert "REFUTED" in text
    assert "CONFIRMED" not in text.replace("0 CONFIRMED", "")


def test_ordering_score_desc_then_impl_id():
    results = [
        result("zzz", confirmed=False, score=0.5),
        result("mmm", confirmed=True, score=1.0),
        result("aaa", confirmed=False, score=0.5),
    ]
    doc = json.loads(render_report(results, "json"))
    assert [t["impl_id"] for t in doc["threats"]] == ["mmm", "aaa", "zzz"]


def test_injective_on_distinct_result_lists():
    variants = [
        [],
        [result()],
        [result(score=0.75, confirmed=False)],
        [result(techniques=("T1552.002", "T1059.001"))],
        [result(), result("bbb", confirmed=False, score=0.0)],
        [result(host="ws-2")],
    ]
    rendered = {render_report(v, "json") for v in variants}
    assert len(rendered) == len(variants)


def test_deterministic_output():
    results = [result(), result("bbb", confirmed=False, score=0.3)]
    assert render_report(results, "json") == render_report(results, "json")
    assert render_report(results, "markdown") == render_report(results, "markdown")


def test_unknown_format_rejected():
    with pytest.raises(ValueError):
        render_report([], "xml")


def test_partial_flag_surfaces():
    doc = json.loads(render_report([], "json", partial=True))
    assert doc["partial"] is True
    text = render_report([], "markdown", partial=True)
    assert "PARTIAL" in text
