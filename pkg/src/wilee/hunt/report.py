"""Render match results as Markdown or JSON.

Ordering is deterministic: score descending, then impl_id ascending.
The JSON document is schema-stable so downstream sinks can rely on it.
"""

from __future__ import annotations

import json
from typing import Optional

from .matcher import MatchResult

REPORT_FORMATS = ("markdown", "json")


def _ordered(results: list[MatchResult]) -> list[MatchResult]:
    return sorted(results, key=lambda r: (-r.score, r.impl_id))


def result_to_json(result: MatchResult) -> dict:
    return {
        "impl_id": result.impl_id,
        "description": result.description_name,
        "techniques": list(result.techniques),
        "confirmed": result.confirmed,
        "score": result.score,
        "step_scores": list(result.step_scores),
        "witness": list(result.witness),
        "step_witness": [list(w) for w in result.step_witness],
        "host": result.host,
    }


def render_report(
    results: list[MatchResult],
    fmt: str = "json",
    title: Optional[str] = None,
    partial: bool = False,
) -> str:
    if fmt not in REPORT_FORMATS:
        raise ValueError(f"unknown report format {fmt!r} (expected one of {REPORT_FORMATS})")
    ordered = _ordered(results)
    if fmt == "json":
        doc = {
            "title": title or "threat hunt",
            "partial": partial,
            "threats": [result_to_json(r) for r in ordered],
        }
        return json.dumps(doc, indent=2) + "\n"
    return _render_markdown(ordered, title or "threat hunt", partial)


def _render_markdown(results: list[MatchResult], title: str, partial: bool) -> str:
    lines = [f"# Threat hunt report: {title}", ""]
    if partial:
        lines += ["**PARTIAL RESULTS** (run interrupted before completion)", ""]
    confirmed = sum(1 for r in results if r.confirmed)
    lines += [f"{len(results)} implementation(s) evaluated, {confirmed} CONFIRMED.", ""]
    for r in results:
        verdict = "CONFIRMED" if r.confirmed else "REFUTED"
        lines.append(f"## {r.description_name} ({r.impl_id}): {verdict}")
        lines.append("")
        host = f" on host `{r.host}`" if r.host else ""
        lines.append(f"Score {r.score:.3f}{host}.")
        lines.append("")
        lines.append("| step | technique | score | witnesses |")
        lines.append("|------|-----------|-------|-----------|")
        for i, technique in enumerate(r.techniques):
            step_score = r.step_scores[i] if i < len(r.step_scores) else 0.0
            witnesses = ", ".join(r.step_witness[i]) if i < len(r.step_witness) else ""
            lines.append(f"| {i} | {technique} | {step_score:.3f} | {witnesses} |")
        lines.append("")
    return "\n".join(lines)
