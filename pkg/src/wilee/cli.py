"""Command-line entry point orchestrating the pipeline.

Subcommands: ``validate`` (parse + check DSL files), ``hunt`` (describe
-> concretize -> query -> match -> report), ``malmo`` (draft DSL from a
technique description), ``perturb`` (evolve variants of an
implementation).  Every run is deterministic given identical inputs and
seeds; output directories carry a ``manifest.json`` with content hashes
for audit.

Exit codes: 0 success, 1 diagnostics, 2 I/O failure, 3 combination cap
exceeded, 4 no classes selected, 5 bad perturbation config.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional

from . import __version__
from .dsl import (
    DescriptionError,
    DslSyntaxError,
    ThreatDescription,
    normalize_step,
    parse,
    pretty_print_node,
    validate,
)
from .gpe import ConfigError, GpeConfig, export_archive, run_gpe
from .hunt import (
    NdjsonProxy,
    ProxyUnavailable,
    build_graph,
    execute_all,
    match,
    render_report,
    schedule,
)
from .interpreter import (
    BindMode,
    EmptyStore,
    concretize,
    default_killchain,
    expand_binds,
    implementation_from_module,
)
from .malmo import (
    NoClassesSelected,
    generate_dsl,
    mine_relation_priors,
    scores_to_json,
)
from .stores import (
    DataModel,
    FormatError,
    StorePaths,
    ValidationError,
    load_stores,
)

logger = logging.getLogger("wilee")

EXIT_OK = 0
EXIT_DIAGNOSTICS = 1
EXIT_IO = 2
EXIT_CAP = 3
EXIT_NO_CLASSES = 4
EXIT_CONFIG = 5

_LOG_LEVELS = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}


def _setup_logging() -> None:
    level = os.environ.get("WILEE_LOG_LEVEL", "error").lower()
    logging.basicConfig(
        level=_LOG_LEVELS.get(level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _write_manifest(out: Path, command: str, args: dict, inputs: list[Path], outputs: list[Path], partial: bool = False) -> None:
    manifest = {
        "command": command,
        "args": {
            k: str(v) if isinstance(v, Path) else v
            for k, v in args.items()
            if not callable(v)
        },
        "partial": partial,
        "inputs": {
            str(p): _sha256(Path(p).read_bytes()) for p in inputs if p and Path(p).is_file()
        },
        "outputs": {p.name: _sha256(p.read_bytes()) for p in outputs},
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", "utf-8")


def _store_paths(args) -> StorePaths:
    return StorePaths(
        ttp_index=getattr(args, "ttp_store", None),
        ioc_db=getattr(args, "ioc_db", None),
        data_model=getattr(args, "data_model", None),
    )


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    model = DataModel.load(args.data_model) if args.data_model else DataModel.default()
    problems = 0
    for file in args.files:
        try:
            source = Path(file).read_text("utf-8")
        except OSError as exc:
            print(f"{file}: {exc}", file=sys.stderr)
            return EXIT_IO
        try:
            tree = parse(source)
        except DslSyntaxError as exc:
            print(f"{file}:{exc}", file=sys.stderr)
            problems += 1
            continue
        for diag in validate(tree, model):
            print(f"{file}: {diag}", file=sys.stderr)
            problems += 1
    return EXIT_DIAGNOSTICS if problems else EXIT_OK


# ---------------------------------------------------------------------------
# hunt
# ---------------------------------------------------------------------------


def cmd_hunt(args) -> int:
    try:
        store, ioc_db, model = load_stores(_store_paths(args))
    except FormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    desc = None
    if args.desc:
        try:
            desc = ThreatDescription.from_module(parse(Path(args.desc).read_text("utf-8")))
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO
        except (DslSyntaxError, DescriptionError) as exc:
            print(f"error: {args.desc}: {exc}", file=sys.stderr)
            return EXIT_DIAGNOSTICS
    if desc is None or not desc.steps:
        # No description (or an empty one): hunt the full kill-chain.
        try:
            desc = default_killchain(store)
        except EmptyStore as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_DIAGNOSTICS

    result = concretize(desc, store)
    for diag in result.diagnostics:
        print(f"concretize: {diag}", file=sys.stderr)
    if any(d.code == "cap-exceeded" for d in result.diagnostics):
        return EXIT_CAP

    try:
        proxy = NdjsonProxy(args.events)
    except ProxyUnavailable as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    results = []
    partial = False
    try:
        for impl in result.implementations:
            (expanded,) = expand_binds(impl, ioc_db, BindMode.UNRESOLVED)
            descriptors = schedule(expanded, model)
            query_results = execute_all(descriptors, proxy, ioc_db)
            graph = build_graph(query_results, descriptors)
            results.append(match(graph, expanded))
    except KeyboardInterrupt:
        partial = True

    fmt = "markdown" if args.format == "md" else "json"
    report = render_report(results, fmt, title=desc.name, partial=partial)
    report_path = out / ("report.md" if fmt == "markdown" else "report.json")
    report_path.write_text(report, "utf-8")
    inputs = [args.ttp_store, args.ioc_db, args.data_model, args.events, args.desc]
    _write_manifest(
        out,
        "hunt",
        vars(args),
        [Path(p) for p in inputs if p],
        [report_path],
        partial=partial,
    )
    confirmed = sum(1 for r in results if r.confirmed)
    print(f"{len(results)} implementation(s) evaluated, {confirmed} confirmed; report at {report_path}")
    return 130 if partial else EXIT_OK


# ---------------------------------------------------------------------------
# malmo
# ---------------------------------------------------------------------------


def _read_technique(path: Path) -> tuple[str, str, bool]:
    """Returns (technique_id, description, pretagged)."""
    text = path.read_text("utf-8")
    if path.suffix == ".json" or text.lstrip().startswith("{"):
        doc = json.loads(text)
        return doc["id"], doc["description"], bool(doc.get("pretagged", False))
    technique = normalize_step(path.stem)
    return technique, text, _looks_pretagged(text)


def _looks_pretagged(text: str) -> bool:
    tokens = text.split()
    return bool(tokens) and all("/" in t and t.rsplit("/", 1)[1].isupper() for t in tokens)


def cmd_malmo(args) -> int:
    try:
        store, ioc_db, model = load_stores(_store_paths(args))
        technique_id, description, pretagged = _read_technique(Path(args.technique))
    except (FormatError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS

    priors = mine_relation_priors(store)
    try:
        fn, scores = generate_dsl(
            technique_id, description, model, ioc_db, priors, n=args.top_n, pretagged=pretagged
        )
    except NoClassesSelected as exc:
        print(
            f"error: {exc}\nNothing in the description matched any data-model class; "
            "check the description text or extend the data model.",
            file=sys.stderr,
        )
        return EXIT_NO_CLASSES

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    dsl_path = out / f"{fn.attrs['name']}.wdsl"
    dsl_path.write_text(pretty_print_node(fn), "utf-8")
    scores_path = out / "scores.json"
    scores_path.write_text(json.dumps(scores_to_json(scores), indent=2) + "\n", "utf-8")
    inputs = [args.ttp_store, args.ioc_db, args.data_model, args.technique]
    _write_manifest(out, "malmo", vars(args), [Path(p) for p in inputs if p], [dsl_path, scores_path])
    print(f"wrote {dsl_path} and {scores_path}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# perturb
# ---------------------------------------------------------------------------


def cmd_perturb(args) -> int:
    try:
        config = GpeConfig.from_json(args.config) if args.config else GpeConfig()
        if args.seed is not None:
            config = GpeConfig(**{**_config_dict(config), "seed": args.seed})
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG if isinstance(exc, ConfigError) else EXIT_IO

    try:
        store, ioc_db, model = load_stores(_store_paths(args))
        source = Path(args.impl).read_text("utf-8")
    except (FormatError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS

    try:
        tree = parse(source)
    except DslSyntaxError as exc:
        print(f"error: {args.impl}:{exc}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    diagnostics = validate(tree, model)
    if diagnostics:
        for diag in diagnostics:
            print(f"{args.impl}: {diag}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    seed_impl = implementation_from_module(tree)

    fitness_fn = None
    if args.events:
        try:
            proxy = NdjsonProxy(args.events)
        except ProxyUnavailable as exc:
            print(f"error: {exc}", file=sys.stderr)
            return EXIT_IO

        def fitness_fn(candidate_tree):
            impl = implementation_from_module(candidate_tree)
            descriptors = schedule(impl, model)
            graph = build_graph(execute_all(descriptors, proxy, ioc_db), descriptors)
            return match(graph, impl).score

    try:
        result = run_gpe(seed_impl, config, fitness_fn=fitness_fn, model=model, ioc_db=ioc_db)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG

    out = Path(args.out)
    archive_dir = out / "archive"
    written = export_archive(result, archive_dir)
    summary_path = out / "run.json"
    summary_path.write_text(
        json.dumps(
            {
                "archived": len(result.archive),
                "generations": config.generations,
                "population_size": config.population_size,
                "seed": config.seed,
                "best_fitness_history": result.history,
                "rho_trace": result.rho_trace,
            },
            indent=2,
        )
        + "\n",
        "utf-8",
    )
    inputs = [args.ttp_store, args.ioc_db, args.data_model, args.impl, args.config, args.events]
    _write_manifest(out, "perturb", vars(args), [Path(p) for p in inputs if p], written + [summary_path])
    print(f"archived {len(result.archive)} candidate(s) under {archive_dir}")
    return EXIT_OK


def _config_dict(config: GpeConfig) -> dict:
    return {name: getattr(config, name) for name in GpeConfig.__dataclass_fields__}


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _add_store_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--ttp-store", type=Path, help="TTP store index (.jsonl) or its directory")
    sub.add_argument("--ioc-db", type=Path, help="IOC database (.jsonl)")
    sub.add_argument("--data-model", type=Path, help="data model JSON (default: shipped snapshot)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wilee", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"wilee {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)

    p_validate = subs.add_parser("validate", help="parse and validate DSL files")
    p_validate.add_argument("files", nargs="+", type=Path)
    p_validate.add_argument("--data-model", type=Path)
    p_validate.set_defaults(func=cmd_validate)

    p_hunt = subs.add_parser("hunt", help="run the hunt pipeline over an event log")
    _add_store_flags(p_hunt)
    p_hunt.add_argument("--events", type=Path, required=True, help="event log (.ndjson)")
    p_hunt.add_argument("--desc", type=Path, help="threat description .wdsl (default: full kill-chain)")
    p_hunt.add_argument("--out", type=Path, required=True)
    p_hunt.add_argument("--format", choices=("md", "json"), default="json")
    p_hunt.set_defaults(func=cmd_hunt)

    p_malmo = subs.add_parser("malmo", help="generate DSL from a technique description")
    _add_store_flags(p_malmo)
    p_malmo.add_argument("technique", type=Path, help="technique JSON ({id, name, description}) or plain text")
    p_malmo.add_argument("--top-n", type=int, default=5)
    p_malmo.add_argument("--out", type=Path, required=True)
    p_malmo.set_defaults(func=cmd_malmo)

    p_perturb = subs.add_parser("perturb", help="evolve variants of an implementation")
    _add_store_flags(p_perturb)
    p_perturb.add_argument("impl", type=Path, help="implementation .wdsl to perturb")
    p_perturb.add_argument("--config", type=Path, help="GPE config JSON")
    p_perturb.add_argument("--seed", type=int, help="override the config RNG seed")
    p_perturb.add_argument("--events", type=Path, help="event log for fitness scoring (optional)")
    p_perturb.add_argument("--out", type=Path, required=True)
    p_perturb.set_defaults(func=cmd_perturb)
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    _setup_logging()
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
