"""`genius` command line: ingest, index, query, eval, demo, serve.

Exit codes are a stable CI contract: 0 success, 2 data/adapter failure,
64 usage error. Every command is idempotent given identical inputs and the
hash embedder (byte-identical outputs).
"""

from __future__ import annotations

import argparse
import glob
import json
import sys
from pathlib import Path

from . import store as store_mod
from .adapters import HttpEmbedder, HttpTextCombiner, HttpVisionDescriber
from .config import Settings
from .demo import generate_demo
from .describe import StubVisionDescriber, TemplateCombiner, parse_rules
from .embed import DEFAULT_DIM, HashingEmbedder
from .errors import GeniusError
from .evaluate import (
    DistanceProfile,
    arlg,
    profile_from_result,
    retrieval_metrics,
    model_comparison_with_outliers,
    write_curves_csv,
    z_score_validate,
    DEFAULT_Z_THRESHOLD,
)
from .ingest import load_log, segment
from .pipeline import build_collection, read_scenario_dir, write_scenarios
from .retrieve import search
from .service import ServiceState, create_app

EXIT_OK = 0
EXIT_DATA = 2
EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="genius", description=__doc__)
    parser.add_argument(
        "--config", default=None, help="flat key=value config file (default ./genius.toml)"
    )
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    p = sub.add_parser("ingest", help="segment signal logs into scenario files")
    p.add_argument("--manifest", required=True, help="glob of manifest JSON files")
    p.add_argument("--window", type=_positive_float, default=None)
    p.add_argument("--out", required=True, help="directory for scenario JSON files")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="describe, embed, and store scenarios")
    p.add_argument("--scenarios", required=True, help="directory of scenario files")
    p.add_argument("--rules", default=None, help="signal rule set (JSON array)")
    p.add_argument("--store", required=True, help="output store file")
    _add_adapter_flags(p)
    p.add_argument("--workers", type=_positive_int, default=None)
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("query", help="search a store with natural language")
    p.add_argument("--store", required=True)
    p.add_argument("--text", required=True)
    p.add_argument("--n", type=_positive_int, default=10)
    p.add_argument("--format", choices=("json", "table"), default="json")
    _add_embedder_flags(p)
    p.set_defaults(func=cmd_query)

    p_eval = sub.add_parser("eval", help="retrieval-quality evaluation")
    eval_sub = p_eval.add_subparsers(dest="eval_command", parser_class=_Parser)
    eval_sub.required = True

    p = eval_sub.add_parser("retrieval", help="per-query distance metrics")
    p.add_argument("--store", required=True)
    p.add_argument("--queries", required=True, help="JSON array of query strings")
    p.add_argument("--truth", default=None, help="JSON array of {query, correct_ids}")
    p.add_argument("--out", required=True, help="report JSON output path")
    p.add_argument("--curves", default=None, help="optional distance-curves CSV path")
    p.add_argument("--z-threshold", type=float, default=DEFAULT_Z_THRESHOLD)
    _add_embedder_flags(p)
    p.set_defaults(func=cmd_eval_retrieval)

    p = eval_sub.add_parser("models", help="model-comparison metrics")
    p.add_argument("--runs", required=True, help="JSON of per-category iterations")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval_models)

    p = sub.add_parser("demo", help="generate the synthetic demo corpus")
    p.add_argument("--out", required=True)
    p.add_argument("--categories", type=_positive_int, default=8)
    p.add_argument("--iterations", type=_positive_int, default=10)
    p.set_defaults(func=cmd_demo)

    p = sub.add_parser("serve", help="serve the query API (and optional UI)")
    p.add_argument("--store", required=True)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=_positive_int, default=None)
    p.add_argument("--cors-origin", default=None, help="comma-separated allow-list")
    p.add_argument("--ui", default=None, help="static UI directory to mount at /")
    _add_embedder_flags(p)
    p.set_defaults(func=cmd_serve)

    return parser


def _add_embedder_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--embedder", choices=("hash", "http"), default=None)
    p.add_argument("--embedder-endpoint", default=None)
    p.add_argument("--dim", type=_positive_int, default=None)


def _add_adapter_flags(p: argparse.ArgumentParser) -> None:
    _add_embedder_flags(p)
    p.add_argument("--combiner", choices=("template", "http"), default=None)
    p.add_argument("--combiner-endpoint", default=None)
    p.add_argument("--vision", choices=("none", "stub", "http"), default=None)
    p.add_argument("--vision-endpoint", default=None)
    p.add_argument(
        "--vision-stub", default=None, help="JSON map of scenario_id -> canned text"
    )


def _settings(args: argparse.Namespace) -> Settings:
    return Settings(getattr(args, "config", None))


def _build_embedder(settings: Settings, args: argparse.Namespace, dim: int | None = None):
    choice = settings.get("embedder", args.embedder, default="hash")
    if choice == "hash":
        return HashingEmbedder(
            settings.get("dim", args.dim, default=dim or DEFAULT_DIM, cast=int)
        )
    endpoint = settings.get("embedder-endpoint", args.embedder_endpoint)
    if not endpoint:
        raise GeniusError("--embedder http requires --embedder-endpoint")
    return HttpEmbedder(endpoint, dim=dim)


def _embedder_for_collection(
    collection: store_mod.Collection, settings: Settings, args: argparse.Namespace
):
    """Pick an embedder matching the store binding unless flags override."""
    choice = settings.get("embedder", args.embedder)
    endpoint = settings.get("embedder-endpoint", args.embedder_endpoint)
    if choice is None and endpoint is None:
        if collection.embedder_id.startswith("hash"):
            return HashingEmbedder(collection.dim)
        if collection.embedder_id.startswith("http:"):
            return HttpEmbedder(
                collection.embedder_id.removeprefix("http:"), dim=collection.dim
            )
    if choice in (None, "hash") and endpoint is None:
        return HashingEmbedder(
            settings.get("dim", args.dim, default=collection.dim, cast=int)
        )
    if not endpoint:
        raise GeniusError("--embedder http requires --embedder-endpoint")
    return HttpEmbedder(endpoint, dim=collection.dim)


def cmd_ingest(args: argparse.Namespace) -> int:
    settings = _settings(args)
    window = settings.get("window", args.window, default=30.0, cast=float)
    manifest_paths = sorted(glob.glob(args.manifest))
    if not manifest_paths:
        raise GeniusError(f"no manifest matches {args.manifest!r}")
    out_dir = Path(settings.get("out", args.out))
    total = 0
    for manifest_path in manifest_paths:
        log = load_log(manifest_path)
        scenarios = segment(log, window)
        write_scenarios(scenarios, Path(manifest_path), out_dir)
        total += len(scenarios)
    print(f"{total} scenarios from {len(manifest_paths)} logs")
    return EXIT_OK


def cmd_index(args: argparse.Namespace) -> int:
    settings = _settings(args)
    rules_path = settings.get("rules", args.rules)
    if not rules_path:
        raise GeniusError("a rule set is required (--rules)")
    rules = parse_rules(rules_path)
    entries = read_scenario_dir(Path(args.scenarios))
    embedder = _build_embedder(settings, args)

    combiner_choice = settings.get("combiner", args.combiner, default="template")
    if combiner_choice == "template":
        combiner = TemplateCombiner()
    else:
        endpoint = settings.get("combiner-endpoint", args.combiner_endpoint)
        if not endpoint:
            raise GeniusError("--combiner http requires --combiner-endpoint")
        combiner = HttpTextCombiner(endpoint)

    vision_choice = settings.get("vision", args.vision, default="none")
    vision = None
    if vision_choice == "stub":
        stub_path = settings.get("vision-stub", args.vision_stub)
        if not stub_path:
            raise GeniusError("--vision stub requires --vision-stub")
        try:
            canned = json.loads(Path(stub_path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise GeniusError(f"cannot read vision stub {stub_path}: {exc}") from exc
        vision = StubVisionDescriber(canned)
    elif vision_choice == "http":
        endpoint = settings.get("vision-endpoint", args.vision_endpoint)
        if not endpoint:
            raise GeniusError("--vision http requires --vision-endpoint")
        vision = HttpVisionDescriber(endpoint)

    workers = settings.get("workers", args.workers, default=1, cast=int)
    if workers < 1:
        raise GeniusError(f"workers must be >= 1, got {workers}")
    store_path = Path(settings.get("store", args.store))
    warnings: list[str] = []
    collection = build_collection(
        entries,
        rules,
        embedder,
        name=store_path.stem,
        vision=vision,
        combiner=combiner,
        workers=workers,
        warnings=warnings,
    )
    for line in dict.fromkeys(warnings):
        print(f"warning: {line}", file=sys.stderr)
    store_mod.save(collection, store_path)
    print(f"indexed {len(collection)} scenarios into {store_path}")
    return EXIT_OK


def _format_table(result) -> str:
    lines = [f"{'rank':>4}  {'id':<24} {'distance':>10}  description"]
    for rank, hit in enumerate(result.results, start=1):
        description = hit.description
        if len(description) > 60:
            description = description[:57] + "..."
        lines.append(f"{rank:>4}  {hit.id:<24} {hit.distance:>10.4f}  {description}")
    return "\n".join(lines)


def cmd_query(args: argparse.Namespace) -> int:
    settings = _settings(args)
    collection = store_mod.load(args.store)
    embedder = _embedder_for_collection(collection, settings, args)
    result = search(collection, args.text, embedder, n=args.n)
    if args.format == "table":
        print(_format_table(result))
    else:
        print(json.dumps(result.to_dict(), indent=2))
    return EXIT_OK


def _load_truth(path: str, collection: store_mod.Collection) -> dict[str, set[str]]:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GeniusError(f"cannot read truth file {path}: {exc}") from exc
    if not isinstance(raw, list):
        raise GeniusError(f"{path}: truth must be a JSON array")
    truth: dict[str, set[str]] = {}
    for entry in raw:
        if not isinstance(entry, dict) or "query" not in entry or "correct_ids" not in entry:
            raise GeniusError(f"{path}: entries must be {{query, correct_ids}}")
        ids = set(entry["correct_ids"])
        unknown = [i for i in ids if collection.get(i) is None]
        if unknown:
            raise GeniusError(
                f"{path}: query {entry['query']!r} lists unknown scenario ids "
                f"{sorted(unknown)}"
            )
        truth[entry["query"]] = ids
    return truth


def cmd_eval_retrieval(args: argparse.Namespace) -> int:
    settings = _settings(args)
    collection = store_mod.load(args.store)
    embedder = _embedder_for_collection(collection, settings, args)
    try:
        queries = json.loads(Path(args.queries).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GeniusError(f"cannot read queries file {args.queries}: {exc}") from exc
    if not isinstance(queries, list) or not all(isinstance(q, str) for q in queries):
        raise GeniusError(f"{args.queries}: queries must be a JSON array of strings")
    if not queries:
        raise GeniusError(f"{args.queries}: queries file is empty")
    truth = _load_truth(args.truth, collection) if args.truth else None

    profiles: list[DistanceProfile] = []
    rows = []
    for query in queries:
        try:
            result = search(collection, query, embedder, n=len(collection))
        except GeniusError as exc:
            raise GeniusError(f"query {query!r}: {exc}") from exc
        correct_ids = truth.get(query) if truth is not None else None
        profile = profile_from_result(result, correct_ids)
        profiles.append(profile)
        report = retrieval_metrics(profile)
        row: dict = {"query": query, "report": report.to_dict()}
        try:
            row["z_score_has_answer"] = z_score_validate(profile, args.z_threshold)
        except GeniusError as exc:
            row["z_score_has_answer"] = None
            row["z_score_note"] = str(exc)
        except ValueError as exc:
            row["z_score_has_answer"] = None
            row["z_score_note"] = str(exc)
        rows.append(row)

    output: dict = {"queries": rows, "arlg": arlg(profiles)}
    if truth is not None:
        with_answers = [p for p in profiles if truth.get(p.query)]
        without_answers = [p for p in profiles if p.query in truth and not truth[p.query]]
        if with_answers:
            output["arlg_correct_set"] = arlg(with_answers)
        if without_answers:
            output["arlg_incorrect_set"] = arlg(without_answers)

    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(output, indent=2) + "\n", encoding="utf-8")
    if args.curves:
        curves_path = Path(args.curves)
        curves_path.parent.mkdir(parents=True, exist_ok=True)
        with curves_path.open("w", encoding="utf-8", newline="") as fh:
            write_curves_csv(profiles, fh)
    print(f"evaluated {len(queries)} queries -> {out_path}")
    return EXIT_OK


def cmd_eval_models(args: argparse.Namespace) -> int:
    try:
        runs = json.loads(Path(args.runs).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise GeniusError(f"cannot read runs file {args.runs}: {exc}") from exc
    if not isinstance(runs, dict):
        raise GeniusError(f"{args.runs}: runs must map category -> iterations")
    reports = model_comparison_with_outliers(runs)
    output = {variant: report.to_dict() for variant, report in reports.items()}
    out_path = Path(args.out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    out_path.write_text(json.dumps(output, indent=2) + "\n", encoding="utf-8")
    print(f"compared {len(runs)} categories -> {out_path}")
    return EXIT_OK


def cmd_demo(args: argparse.Namespace) -> int:
    layout = generate_demo(args.out, categories=args.categories, iterations=args.iterations)
    print(f"demo corpus in {layout.root}")
    print(f"  manifests: {layout.manifest_glob}")
    print(f"  rules:     {layout.rules_path}")
    print(f"  queries:   {layout.queries_path}")
    print(f"  truth:     {layout.truth_path}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    settings = _settings(args)
    collection = store_mod.load(args.store)  # fail fast on a bad store
    embedder = _embedder_for_collection(collection, settings, args)
    state = ServiceState(args.store, embedder)
    origins = settings.get("cors-origin", args.cors_origin)
    cors = [o.strip() for o in origins.split(",")] if origins else None
    app = create_app(state, cors_origins=cors, ui_dir=args.ui)
    port = settings.get("port", args.port, default=8080, cast=int)
    uvicorn.run(app, host=args.host, port=port)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except GeniusError as exc:
        print(f"genius: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    raise SystemExit(main(sys.argv[1:]))
