"""Command-line pipeline: query generation, probing, aggregation,
bootstrapping, corpus building, analysis, and evaluation.

Stages communicate through line-delimited record files so any pipeline can
be run fused (`pipeline`) or as separate commands with identical results.
Every command writes a manifest into its output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path
from typing import Optional

from . import aggregate as agg
from . import analytics, basilisk, corpus, evalmetrics, gateway, postprocess, templates
from .components import Component, ComponentDataset, head_of, load_component_dataset, parse_component
from .errors import BackendError, DataError, MatprobeError, UsageError
from .io_utils import read_jsonl, write_json, write_jsonl
from .manifest import RunManifest
from .templates import TemplateConfig

BACKEND_URL_ENV = "MATPROBE_BACKEND_URL"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_BACKEND = 3


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        self.print_usage(sys.stderr)
        raise UsageError(message)


# -- shared helpers --

def _template_config(args) -> TemplateConfig:
    if getattr(args, "config", None):
        cfg = templates.load_template_config(args.config)
    else:
        cfg = TemplateConfig()
    if getattr(args, "capitalize", False):
        from dataclasses import replace

        cfg = replace(cfg, capitalize=True)
    return cfg


def _norm_config(args) -> postprocess.NormalizationConfig:
    return postprocess.NormalizationConfig.from_files(
        standard_stopwords=getattr(args, "stopwords", None),
        custom_stopwords=getattr(args, "custom_stopwords", None),
        variants=getattr(args, "variants", None),
    )


def _predictor(args):
    if args.backend == "mock":
        vocab = gateway.DEFAULT_MOCK_VOCABULARY
        if getattr(args, "mock_vocab", None):
            vocab = [
                w.strip()
                for w in Path(args.mock_vocab).read_text(encoding="utf-8").splitlines()
                if w.strip()
            ]
        return gateway.MockPredictor(seed=args.seed, vocabulary=vocab)
    url = getattr(args, "url", None) or os.environ.get(BACKEND_URL_ENV)
    if not url:
        raise UsageError(f"--url or ${BACKEND_URL_ENV} required for the http backend")
    predictor = gateway.HttpPredictor(url)
    info = predictor.info()
    if "mask_token" in info:
        predictor.mask_token = info["mask_token"]
    return predictor


def _query_records(cfg: TemplateConfig, dataset: ComponentDataset, control: bool = False) -> list[dict]:
    build = templates.build_control_set if control else (lambda c: templates.render_all(cfg, c))
    records = []
    for component in dataset.components:
        for query in build(component):
            records.append(
                {
                    "component": query.component_surface,
                    "template_id": query.template_id,
                    "text": query.text,
                }
            )
    return records


def _records_to_queries(records) -> list[templates.RenderedQuery]:
    return [
        templates.RenderedQuery(
            text=r["text"], component_surface=r["component"], template_id=r["template_id"]
        )
        for r in records
    ]


def _probe(predictor, query_records, k: int, parallelism: int) -> tuple[gateway.PredictionBatch, list[dict]]:
    batch = gateway.batch_predict(
        predictor, _records_to_queries(query_records), k=k, parallelism=parallelism
    )
    return batch, gateway.batch_to_records(batch)


def _component_index(prediction_records, components: Optional[ComponentDataset]) -> dict[str, Component]:
    """Recover Component objects for every surface in a predictions file."""
    index: dict[str, Component] = {}
    if components is not None:
        index.update({c.surface: c for c in components.components})
    for record in prediction_records:
        surface = record["component"]
        if surface not in index:
            index[surface] = parse_component(surface)
    return index


def _aggregate_records(
    prediction_records: list[dict],
    methods: list[agg.Method],
    k: int,
    norm_cfg: postprocess.NormalizationConfig,
    components: Optional[ComponentDataset] = None,
) -> list[dict]:
    index = _component_index(prediction_records, components)
    batch = gateway.PredictionBatch(k=0)
    for record in prediction_records:
        key = (record["component"], record["template_id"])
        if "error" in record:
            batch.errors[key] = record["error"]
            continue
        batch.results.setdefault(key, []).append(
            gateway.MaskPrediction(
                token=record["token"], probability=record["prob"], rank=record["rank"]
            )
        )
    for preds in batch.results.values():
        preds.sort(key=lambda p: p.rank)

    surfaces = sorted({surface for surface, _ in batch.results} | {s for s, _ in batch.errors})
    out: list[dict] = []
    for surface in surfaces:
        component = index[surface]
        normalized = postprocess.normalize_batch(batch, component, norm_cfg)
        scores = agg.collect(normalized)
        total_queries = len({key for key in batch.results if key[0] == surface})
        for method in methods:
            ranked = agg.top_k(
                agg.aggregate(scores, method, total_query_count=max(total_queries, 1)), k
            )
            out.extend(agg.ranking_records(surface, ranked, scores))
    return out


def _sort_predictions(records: list[dict]) -> list[dict]:
    """Canonical prediction file order, shared by probe and pipeline."""
    return sorted(
        records,
        key=lambda r: (r["component"], r["template_id"], "error" in r, r.get("rank", 0)),
    )


def _sort_materials(records: list[dict]) -> list[dict]:
    return sorted(records, key=lambda r: (r["component"], r["method"], r["rank"]))


def _parse_methods(raw: str) -> list[agg.Method]:
    if raw == "all":
        return [agg.Method.BEST_SCORE, agg.Method.AVG, agg.Method.AVG_ALL, agg.Method.PREVALENCE]
    try:
        return [agg.Method(name.strip()) for name in raw.split(",") if name.strip()]
    except ValueError as exc:
        raise UsageError(f"unknown aggregation method: {exc}")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


# -- commands --

def cmd_gen_queries(args) -> int:
    cfg = _template_config(args)
    dataset = load_component_dataset(args.components)
    records = _query_records(cfg, dataset, control=args.control)
    out = _out_dir(args)
    queries_path = out / ("control_queries.jsonl" if args.control else "queries.jsonl")
    write_jsonl(queries_path, records)
    manifest = RunManifest("gen-queries", {"template_config": templates.config_to_dict(cfg)})
    manifest.add_input(args.components)
    manifest.add_output(queries_path)
    manifest.stats = {"components": len(dataset), "queries": len(records)}
    manifest.write(out)
    print(f"wrote {len(records)} queries to {queries_path}")
    return EXIT_OK


def cmd_probe(args) -> int:
    if bool(args.queries) == bool(args.components):
        raise UsageError("pass exactly one of --queries or --components")
    cfg = _template_config(args)
    if args.queries:
        query_records = list(read_jsonl(args.queries))
        source = args.queries
    else:
        dataset = load_component_dataset(args.components)
        query_records = _query_records(cfg, dataset)
        source = args.components
    predictor = _predictor(args)
    batch, records = _probe(predictor, query_records, args.k, args.parallelism)
    out = _out_dir(args)
    predictions_path = out / "predictions.jsonl"
    write_jsonl(predictions_path, _sort_predictions(records))
    manifest = RunManifest(
        "probe", {"k": args.k, "parallelism": args.parallelism}, backend=predictor.identity()
    )
    manifest.add_input(source)
    manifest.add_output(predictions_path)
    manifest.stats = {
        "queries": len(query_records),
        "raw_predictions": batch.total_predictions(),
        "errors": len(batch.errors),
    }
    manifest.write(out)
    print(f"wrote {batch.total_predictions()} predictions to {predictions_path}")
    return EXIT_OK


def cmd_aggregate(args) -> int:
    methods = _parse_methods(args.method)
    norm_cfg = _norm_config(args)
    components = load_component_dataset(args.components) if args.components else None
    prediction_records = list(read_jsonl(args.predictions))
    records = _sort_materials(
        _aggregate_records(prediction_records, methods, args.top_k, norm_cfg, components)
    )
    out = _out_dir(args)
    materials_path = out / "materials.jsonl"
    write_jsonl(materials_path, records)
    manifest = RunManifest(
        "aggregate", {"methods": [m.value for m in methods], "top_k": args.top_k}
    )
    manifest.add_input(args.predictions)
    manifest.add_output(materials_path)
    manifest.stats = {"material_rows": len(records)}
    manifest.write(out)
    print(f"wrote {len(records)} material rows to {materials_path}")
    return EXIT_OK


def cmd_pipeline(args) -> int:
    cfg = _template_config(args)
    norm_cfg = _norm_config(args)
    methods = _parse_methods(args.method)
    dataset = load_component_dataset(args.components)
    predictor = _predictor(args)
    out = _out_dir(args)

    query_records: list[dict] = []
    prediction_records: list[dict] = []
    material_records: list[dict] = []
    raw_predictions = 0
    fallbacks = 0

    for component in dataset.components:
        component_queries = _query_records(cfg, ComponentDataset([component]))
        batch, records = _probe(predictor, component_queries, args.k, args.parallelism)
        probed = component

        if args.head_fallback:
            normalized = postprocess.normalize_batch(batch, component, norm_cfg)
            if len(agg.collect(normalized)) < args.min_predictions and len(component.constituents) > 1:
                fallbacks += 1
                probed = head_of(component)
                component_queries = _query_records(cfg, ComponentDataset([probed]))
                batch, records = _probe(predictor, component_queries, args.k, args.parallelism)

        query_records.extend(component_queries)
        prediction_records.extend(records)
        raw_predictions += batch.total_predictions()

        normalized = postprocess.normalize_batch(batch, probed, norm_cfg)
        scores = agg.collect(normalized)
        total_queries = len(batch.results)
        for method in methods:
            ranked = agg.top_k(
                agg.aggregate(scores, method, total_query_count=max(total_queries, 1)),
                args.top_k,
            )
            for record in agg.ranking_records(component.surface, ranked, scores):
                if probed is not component:
                    record["probed_surface"] = probed.surface
                material_records.append(record)

    paths = {
        "queries": out / "queries.jsonl",
        "predictions": out / "predictions.jsonl",
        "materials": out / "materials.jsonl",
    }
    write_jsonl(paths["queries"], query_records)
    write_jsonl(paths["predictions"], _sort_predictions(prediction_records))
    write_jsonl(paths["materials"], _sort_materials(material_records))

    manifest = RunManifest(
        "pipeline",
        {
            "template_config": templates.config_to_dict(cfg),
            "k": args.k,
            "parallelism": args.parallelism,
            "methods": [m.value for m in methods],
            "top_k": args.top_k,
            "head_fallback": args.head_fallback,
            "min_predictions": args.min_predictions,
        },
        backend=predictor.identity(),
    )
    manifest.add_input(args.components)
    for path in paths.values():
        manifest.add_output(path)
    manifest.stats = {
        "components": len(dataset),
        "queries": len(query_records),
        "raw_predictions": raw_predictions,
        "head_fallbacks": fallbacks,
    }
    manifest.write(out)
    print(
        f"pipeline done: {len(dataset)} components, {len(query_records)} queries, "
        f"{raw_predictions} raw predictions, {fallbacks} head fallbacks"
    )
    return EXIT_OK


def cmd_control_probe(args) -> int:
    cfg = _template_config(args)
    norm_cfg = _norm_config(args)
    dataset = load_component_dataset(args.components)
    predictor = _predictor(args)
    out = _out_dir(args)

    query_records = _query_records(cfg, dataset, control=True)
    batch, prediction_records = _probe(predictor, query_records, args.k, args.parallelism)
    material_records = _aggregate_records(
        prediction_records, [agg.Method.PREVALENCE], args.top_k, norm_cfg, dataset
    )

    write_jsonl(out / "control_queries.jsonl", query_records)
    write_jsonl(out / "control_predictions.jsonl", _sort_predictions(prediction_records))
    write_jsonl(out / "control_materials.jsonl", _sort_materials(material_records))
    manifest = RunManifest(
        "control-probe",
        {"k": args.k, "top_k": args.top_k},
        backend=predictor.identity(),
    )
    manifest.add_input(args.components)
    for name in ("control_queries.jsonl", "control_predictions.jsonl", "control_materials.jsonl"):
        manifest.add_output(out / name)
    manifest.stats = {
        "components": len(dataset),
        "queries": len(query_records),
        "raw_predictions": batch.total_predictions(),
    }
    manifest.write(out)
    print(f"control probe done: {len(query_records)} control queries")
    return EXIT_OK


def cmd_basilisk(args) -> int:
    sentences = basilisk.parse_conllu(args.conllu)
    occurrences = basilisk.extract_pattern_occurrences(sentences)
    seeds = tuple(
        w.strip()
        for w in Path(args.seeds).read_text(encoding="utf-8").splitlines()
        if w.strip()
    ) if args.seeds else basilisk.DEFAULT_SEEDS
    cfg = basilisk.BootstrapConfig(
        seeds=seeds,
        pattern_pool_base=args.pool_base,
        pattern_pool_growth_per_round=args.pool_growth,
        words_per_round=args.words_per_round,
        max_lexicon=args.max_lexicon,
        max_rounds=args.max_rounds,
    )
    lexicon = basilisk.bootstrap(occurrences, cfg)

    dataset = load_component_dataset(args.components)
    raw_sentences = [
        line for line in Path(args.sentences).read_text(encoding="utf-8").splitlines() if line.strip()
    ]
    material_words = set(seeds) | {entry.word for entry in lexicon}
    counts = basilisk.link_counts(raw_sentences, dataset, material_words)
    linked = basilisk.link_components(raw_sentences, dataset, material_words)

    out = _out_dir(args)
    lexicon_path = out / "lexicon.jsonl"
    links_path = out / "links.jsonl"
    materials_path = out / "basilisk_materials.jsonl"
    write_jsonl(
        lexicon_path,
        [
            {"word": e.word, "score": e.avg_log_score, "round": e.round_added}
            for e in lexicon
        ],
    )
    write_jsonl(
        links_path,
        [
            {
                "component": surface,
                "material": material,
                "sentence_count": counts[(surface, material)],
            }
            for surface, materials in sorted(linked.items())
            for material in materials
        ],
    )
    # evaluation view: up to --sample-k materials per component
    write_jsonl(
        materials_path,
        [
            {"component": surface, "rank": rank, "material": material, "method": "basilisk"}
            for surface, materials in sorted(linked.items())
            for rank, material in enumerate(
                basilisk.sample_materials(materials, k=args.sample_k, seed=args.sample_seed),
                start=1,
            )
        ],
    )
    manifest = RunManifest(
        "basilisk",
        {
            "seeds": list(seeds),
            "pool_base": cfg.pattern_pool_base,
            "pool_growth": cfg.pattern_pool_growth_per_round,
            "words_per_round": cfg.words_per_round,
            "max_lexicon": cfg.max_lexicon,
            "max_rounds": cfg.max_rounds,
        },
    )
    for path in (args.conllu, args.sentences, args.components):
        manifest.add_input(path)
    if args.seeds:
        manifest.add_input(args.seeds)
    manifest.add_output(lexicon_path)
    manifest.add_output(links_path)
    manifest.add_output(materials_path)
    manifest.stats = {
        "sentences": len(sentences),
        "patterns": len({key for key, _ in occurrences}),
        "lexicon_size": len(lexicon),
        "linked_components": len(linked),
    }
    manifest.write(out)
    print(f"bootstrapped {len(lexicon)} words; linked {len(linked)} components")
    return EXIT_OK


def cmd_filter_corpus(args) -> int:
    dataset = load_component_dataset(args.components)
    articles = corpus.load_articles(args.articles)
    filtered = corpus.build_filtered_corpus(articles, dataset)
    out = _out_dir(args)

    sentences_path = out / "sentences.txt"
    index_path = out / "mention_index.jsonl"
    train_path = out / "mlm_train.txt"
    valid_path = out / "mlm_valid.txt"

    from .io_utils import atomic_write_text

    atomic_write_text(sentences_path, "".join(text + "\n" for _, text in filtered.sentences))
    write_jsonl(
        index_path,
        [
            {"component": surface, "sentence_ids": ids}
            for surface, ids in sorted(filtered.mention_index.items())
        ],
    )
    n_train, n_valid = corpus.export_mlm_splits(
        filtered, train_path, valid_path, train_fraction=args.train_fraction, seed=args.seed
    )

    manifest = RunManifest(
        "filter-corpus", {"train_fraction": args.train_fraction, "seed": args.seed}
    )
    manifest.add_input(args.articles)
    manifest.add_input(args.components)
    for path in (sentences_path, index_path, train_path, valid_path):
        manifest.add_output(path)
    manifest.stats = {
        "articles_in": len(articles),
        "sentences_kept": len(filtered),
        "train": n_train,
        "valid": n_valid,
    }
    manifest.write(out)
    print(f"kept {len(filtered)} sentences; split {n_train}/{n_valid}")
    return EXIT_OK


def _load_run(run_dir: str | Path) -> tuple[dict, dict[str, list[str]], list[dict]]:
    """Load manifest, prevalence top-5 per component, and raw predictions."""
    run_dir = Path(run_dir)
    manifest = json.loads((run_dir / "manifest.json").read_text(encoding="utf-8"))
    final: dict[str, list[tuple[int, str]]] = {}
    for record in read_jsonl(run_dir / "materials.jsonl"):
        if record["method"] != agg.Method.PREVALENCE.value:
            continue
        final.setdefault(record["component"], []).append((record["rank"], record["material"]))
    top5 = {
        surface: [m for _, m in sorted(rows)] for surface, rows in final.items()
    }
    predictions = list(read_jsonl(run_dir / "predictions.jsonl"))
    return manifest, top5, predictions


def _normalized_by_component(
    prediction_records: list[dict], norm_cfg: postprocess.NormalizationConfig
) -> dict[str, list[postprocess.NormalizedPrediction]]:
    index = _component_index(prediction_records, None)
    per_component: dict[str, list[postprocess.NormalizedPrediction]] = {}
    for record in prediction_records:
        if "error" in record:
            continue
        component = index[record["component"]]
        material = postprocess.normalize(record["token"], component, norm_cfg)
        if material is not None:
            per_component.setdefault(record["component"], []).append(
                (record["template_id"], record["rank"], material, record["prob"])
            )
    return per_component


def cmd_analyze(args) -> int:
    norm_cfg = _norm_config(args)
    manifest_data, top5, prediction_records = _load_run(args.run_dir)
    template_cfg = templates.config_from_dict(
        manifest_data.get("config", {}).get("template_config", {})
    )
    template_set = templates.build_template_set(template_cfg)
    per_query = _normalized_by_component(prediction_records, norm_cfg)

    out = _out_dir(args)
    report = analytics.productiveness(top5, per_query, template_set)
    records = analytics.productiveness_records(report)
    write_jsonl(out / "productiveness.jsonl", records)
    csv_lines = ["partition,cell,activated,potential"] + [
        f"{r['partition']},{r['cell']},{r['activated']},{r['potential']}" for r in records
    ]
    from .io_utils import atomic_write_text

    atomic_write_text(out / "productiveness.csv", "\n".join(csv_lines) + "\n")

    results: dict = {
        "total_activated": report.total_activated,
        "total_potential": report.total_potential,
    }

    if args.annotations:
        aset = evalmetrics.load_annotations(args.annotations)
        plausible = evalmetrics.plausibility_map(aset, n_required=1)
        counts = analytics.activated_query_counts(top5, per_query)
        surfaces = sorted(set(counts) & {c for c, _ in plausible})
        if len(surfaces) >= 2:
            x = [float(counts[s]) for s in surfaces]
            y = [
                1.0 if any(plausible.get((s, m), False) for m in top5.get(s, [])) else 0.0
                for s in surfaces
            ]
            try:
                results["query_count_pearson"] = analytics.pearson(x, y)
                results["query_count_r2"] = analytics.linreg_r2(x, y)
            except DataError as exc:
                results["query_count_correlation_error"] = str(exc)

        if args.head_run_dir:
            _, head_top5, _ = _load_run(args.head_run_dir)
            comp = analytics.compositionality_report(top5, head_top5, plausible)
            results["compositionality"] = {
                "full_component_accuracy": comp.full.component_accuracy,
                "head_component_accuracy": comp.head.component_accuracy,
                "full_material_accuracy": comp.full.material_accuracy,
                "head_material_accuracy": comp.head.material_accuracy,
                "component_delta": comp.component_delta,
                "material_delta": comp.material_delta,
                "by_constituent_count": {
                    bucket: {"full": full, "head": head}
                    for bucket, (full, head) in comp.by_constituent_count.items()
                },
            }

        if args.k10_run_dir:
            _, k10_top5, _ = _load_run(args.k10_run_dir)
            pool = analytics.pool_size_report(top5, k10_top5, plausible)
            results["pool_size"] = {
                label: {
                    "hits": column.hits,
                    "component_accuracy": column.component_accuracy,
                    "total_hits": column.total_hits,
                }
                for label, column in pool.columns.items()
            }

    write_json(out / "analysis.json", results)

    print("query template productiveness (activated/potential):")
    for variant_class, (activated, potential) in sorted(report.by_variant_class.items()):
        print(f"  {variant_class:<8} {activated:>6} / {potential}")
    if "query_count_pearson" in results:
        print(
            f"query count vs accuracy: pearson {results['query_count_pearson']:.3f}, "
            f"r2 {results['query_count_r2']:.3f}"
        )
    return EXIT_OK


def cmd_eval(args) -> int:
    aset = evalmetrics.load_annotations(args.annotations)
    rows = evalmetrics.metrics_table(aset)
    out = _out_dir(args)
    payload: dict = {"metrics": rows}
    if len(aset.annotators) >= 2:
        from itertools import combinations

        payload["component_agreement"] = [
            {
                "model": model,
                **{
                    f"{a}_{b}": evalmetrics.component_agreement(aset, model, (a, b))
                    for a, b in combinations(aset.annotators, 2)
                },
            }
            for model in sorted(aset.model_tags)
        ]
    write_json(out / "metrics.json", payload)

    columns = ["model", "component_acc_1a", "component_acc_all", "material_acc_1a", "material_acc_all"]
    widths = {c: max(len(c), 18) for c in columns}
    print("  ".join(c.ljust(widths[c]) for c in columns))
    for row in rows:
        print(
            "  ".join(
                (f"{row[c]:.2f}" if isinstance(row[c], float) else str(row[c])).ljust(widths[c])
                for c in columns
            )
        )
    return EXIT_OK


# -- parser --

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matprobe", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common_probe_flags(p):
        p.add_argument("--backend", choices=["mock", "http"], default="mock")
        p.add_argument("--seed", type=int, default=0, help="mock backend seed")
        p.add_argument("--mock-vocab", help="vocabulary file for the mock backend")
        p.add_argument("--url", help=f"http backend URL (or ${BACKEND_URL_ENV})")
        p.add_argument("--k", type=int, default=5, help="predictions per query")
        p.add_argument("--parallelism", type=int, default=1)

    def add_norm_flags(p):
        p.add_argument("--stopwords", help="standard stopword file")
        p.add_argument("--custom-stopwords", help="custom stopword file")
        p.add_argument("--variants", help="variant<TAB>canonical file")

    p = sub.add_parser("gen-queries", help="render cloze queries for components")
    p.add_argument("--components", required=True)
    p.add_argument("--config", help="template config JSON")
    p.add_argument("--capitalize", action="store_true")
    p.add_argument("--control", action="store_true", help="use the control verbs")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("probe", help="send queries to a fill-mask backend")
    p.add_argument("--queries", help="queries.jsonl from gen-queries")
    p.add_argument("--components", help="render default queries on the fly")
    p.add_argument("--config", help="template config JSON")
    p.add_argument("--capitalize", action="store_true")
    add_common_probe_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("aggregate", help="rank materials from a predictions file")
    p.add_argument("--predictions", required=True)
    p.add_argument("--components", help="component file for plural overrides")
    p.add_argument("--method", default="prevalence", help="all or comma list of "
                   "best_score,avg,avg_all,prevalence")
    p.add_argument("--top-k", type=int, default=5)
    add_norm_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_aggregate)

    p = sub.add_parser("pipeline", help="gen + probe + normalize + aggregate")
    p.add_argument("--components", required=True)
    p.add_argument("--config", help="template config JSON")
    p.add_argument("--capitalize", action="store_true")
    add_common_probe_flags(p)
    add_norm_flags(p)
    p.add_argument("--method", default="prevalence")
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--head-fallback", action="store_true",
                   help="re-probe with the head word when the full surface "
                        "yields fewer than --min-predictions materials")
    p.add_argument("--min-predictions", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_pipeline)

    p = sub.add_parser("control-probe", help="probe with non-material control verbs")
    p.add_argument("--components", required=True)
    p.add_argument("--config", help="template config JSON")
    p.add_argument("--capitalize", action="store_true")
    add_common_probe_flags(p)
    add_norm_flags(p)
    p.add_argument("--top-k", type=int, default=5)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_control_probe)

    p = sub.add_parser("basilisk", help="bootstrap a material lexicon and link components")
    p.add_argument("--conllu", required=True)
    p.add_argument("--sentences", required=True, help="raw sentences, one per line")
    p.add_argument("--seeds", help="seed word file (default: built-in material seeds)")
    p.add_argument("--components", required=True)
    p.add_argument("--max-rounds", type=int, default=10)
    p.add_argument("--words-per-round", type=int, default=5)
    p.add_argument("--pool-base", type=int, default=20)
    p.add_argument("--pool-growth", type=int, default=1)
    p.add_argument("--max-lexicon", type=int, default=200)
    p.add_argument("--sample-k", type=int, default=5,
                   help="materials kept per component in the evaluation view")
    p.add_argument("--sample-seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_basilisk)

    p = sub.add_parser("filter-corpus", help="filter articles and export MLM splits")
    p.add_argument("--articles", required=True, help="id<TAB>title<TAB>body lines")
    p.add_argument("--components", required=True)
    p.add_argument("--train-fraction", type=float, default=0.9)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_filter_corpus)

    p = sub.add_parser("analyze", help="productiveness and comparison reports")
    p.add_argument("--run-dir", required=True)
    p.add_argument("--annotations")
    p.add_argument("--head-run-dir")
    p.add_argument("--k10-run-dir")
    add_norm_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("eval", help="accuracy and agreement from annotations")
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BackendError as exc:
        print(f"backend error: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (DataError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except MatprobeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
