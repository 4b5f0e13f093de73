"""Command-line front end.

Subcommands: extract, evaluate, build-index, inspect-graph, tfidf-baseline,
and synth (fixture generation). Flag values override config-file values,
which override built-in defaults. Exit codes: 0 success, 1 config or IO
error, 2 no extractable keyword.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .engine import (
    MODES,
    ConfigError,
    Engine,
    EngineConfig,
    NoKeywordError,
    graph_report,
)
from .evaluation import MetricConfig, evaluate, load_eval_dataset
from .graph import RankConfig
from .pool import AugmentationConfig, build_index, save_index
from .report import write_reports
from .textprep import LexiconTagger
from .tfidf import DocumentFrequencies, tfidf_keyword

_PATH_KEYS = ("word_vectors", "sentence_vectors", "pool", "categories",
              "category_vectors", "df_stats", "metric_vectors", "lexicon")
_FLOAT_KEYS = ("min_tag_sim", "min_word_sim", "damping", "edge_threshold",
               "cat_bias_floor", "soft_threshold")
_INT_KEYS = ("m", "max_tags", "max_words", "iterations")

_CONFIG_HELP = (
    "flat key=value file; keys match the long flags with dashes as "
    "underscores, e.g. word_vectors=vectors.txt / damping=0.8 / mode=SELF_BIASED"
)


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse default exits 2; usage errors are config errors
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def read_config_file(path: str | Path) -> dict:
    values: dict = {}
    with Path(path).open(encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = line.partition("=")
            key = key.strip().replace("-", "_")
            value = value.strip()
            if key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _INT_KEYS:
                values[key] = int(value)
            elif key in _PATH_KEYS or key == "mode":
                values[key] = value
            else:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def _add_engine_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help=_CONFIG_HELP)
    parser.add_argument("--word-vectors", dest="word_vectors")
    parser.add_argument("--sentence-vectors", dest="sentence_vectors")
    parser.add_argument("--pool")
    parser.add_argument("--categories")
    parser.add_argument("--category-vectors", dest="category_vectors",
                        help="sidecar JSONL with phrase embeddings")
    parser.add_argument("--df-stats", dest="df_stats")
    parser.add_argument("--metric-vectors", dest="metric_vectors")
    parser.add_argument("--lexicon")
    parser.add_argument("--mode", choices=MODES)
    parser.add_argument("--m", type=int)
    parser.add_argument("--max-tags", dest="max_tags", type=int)
    parser.add_argument("--min-tag-sim", dest="min_tag_sim", type=float)
    parser.add_argument("--max-words", dest="max_words", type=int)
    parser.add_argument("--min-word-sim", dest="min_word_sim", type=float)
    parser.add_argument("--damping", type=float)
    parser.add_argument("--iterations", type=int)
    parser.add_argument("--edge-threshold", dest="edge_threshold", type=float)
    parser.add_argument("--cat-bias-floor", dest="cat_bias_floor", type=float)
    parser.add_argument("--soft-threshold", dest="soft_threshold", type=float)


def build_engine_config(args: argparse.Namespace) -> EngineConfig:
    """Merge CLI flags over config-file values over defaults."""
    merged: dict = {}
    if getattr(args, "config", None):
        merged.update(read_config_file(args.config))
    for key in _PATH_KEYS + _FLOAT_KEYS + _INT_KEYS + ("mode",):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value

    rank_kwargs = {
        name: merged[key]
        for key, name in (
            ("damping", "damping"),
            ("iterations", "iterations"),
            ("edge_threshold", "edge_threshold"),
        )
        if key in merged
    }
    augment_kwargs = {
        key: merged[key]
        for key in ("m", "max_tags", "min_tag_sim", "max_words", "min_word_sim")
        if key in merged
    }
    config = EngineConfig(
        mode=merged.get("mode", EngineConfig.mode),
        word_vectors=merged.get("word_vectors"),
        sentence_vectors=merged.get("sentence_vectors"),
        pool=merged.get("pool"),
        categories=merged.get("categories"),
        category_vectors=merged.get("category_vectors"),
        df_stats=merged.get("df_stats"),
        lexicon=merged.get("lexicon"),
        metric_vectors=merged.get("metric_vectors"),
        rank=RankConfig(**rank_kwargs),
        augment=AugmentationConfig(**augment_kwargs),
    )
    if "cat_bias_floor" in merged:
        config.category_floor = merged["cat_bias_floor"]
    if "soft_threshold" in merged:
        config.soft_threshold = merged["soft_threshold"]
    return config


def cmd_extract(args) -> int:
    config = build_engine_config(args)
    engine = Engine(config)
    result = engine.extract(args.ad_text)
    print(result.keyword)
    if args.top_k:
        for term, score in result.top(args.top_k):
            origin = ""
            if result.graph is not None:
                idx = result.graph.index_of(term)
                if idx is not None:
                    origin = f"  {result.graph.vertices[idx].origin}"
            print(f"  {term}\t{score:.6f}{origin}")
    if args.explain:
        if result.category:
            print(f"category: {result.category[0]} ({result.category[1]:.4f})")
        if result.neighbors:
            shown = ", ".join(f"{nid} ({rel:.4f})" for nid, rel in result.neighbors)
            print(f"neighbors: {shown}")
        print(f"tags: {', '.join(result.tags) if result.tags else '-'}")
        print(f"words: {', '.join(result.words) if result.words else '-'}")
    return 0


def cmd_evaluate(args) -> int:
    config = build_engine_config(args)
    modes = [m.strip() for m in (args.modes or config.mode).split(",") if m.strip()]
    for mode in modes:
        if mode not in MODES:
            raise ConfigError(f"unknown mode {mode!r} in --modes")
    dataset = load_eval_dataset(args.dataset)

    metric_store = None
    if config.metric_vectors:
        from .embeddings import load_word_vectors

        metric_store = load_word_vectors(config.metric_vectors)
    metric_config = MetricConfig(soft_threshold=config.soft_threshold, metric_store=metric_store)

    reports = {}
    for mode in modes:
        mode_config = build_engine_config(args)
        mode_config.mode = mode
        engine = Engine(mode_config)
        reports[mode] = evaluate(
            dataset,
            lambda text, e=engine: e.extract(text).keyword,
            metric_config,
            workers=args.workers,
        )
    out_dir = Path(args.out or "eval-report")
    written = write_reports(reports, out_dir)
    from .report import render_text_table

    sys.stdout.write(render_text_table(reports))
    print(f"wrote: {', '.join(str(p) for p in written)}")
    return 0


def cmd_build_index(args) -> int:
    config = build_engine_config(args)
    word_store = None
    sentence_store = None
    if config.word_vectors:
        from .embeddings import load_word_vectors

        word_store = load_word_vectors(config.word_vectors)
    if config.sentence_vectors:
        from .embeddings import load_sentence_vectors

        sentence_store = load_sentence_vectors(config.sentence_vectors)
    tagger = LexiconTagger.from_file(config.lexicon) if config.lexicon else LexiconTagger.bundled()
    index = build_index(args.pool_file, word_store, sentence_store, tagger)
    if index.skipped:
        print(f"warning: skipped {index.skipped} unembeddable ads", file=sys.stderr)
    save_index(index, args.out)
    print(f"indexed {len(index.ads)} ads -> {args.out}")
    return 0


def cmd_inspect_graph(args) -> int:
    config = build_engine_config(args)
    engine = Engine(config)
    result = engine.extract(args.ad_text)
    payload = json.dumps(graph_report(result), indent=2, sort_keys=True)
    if args.out:
        Path(args.out).write_text(payload + "\n", encoding="utf-8")
    else:
        print(payload)
    return 0


def cmd_tfidf_baseline(args) -> int:
    if not args.df_stats:
        raise ConfigError("tfidf-baseline requires --df-stats")
    stats = DocumentFrequencies.load(args.df_stats)
    tagger = LexiconTagger.from_file(args.lexicon) if args.lexicon else LexiconTagger.bundled()
    keyword = tfidf_keyword(args.ad_text, stats, tagger)
    print(keyword.term)
    return 0


def cmd_synth(args) -> int:
    from . import synth

    out = Path(args.out)
    if args.world == "demo":
        paths = synth.write_demo_world(out)
    elif args.world == "ablation":
        paths = synth.write_ablation_world(out, n_samples=args.samples, seed=args.seed)
    else:
        path = synth.write_latency_pool(out / "pool_20k.jsonl", n_ads=args.samples or 20000,
                                        seed=args.seed)
        paths = {"pool": path}
    for name, path in paths.items():
        print(f"{name}: {path}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="imagequery",
                     description="Extract a stock-image search keyword from ad text.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("extract", help="extract one keyword from ad text",
                       parents=[], description="Print the selected keyword.")
    p.add_argument("ad_text")
    _add_engine_flags(p)
    p.add_argument("--top-k", dest="top_k", type=int, default=0,
                   help="also print the N best-scored vertices")
    p.add_argument("--explain", action="store_true",
                   help="print inferred category, neighbors, and selections")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("evaluate", help="run golden-query metrics over a dataset")
    p.add_argument("dataset")
    _add_engine_flags(p)
    p.add_argument("--modes", help="comma-separated mode list for one comparison run")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", help="report directory (default: eval-report)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("build-index", help="embed a pool file and materialize vectors")
    p.add_argument("pool_file")
    _add_engine_flags(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build_index)

    p = sub.add_parser("inspect-graph", help="dump the ranked token graph as JSON")
    p.add_argument("ad_text")
    _add_engine_flags(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_inspect_graph)

    p = sub.add_parser("tfidf-baseline", help="tf-idf comparator keyword")
    p.add_argument("ad_text")
    p.add_argument("--df-stats", dest="df_stats", required=True)
    p.add_argument("--lexicon")
    p.set_defaults(func=cmd_tfidf_baseline)

    p = sub.add_parser("synth", help="generate synthetic fixture worlds")
    p.add_argument("world", choices=("demo", "ablation", "latency-pool"))
    p.add_argument("--out", required=True)
    p.add_argument("--samples", type=int, default=50)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except NoKeywordError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
