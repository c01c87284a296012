"""Batch command-line interface.

`salience analyze` runs the whole pipeline; the stage subcommands (trends,
similarity, associate, salience, render) consume the artifacts a previous
stage left in the output directory, so individual stages can be rerun
without repeating the rest. Exit codes: 0 success, 1 input error,
2 internal consistency error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .association import relative_std_dev
from .corpus import bin_documents, build_binning, load_corpus
from .errors import ConsistencyError, InputError
from .ngrams import build_ngram_table, relative_usage_trend
from .pipeline import (
    RunConfig,
    compute_associations,
    compute_similarities,
    load_associations_json,
    load_similarity_csv,
    load_table_json,
    load_trend_csv,
    resolve_threads,
    run_analyze,
    write_associations_json,
    write_matrix_json,
    write_ngram_trends_csv,
    write_similarity_csv,
    write_table_json,
    write_trend_csv,
)
from .render import render_grid_svg, render_trend_svg
from .salience import normalize_salience, salience_matrix, topic_salience_trend, topic_usage_trend
from .synth import corpus_to_jsonl, generate_corpus, load_synth_spec
from .topics import build_vector_space, load_framework, load_lexicon


class _Parser(argparse.ArgumentParser):
    # Usage mistakes are input errors (exit 1), not argparse's default exit 2.
    def error(self, message):
        raise InputError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="salience", description=__doc__)
    parser.add_argument("--version", action="version", version=f"salience {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    analyze = sub.add_parser("analyze", help="run the full pipeline")
    _add_corpus_args(analyze)
    _add_framework_args(analyze)
    _add_assoc_args(analyze)
    analyze.add_argument("--norm", default="zscore", choices=("zscore", "minmax"))
    analyze.add_argument("--out", required=True, help="output directory")
    analyze.set_defaults(func=_cmd_analyze)

    synth = sub.add_parser("synth", help="generate a synthetic corpus with planted bursts")
    synth.add_argument("--spec", required=True, help="synth spec JSON file")
    synth.add_argument("--out", required=True, help="corpus JSONL output path")
    synth.set_defaults(func=_cmd_synth)

    trends = sub.add_parser("trends", help="stage: n-gram table and usage trends")
    _add_corpus_args(trends)
    trends.add_argument("--out", required=True, help="output directory")
    trends.set_defaults(func=_cmd_trends)

    similarity = sub.add_parser("similarity", help="stage: n-gram/topic similarity")
    similarity.add_argument("--in", dest="in_dir", required=True, help="stage directory")
    _add_framework_args(similarity)
    similarity.set_defaults(func=_cmd_similarity)

    assoc = sub.add_parser("associate", help="stage: bivariate topic association")
    assoc.add_argument("--in", dest="in_dir", required=True, help="stage directory")
    _add_assoc_args(assoc, corpusless=True)
    assoc.set_defaults(func=_cmd_associate)

    sal = sub.add_parser("salience", help="stage: topic salience trends and matrices")
    sal.add_argument("--in", dest="in_dir", required=True, help="stage directory")
    _add_framework_args(sal)
    sal.add_argument("--norm", default="zscore", choices=("zscore", "minmax"))
    sal.set_defaults(func=_cmd_salience)

    render = sub.add_parser("render", help="stage: SVG charts from prior artifacts")
    render.add_argument("--in", dest="in_dir", required=True, help="stage directory")
    render.add_argument("--topics", required=True, help="comma-separated topic ids")
    render.add_argument("--bin", dest="bin_label", help="also render this bin's salience matrix")
    render.set_defaults(func=_cmd_render)

    return parser


def _add_corpus_args(parser) -> None:
    parser.add_argument("--corpus", required=True, help="corpus JSONL file")
    parser.add_argument("--n", type=int, default=2, help="n-gram size (default 2)")
    parser.add_argument(
        "--bin", dest="granularity", default="month", choices=("month", "week", "day")
    )
    parser.add_argument(
        "--min-count", type=int, default=5, help="drop n-grams with fewer total instances"
    )
    parser.add_argument(
        "--no-titles",
        dest="include_titles",
        action="store_false",
        help="exclude document titles from the analyzed text",
    )


def _add_framework_args(parser) -> None:
    parser.add_argument("--framework", required=True, help="topic framework JSON file")
    parser.add_argument("--lexicon", help="optional synonym lexicon JSON file")


def _add_assoc_args(parser, corpusless: bool = False) -> None:
    parser.add_argument(
        "--percentile", type=float, default=75.0, help="association percentile (default 75)"
    )
    parser.add_argument(
        "--sim-scope",
        default="per_topic",
        choices=("per_topic", "global"),
        help="similarity percentile over each topic's own column, or pooled",
    )


def _cmd_analyze(args) -> int:
    config = RunConfig(
        corpus=Path(args.corpus),
        framework=Path(args.framework),
        out_dir=Path(args.out),
        lexicon=Path(args.lexicon) if args.lexicon else None,
        n=args.n,
        granularity=args.granularity,
        min_total=args.min_count,
        percentile=args.percentile,
        normalization=args.norm,
        include_titles=args.include_titles,
        sim_scope=args.sim_scope,
    )
    manifest = run_analyze(config)
    print(
        f"analyzed {manifest['corpus']['documents']} documents over "
        f"{manifest['corpus']['bins']} bins; "
        f"{len(manifest['artifacts'])} artifacts in {args.out}"
    )
    return 0


def _cmd_synth(args) -> int:
    spec = load_synth_spec(args.spec)
    docs, truth = generate_corpus(spec)
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(corpus_to_jsonl(docs), encoding="utf-8")
    truth_path = _truth_path(out)
    truth_path.write_text(json.dumps(truth, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(docs)} documents to {out} (ground truth: {truth_path})")
    return 0


def _truth_path(out: Path) -> Path:
    if out.name.endswith(".jsonl"):
        return out.with_name(out.name[: -len(".jsonl")] + ".truth.json")
    return out.with_name(out.name + ".truth.json")


def _cmd_trends(args) -> int:
    threads = resolve_threads()
    docs = load_corpus(args.corpus)
    binning = build_binning(docs, args.granularity)
    corpus = bin_documents(docs, binning)
    table = build_ngram_table(
        corpus, args.n, args.min_count, include_titles=args.include_titles, threads=threads
    )
    if not table.records:
        raise InputError(
            f"no n-gram reached min-count {args.min_count}; lower --min-count"
        )
    trends = {
        key: relative_usage_trend(rec, table.bin_totals) for key, rec in table.records.items()
    }
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_ngram_trends_csv(out_dir / "ngram_trends.csv", table, trends, binning.labels())
    write_table_json(out_dir / "ngram_table.json", table, binning, args.include_titles)
    print(f"wrote {len(table.records)} n-gram trends to {out_dir}")
    return 0


def _cmd_similarity(args) -> int:
    in_dir = Path(args.in_dir)
    table, _, _ = load_table_json(in_dir / "ngram_table.json")
    framework = load_framework(args.framework)
    lexicon = load_lexicon(args.lexicon) if args.lexicon else None
    space, topic_vectors = build_vector_space(framework, lexicon)
    sims = compute_similarities(table, framework, space, topic_vectors, resolve_threads())
    write_similarity_csv(in_dir / "similarity.csv", sims, framework.topic_ids())
    print(f"wrote similarity for {len(sims)} n-grams x {len(framework.topics)} topics")
    return 0


def _cmd_associate(args) -> int:
    in_dir = Path(args.in_dir)
    table, _, _ = load_table_json(in_dir / "ngram_table.json")
    sims_by_topic, topic_order = load_similarity_csv(in_dir / "similarity.csv")
    trends = {
        key: relative_usage_trend(rec, table.bin_totals) for key, rec in table.records.items()
    }
    rsd = {key: relative_std_dev(trends[key]) for key in table.sorted_keys()}
    sims = {
        key: tuple(per_topic[tid] for tid in topic_order)
        for key, per_topic in sims_by_topic.items()
    }
    associations = compute_associations(sims, rsd, topic_order, args.percentile, args.sim_scope)
    write_associations_json(in_dir / "associations.json", associations)
    total = sum(len(a.members) for a in associations.values())
    print(f"wrote associations for {len(associations)} topics ({total} memberships)")
    return 0


def _cmd_salience(args) -> int:
    in_dir = Path(args.in_dir)
    table, binning, _ = load_table_json(in_dir / "ngram_table.json")
    associations = load_associations_json(in_dir / "associations.json")
    framework = load_framework(args.framework)
    missing = [tid for tid in framework.topic_ids() if tid not in associations]
    if missing:
        raise InputError(f"associations missing for topics: {', '.join(missing)}")
    trends = {
        key: relative_usage_trend(rec, table.bin_totals) for key, rec in table.records.items()
    }
    m = binning.bin_count
    labels = binning.labels()
    usage = {tid: topic_usage_trend(associations[tid], trends, m) for tid in framework.topic_ids()}
    sal = {
        tid: topic_salience_trend(associations[tid], trends, m) for tid in framework.topic_ids()
    }
    normalized = normalize_salience([sal[tid] for tid in framework.topic_ids()], args.norm)
    write_trend_csv(
        in_dir / "topic_usage.csv",
        {tid: usage[tid].values for tid in framework.topic_ids()},
        labels,
    )
    write_trend_csv(
        in_dir / "salience.csv", {tid: sal[tid].values for tid in framework.topic_ids()}, labels
    )
    write_trend_csv(
        in_dir / "salience_normalized.csv",
        {trend.topic_id: trend.values for trend in normalized},
        labels,
    )
    matrices = in_dir / "matrices"
    matrices.mkdir(exist_ok=True)
    for stale in matrices.glob("*.json"):
        stale.unlink()
    for t in range(m):
        write_matrix_json(matrices / f"{labels[t]}.json", salience_matrix(framework, sal, t, labels[t]))
    print(f"wrote salience trends for {len(framework.topics)} topics over {m} bins")
    return 0


def _cmd_render(args) -> int:
    in_dir = Path(args.in_dir)
    wanted = [tid for tid in args.topics.split(",") if tid]
    if not wanted:
        raise InputError("--topics needs at least one topic id")
    absolute, labels = load_trend_csv(in_dir / "salience.csv")
    normalized, _ = load_trend_csv(in_dir / "salience_normalized.csv")
    unknown = [tid for tid in wanted if tid not in absolute]
    if unknown:
        raise InputError(f"unknown topic ids: {', '.join(unknown)}")

    render_dir = in_dir / "render"
    render_dir.mkdir(exist_ok=True)
    (render_dir / "salience_absolute.svg").write_text(
        render_trend_svg(
            [(tid, absolute[tid]) for tid in wanted], labels, title="topic salience"
        ),
        encoding="utf-8",
    )
    (render_dir / "salience_normalized.svg").write_text(
        render_trend_svg(
            [(tid, normalized[tid]) for tid in wanted],
            labels,
            title="topic salience (normalized per bin)",
        ),
        encoding="utf-8",
    )
    written = 2
    if args.bin_label:
        matrix_path = in_dir / "matrices" / f"{args.bin_label}.json"
        if not matrix_path.is_file():
            raise InputError(f"no matrix for bin {args.bin_label!r} at {matrix_path}")
        payload = json.loads(matrix_path.read_text(encoding="utf-8"))
        if payload.get("rows") is None:
            raise InputError(
                "matrix has no grid layout; render the values as a list instead"
            )
        (render_dir / f"matrix_{args.bin_label}.svg").write_text(
            render_grid_svg(
                payload["values"],
                payload["rows"],
                payload["columns"],
                title=f"topic salience at {payload['bin']}",
            ),
            encoding="utf-8",
        )
        written += 1
    print(f"wrote {written} SVG charts to {render_dir}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ConsistencyError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
