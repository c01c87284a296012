"""End-to-end batch pipeline and file-based artifact exchange.

`run_analyze` chains corpus ingestion, n-gram trends, topic similarity,
bivariate association, and salience into one output directory, with a
manifest hashing every artifact. Each stage also has a file-backed entry
point (consume prior artifacts, write the next ones) so stages can be rerun
individually; `ngram_table.json` is the intermediate that carries counts
and contexts between stages.

All exports are deterministic: rows follow sorted n-gram order and
framework topic order, floats are rendered as shortest round-trip decimals,
and reruns with identical inputs and config are byte-identical except for
the manifest's timings.
"""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .association import Member, TopicAssociation, associate, percentile, relative_std_dev
from .corpus import (
    GRANULARITIES,
    TimeBinning,
    bin_documents,
    build_binning,
    load_corpus,
)
from .errors import ConsistencyError, InputError, SalienceError
from .ngrams import (
    NgramKey,
    NgramRecord,
    NgramTable,
    build_ngram_table,
    parse_ngram,
    relative_usage_trend,
    render_ngram,
)
from .salience import (
    NORMALIZATIONS,
    normalize_salience,
    salience_matrix,
    topic_salience_trend,
    topic_usage_trend,
)
from .topics import (
    TopicFramework,
    build_vector_space,
    load_framework,
    load_lexicon,
    similarity_matrix,
)

SIM_SCOPES = ("per_topic", "global")


@dataclass
class RunConfig:
    corpus: Path
    framework: Path
    out_dir: Path
    lexicon: Path | None = None
    n: int = 2
    granularity: str = "month"
    min_total: int = 5
    percentile: float = 75.0
    normalization: str = "zscore"
    include_titles: bool = True
    sim_scope: str = "per_topic"
    threads: int | None = None  # None: honor SALIENCE_THREADS, default 1

    def validate(self) -> None:
        if self.n < 1:
            raise InputError("n must be >= 1")
        if self.min_total < 1:
            raise InputError("min-count must be >= 1")
        if not 0.0 <= self.percentile <= 100.0:
            raise InputError("percentile must lie in [0, 100]")
        if self.granularity not in GRANULARITIES:
            raise InputError(f"unknown bin granularity {self.granularity!r}")
        if self.normalization not in NORMALIZATIONS:
            raise InputError(f"unknown normalization {self.normalization!r}")
        if self.sim_scope not in SIM_SCOPES:
            raise InputError(f"unknown similarity scope {self.sim_scope!r}")

    def echo(self) -> dict:
        return {
            "corpus": str(self.corpus),
            "framework": str(self.framework),
            "out_dir": str(self.out_dir),
            "lexicon": str(self.lexicon) if self.lexicon else None,
            "n": self.n,
            "granularity": self.granularity,
            "min_total": self.min_total,
            "percentile": self.percentile,
            "normalization": self.normalization,
            "include_titles": self.include_titles,
            "sim_scope": self.sim_scope,
        }


def resolve_threads(requested: int | None = None) -> int:
    """Worker-thread cap: explicit argument, else SALIENCE_THREADS, else 1."""
    if requested is not None:
        if requested < 1:
            raise InputError("thread count must be >= 1")
        return requested
    raw = os.environ.get("SALIENCE_THREADS")
    if raw is None or raw == "":
        return 1
    try:
        value = int(raw)
    except ValueError:
        raise InputError(f"SALIENCE_THREADS must be a positive integer, got {raw!r}")
    if value < 1:
        raise InputError(f"SALIENCE_THREADS must be a positive integer, got {raw!r}")
    return value


def _fmt(x: float) -> str:
    # Shortest decimal that round-trips to the same float.
    return repr(float(x))


def _write_csv(path: Path, header: list[str], rows) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def _write_json(path: Path, payload, *, sort_keys: bool = False) -> None:
    with path.open("w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=sort_keys)
        fh.write("\n")


def _sha256(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for block in iter(lambda: fh.read(1 << 16), b""):
            digest.update(block)
    return digest.hexdigest()


# --- artifact writers / readers --------------------------------------------


def write_ngram_trends_csv(
    path: Path, table: NgramTable, trends: dict[NgramKey, list[float]], bin_labels: list[str]
) -> None:
    rows = (
        [render_ngram(key), table.records[key].total] + [_fmt(v) for v in trends[key]]
        for key in table.sorted_keys()
    )
    _write_csv(path, ["ngram", "total"] + list(bin_labels), rows)


def write_table_json(
    path: Path, table: NgramTable, binning: TimeBinning, include_titles: bool
) -> None:
    """Persist the n-gram table (counts and contexts) for later stages."""
    payload = {
        "version": 1,
        "n": table.n,
        "min_total": table.min_total,
        "include_titles": include_titles,
        "granularity": binning.granularity,
        "origin": binning.origin.isoformat(),
        "bin_labels": binning.labels(),
        "bin_totals": table.bin_totals,
        "ngrams": {
            render_ngram(key): {
                "counts": table.records[key].counts,
                "contexts": [[t, s] for t, s in table.records[key].contexts],
            }
            for key in table.sorted_keys()
        },
    }
    _write_json(path, payload)


def load_table_json(path: Path) -> tuple[NgramTable, TimeBinning, bool]:
    if not path.is_file():
        raise InputError(f"n-gram table not found: {path} (run the trends stage first)")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc
    try:
        binning = TimeBinning(
            granularity=payload["granularity"],
            origin=dt.date.fromisoformat(payload["origin"]),
            bin_count=len(payload["bin_totals"]),
        )
        records: dict[NgramKey, NgramRecord] = {}
        for text, entry in payload["ngrams"].items():
            key = parse_ngram(text)
            records[key] = NgramRecord(
                key=key,
                counts=list(entry["counts"]),
                total=sum(entry["counts"]),
                contexts=[(int(t), s) for t, s in entry["contexts"]],
            )
        table = NgramTable(
            n=int(payload["n"]),
            min_total=int(payload["min_total"]),
            bin_totals=list(payload["bin_totals"]),
            records=records,
        )
        return table, binning, bool(payload["include_titles"])
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad n-gram table payload: {exc}") from exc


def write_similarity_csv(path: Path, sims: dict[NgramKey, tuple[float, ...]], topic_ids) -> None:
    def rows():
        for key in sorted(sims):
            for topic_id, value in zip(topic_ids, sims[key]):
                yield [render_ngram(key), topic_id, _fmt(value)]

    _write_csv(path, ["ngram", "topic_id", "similarity"], rows())


def load_similarity_csv(path: Path) -> tuple[dict[NgramKey, dict[str, float]], list[str]]:
    """Returns per-ngram topic similarity plus topic ids in file order."""
    if not path.is_file():
        raise InputError(f"similarity table not found: {path} (run the similarity stage first)")
    sims: dict[NgramKey, dict[str, float]] = {}
    topic_order: list[str] = []
    seen_topics: set[str] = set()
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header != ["ngram", "topic_id", "similarity"]:
            raise InputError(f"{path}: unexpected header {header}")
        for row in reader:
            if len(row) != 3:
                raise InputError(f"{path}: malformed row {row}")
            key = parse_ngram(row[0])
            sims.setdefault(key, {})[row[1]] = float(row[2])
            if row[1] not in seen_topics:
                seen_topics.add(row[1])
                topic_order.append(row[1])
    if not sims:
        raise InputError(f"{path}: no similarity rows")
    return sims, topic_order


def write_associations_json(path: Path, associations: dict[str, TopicAssociation]) -> None:
    payload = {
        topic_id: {
            "sim_threshold": assoc.sim_threshold,
            "rsd_threshold": assoc.rsd_threshold,
            "members": [
                {"ngram": render_ngram(m.ngram), "similarity": m.similarity, "rsd": m.rsd}
                for m in assoc.members
            ],
        }
        for topic_id, assoc in associations.items()
    }
    _write_json(path, payload)


def load_associations_json(path: Path) -> dict[str, TopicAssociation]:
    if not path.is_file():
        raise InputError(f"associations not found: {path} (run the associate stage first)")
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except ValueError as exc:
        raise InputError(f"{path}: malformed JSON: {exc}") from exc
    out: dict[str, TopicAssociation] = {}
    try:
        for topic_id, entry in payload.items():
            out[topic_id] = TopicAssociation(
                topic_id=topic_id,
                members=tuple(
                    Member(parse_ngram(m["ngram"]), float(m["similarity"]), float(m["rsd"]))
                    for m in entry["members"]
                ),
                sim_threshold=float(entry["sim_threshold"]),
                rsd_threshold=float(entry["rsd_threshold"]),
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: bad associations payload: {exc}") from exc
    return out


def write_trend_csv(path: Path, rows: dict[str, list[float]], bin_labels: list[str]) -> None:
    _write_csv(
        path,
        ["topic_id"] + list(bin_labels),
        ([topic_id] + [_fmt(v) for v in values] for topic_id, values in rows.items()),
    )


def load_trend_csv(path: Path) -> tuple[dict[str, list[float]], list[str]]:
    if not path.is_file():
        raise InputError(f"trend table not found: {path} (run the salience stage first)")
    with path.open("r", encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[0] != "topic_id":
            raise InputError(f"{path}: unexpected header {header}")
        labels = header[1:]
        rows = {row[0]: [float(v) for v in row[1:]] for row in reader if row}
    return rows, labels


def write_matrix_json(path: Path, matrix) -> None:
    framework: TopicFramework = matrix.framework
    if framework.has_grid:
        payload = {
            "bin": matrix.bin_label,
            "rows": list(framework.rows),
            "columns": list(framework.columns),
            "values": matrix.grid(),
        }
    else:
        # No declared grid: one row holding the flat framework-order values.
        payload = {
            "bin": matrix.bin_label,
            "rows": None,
            "columns": None,
            "topics": framework.topic_ids(),
            "values": [list(matrix.values)],
        }
    _write_json(path, payload)


# --- pipeline stages --------------------------------------------------------


class _Run:
    """Tracks written artifacts so a failed run can remove partial outputs."""

    def __init__(self, out_dir: Path):
        self.out_dir = out_dir
        self.written: list[Path] = []
        self.timings: dict[str, float] = {}

    def target(self, *relative: str) -> Path:
        path = self.out_dir.joinpath(*relative)
        self.written.append(path)
        return path

    def cleanup(self) -> None:
        for path in self.written:
            try:
                path.unlink(missing_ok=True)
            except OSError:
                pass
        matrices = self.out_dir / "matrices"
        if matrices.is_dir() and not any(matrices.iterdir()):
            matrices.rmdir()

    @contextmanager
    def stage(self, name: str):
        started = time.perf_counter()
        try:
            yield
        except SalienceError as exc:
            raise type(exc)(f"{name}: {exc}") from exc
        except Exception as exc:  # unexpected bug: report as internal, named stage
            raise ConsistencyError(f"{name}: {type(exc).__name__}: {exc}") from exc
        finally:
            self.timings[name] = time.perf_counter() - started


def compute_similarities(
    table: NgramTable,
    framework: TopicFramework,
    space,
    topic_vectors,
    threads: int = 1,
) -> dict[NgramKey, tuple[float, ...]]:
    """Similarity values for every tabled n-gram, in framework topic order.

    Parallel-safe: per-n-gram work shares no mutable state and results are
    collected in sorted n-gram order regardless of thread count.
    """
    keys = sorted(table.records)

    def one(key: NgramKey) -> tuple[float, ...]:
        contexts = [s for _, s in table.records[key].contexts]
        return similarity_matrix(key, contexts, framework, space, topic_vectors).values

    if threads > 1 and len(keys) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            chunk = max(1, len(keys) // (threads * 8))
            values = list(pool.map(one, keys, chunksize=chunk))
    else:
        values = [one(key) for key in keys]
    return dict(zip(keys, values))


def compute_associations(
    sims: dict[NgramKey, tuple[float, ...]],
    rsd: dict[NgramKey, float],
    topic_ids: list[str],
    p: float,
    sim_scope: str = "per_topic",
) -> dict[str, TopicAssociation]:
    """One association per topic. The variability threshold is always global;
    the similarity threshold is per-topic unless sim_scope is 'global'."""
    rsd_threshold = percentile(list(rsd.values()), p)
    global_sim: float | None = None
    if sim_scope == "global":
        pooled = [v for values in sims.values() for v in values]
        global_sim = percentile(pooled, p)
    out: dict[str, TopicAssociation] = {}
    for i, topic_id in enumerate(topic_ids):
        column = {key: values[i] for key, values in sims.items()}
        out[topic_id] = associate(
            topic_id,
            column,
            rsd,
            p,
            sim_threshold=global_sim,
            rsd_threshold=rsd_threshold,
        )
    return out


def run_analyze(config: RunConfig) -> dict:
    """Execute the full pipeline and write every artifact; returns the manifest.

    On any stage failure the partial outputs written so far are removed and
    the error names the failing stage.
    """
    config.validate()
    threads = resolve_threads(config.threads)
    out_dir = Path(config.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    run = _Run(out_dir)

    try:
        with run.stage("ingest"):
            docs = load_corpus(config.corpus)
            binning = build_binning(docs, config.granularity)
            corpus = bin_documents(docs, binning)
            framework = load_framework(config.framework)
            lexicon = load_lexicon(config.lexicon) if config.lexicon else None

        with run.stage("trends"):
            table = build_ngram_table(
                corpus,
                config.n,
                config.min_total,
                include_titles=config.include_titles,
                threads=threads,
            )
            if not table.records:
                raise InputError(
                    f"no n-gram reached min-count {config.min_total}; "
                    "lower --min-count or supply more text"
                )
            trends = {
                key: relative_usage_trend(rec, table.bin_totals)
                for key, rec in table.records.items()
            }
            write_ngram_trends_csv(
                run.target("ngram_trends.csv"), table, trends, binning.labels()
            )
            write_table_json(run.target("ngram_table.json"), table, binning, config.include_titles)

        with run.stage("similarity"):
            space, topic_vectors = build_vector_space(framework, lexicon)
            sims = compute_similarities(table, framework, space, topic_vectors, threads)
            write_similarity_csv(run.target("similarity.csv"), sims, framework.topic_ids())

        with run.stage("associate"):
            rsd = {key: relative_std_dev(trends[key]) for key in table.sorted_keys()}
            associations = compute_associations(
                sims, rsd, framework.topic_ids(), config.percentile, config.sim_scope
            )
            write_associations_json(run.target("associations.json"), associations)

        with run.stage("salience"):
            m = binning.bin_count
            usage = {
                tid: topic_usage_trend(associations[tid], trends, m)
                for tid in framework.topic_ids()
            }
            sal = {
                tid: topic_salience_trend(associations[tid], trends, m)
                for tid in framework.topic_ids()
            }
            normalized = normalize_salience(
                [sal[tid] for tid in framework.topic_ids()], config.normalization
            )
            labels = binning.labels()
            write_trend_csv(
                run.target("topic_usage.csv"),
                {tid: usage[tid].values for tid in framework.topic_ids()},
                labels,
            )
            write_trend_csv(
                run.target("salience.csv"),
                {tid: sal[tid].values for tid in framework.topic_ids()},
                labels,
            )
            write_trend_csv(
                run.target("salience_normalized.csv"),
                {trend.topic_id: trend.values for trend in normalized},
                labels,
            )
            matrices_dir = out_dir / "matrices"
            matrices_dir.mkdir(exist_ok=True)
            for stale in matrices_dir.glob("*.json"):
                stale.unlink()
            for t in range(m):
                matrix = salience_matrix(framework, sal, t, labels[t])
                write_matrix_json(run.target("matrices", f"{labels[t]}.json"), matrix)

        with run.stage("manifest"):
            manifest = {
                "tool": "salience",
                "version": __version__,
                "config": config.echo(),
                "corpus": {
                    "documents": corpus.doc_count,
                    "bins": binning.bin_count,
                    "ngrams": len(table.records),
                    "instances": sum(table.bin_totals),
                    "empty_topics": sorted(
                        tid for tid in framework.topic_ids() if sal[tid].empty
                    ),
                },
                "inputs": {
                    "corpus": _sha256(Path(config.corpus)),
                    "framework": _sha256(Path(config.framework)),
                    "lexicon": _sha256(Path(config.lexicon)) if config.lexicon else None,
                },
                "artifacts": {
                    str(path.relative_to(out_dir)).replace(os.sep, "/"): _sha256(path)
                    for path in run.written
                },
                "timings": run.timings,
            }
            _write_json(out_dir / "manifest.json", manifest, sort_keys=True)
    except BaseException:
        run.cleanup()
        (out_dir / "manifest.json").unlink(missing_ok=True)
        raise
    return manifest
