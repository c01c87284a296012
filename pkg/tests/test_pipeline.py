import csv
import hashlib
import json
from pathlib import Path

import pytest

from salience.cli import main
from salience.errors import InputError
from salience.pipeline import RunConfig, run_analyze
from salience.synth import PlantedEvent, SynthSpec, corpus_to_jsonl, generate_corpus

from conftest import burst_phrases, disjoint_framework, framework_file

ARTIFACTS = (
    "ngram_trends.csv",
    "ngram_table.json",
    "similarity.csv",
    "associations.json",
    "topic_usage.csv",
    "salience.csv",
    "salience_normalized.csv",
    "manifest.json",
)


def demo_spec(seed=0):
    return SynthSpec(
        seed=seed,
        bin_count=8,
        docs_per_bin=3,
        background_vocab=12,
        sentence_length=(5, 9),
        sentences_per_doc=(3, 5),
        events=(
            PlantedEvent(
                topic_id="harbor_trade",
                phrases=burst_phrases("harbor_trade"),
                start_bin=4,
                duration=2,
                intensity=0.5,
            ),
        ),
    )


@pytest.fixture(scope="module")
def workspace(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("pipeline")
    docs, _ = generate_corpus(demo_spec())
    corpus = tmp / "corpus.jsonl"
    corpus.write_text(corpus_to_jsonl(docs), encoding="utf-8")
    framework = framework_file(tmp, disjoint_framework())
    return tmp, corpus, framework


def read_all(out_dir: Path) -> dict[str, bytes]:
    return {
        str(p.relative_to(out_dir)): p.read_bytes()
        for p in sorted(out_dir.rglob("*"))
        if p.is_file()
    }


class TestAnalyze:
    def test_writes_every_artifact(self, workspace):
        tmp, corpus, framework = workspace
        out = tmp / "run1"
        config = RunConfig(corpus=corpus, framework=framework, out_dir=out, min_total=1)
        manifest = run_analyze(config)
        for name in ARTIFACTS:
            assert (out / name).is_file(), name
        matrices = sorted((out / "matrices").glob("*.json"))
        assert len(matrices) == 8  # one per bin
        assert matrices[0].name == "2016-01.json"
        assert manifest["corpus"]["documents"] == 24
        assert manifest["corpus"]["bins"] == 8

    def test_manifest_hashes_every_artifact(self, workspace):
        tmp, corpus, framework = workspace
        out = tmp / "run_hashes"
        run_analyze(RunConfig(corpus=corpus, framework=framework, out_dir=out, min_total=1))
        manifest = json.loads((out / "manifest.json").read_text())
        listed = set(manifest["artifacts"])
        on_disk = {
            rel for rel in read_all(out) if rel != "manifest.json"
        }
        assert listed == on_disk
        for rel, digest in manifest["artifacts"].items():
            assert hashlib.sha256((out / rel).read_bytes()).hexdigest() == digest

    def test_rerun_is_byte_identical_except_manifest_timings(self, workspace):
        tmp, corpus, framework = workspace
        out = tmp / "rerun"
        config = RunConfig(corpus=corpus, framework=framework, out_dir=out, min_total=1)
        run_analyze(config)
        first = read_all(out)
        run_analyze(config)
        second = read_all(out)
        assert set(first) == set(second)
        for rel in first:
            if rel == "manifest.json":
                a = json.loads(first[rel])
                b = json.loads(second[rel])
                a.pop("timings"), b.pop("timings")
                assert a == b
            else:
                assert first[rel] == second[rel], rel

    def test_exported_floats_roundtrip_exactly(self, workspace):
        tmp, corpus, framework = workspace
        out = tmp / "roundtrip"
        run_analyze(RunConfig(corpus=corpus, framework=framework, out_dir=out, min_total=1))
        from salience.ngrams import build_ngram_table, relative_usage_trend, parse_ngram
        from salience.corpus import load_corpus, build_binning, bin_documents

        docs = load_corpus(corpus)
        binned = bin_documents(docs, build_binning(docs))
        table = build_ngram_table(binned, 2, 1)
        with (out / "ngram_trends.csv").open() as fh:
            reader = csv.reader(fh)
            next(reader)
            for row in reader:
                key = parse_ngram(row[0])
                expected = relative_usage_trend(table.records[key], table.bin_totals)
                assert [float(v) for v in row[2:]] == expected

    def test_empty_corpus_fails_with_input_error(self, tmp_path, workspace):
        _, _, framework = workspace
        empty = tmp_path / "empty.jsonl"
        empty.write_text("", encoding="utf-8")
        with pytest.raises(InputError, match="ingest"):
            run_analyze(
                RunConfig(corpus=empty, framework=framework, out_dir=tmp_path / "out")
            )

    def test_failed_run_removes_partial_outputs(self, tmp_path, workspace):
        _, corpus, _ = workspace
        # A single-topic framework passes ingest but fails in the similarity
        # stage, after the trends artifacts were already written.
        solo = tmp_path / "solo.json"
        solo.write_text(
            json.dumps({"name": "solo", "topics": [{"id": "t", "definition": "word"}]}),
            encoding="utf-8",
        )
        out = tmp_path / "out"
        with pytest.raises(InputError, match="similarity"):
            run_analyze(RunConfig(corpus=corpus, framework=solo, out_dir=out, min_total=1))
        leftovers = [p for p in out.rglob("*") if p.is_file()]
        assert leftovers == []

    def test_min_total_that_filters_everything(self, tmp_path, workspace):
        _, corpus, framework = workspace
        with pytest.raises(InputError, match="min-count"):
            run_analyze(
                RunConfig(
                    corpus=corpus,
                    framework=framework,
                    out_dir=tmp_path / "out",
                    min_total=10_000,
                )
            )

    def test_bad_config_rejected(self, tmp_path, workspace):
        _, corpus, framework = workspace
        config = RunConfig(
            corpus=corpus, framework=framework, out_dir=tmp_path / "out", percentile=150
        )
        with pytest.raises(InputError):
            run_analyze(config)

    def test_lexicon_feeds_the_vector_space(self, tmp_path, workspace):
        _, corpus, framework = workspace
        lexicon = tmp_path / "lexicon.json"
        lexicon.write_text(json.dumps({"harbor": ["seaport"]}), encoding="utf-8")
        out = tmp_path / "out"
        manifest = run_analyze(
            RunConfig(
                corpus=corpus,
                framework=framework,
                out_dir=out,
                lexicon=lexicon,
                min_total=1,
            )
        )
        assert manifest["inputs"]["lexicon"] is not None
        assert manifest["config"]["lexicon"] == str(lexicon)

    def test_week_granularity_end_to_end(self, tmp_path, workspace):
        _, _, framework = workspace
        spec = SynthSpec(
            seed=4,
            bin_count=5,
            docs_per_bin=2,
            background_vocab=10,
            sentence_length=(5, 8),
            sentences_per_doc=(3, 4),
            granularity="week",
        )
        docs, _ = generate_corpus(spec)
        corpus = tmp_path / "weekly.jsonl"
        corpus.write_text(corpus_to_jsonl(docs), encoding="utf-8")
        out = tmp_path / "out"
        run_analyze(
            RunConfig(
                corpus=corpus,
                framework=framework,
                out_dir=out,
                min_total=1,
                granularity="week",
            )
        )
        matrices = sorted((out / "matrices").glob("*.json"))
        assert len(matrices) == 5
        # Weekly bins are labeled by their Monday start date.
        assert all(len(p.stem) == 10 for p in matrices)


class TestCli:
    def test_analyze_then_render(self, workspace, capsys):
        tmp, corpus, framework = workspace
        out = tmp / "cli_run"
        code = main(
            [
                "analyze",
                "--corpus", str(corpus),
                "--framework", str(framework),
                "--min-count", "1",
                "--out", str(out),
            ]
        )
        assert code == 0
        assert "artifacts" in capsys.readouterr().out

        code = main(
            ["render", "--in", str(out), "--topics", "harbor_trade,city_transit"]
        )
        assert code == 0
        for name in ("salience_absolute.svg", "salience_normalized.svg"):
            content = (out / "render" / name).read_text()
            assert content.count("<polyline") == 2

    def test_render_unknown_topic(self, workspace):
        tmp, corpus, framework = workspace
        out = tmp / "cli_run2"
        main(
            [
                "analyze",
                "--corpus", str(corpus),
                "--framework", str(framework),
                "--min-count", "1",
                "--out", str(out),
            ]
        )
        assert main(["render", "--in", str(out), "--topics", "nope"]) == 1

    def test_stage_subcommands_match_analyze(self, workspace):
        tmp, corpus, framework = workspace
        full = tmp / "full"
        staged = tmp / "staged"
        assert (
            main(
                [
                    "analyze",
                    "--corpus", str(corpus),
                    "--framework", str(framework),
                    "--min-count", "1",
                    "--out", str(full),
                ]
            )
            == 0
        )
        assert (
            main(
                [
                    "trends",
                    "--corpus", str(corpus),
                    "--min-count", "1",
                    "--out", str(staged),
                ]
            )
            == 0
        )
        assert (
            main(["similarity", "--in", str(staged), "--framework", str(framework)]) == 0
        )
        assert main(["associate", "--in", str(staged)]) == 0
        assert main(["salience", "--in", str(staged), "--framework", str(framework)]) == 0

        full_files = read_all(full)
        staged_files = read_all(staged)
        for rel, content in full_files.items():
            if rel == "manifest.json":
                continue
            assert staged_files[rel] == content, rel

    def test_synth_writes_corpus_and_truth(self, tmp_path, capsys):
        spec_path = tmp_path / "spec.json"
        spec_path.write_text(
            json.dumps(
                {
                    "seed": 1,
                    "bin_count": 3,
                    "docs_per_bin": 2,
                    "background_vocab": 8,
                    "sentence_length": [4, 6],
                    "sentences_per_doc": [2, 3],
                    "events": [],
                }
            ),
            encoding="utf-8",
        )
        out = tmp_path / "corpus.jsonl"
        assert main(["synth", "--spec", str(spec_path), "--out", str(out)]) == 0
        assert out.is_file()
        truth = json.loads((tmp_path / "corpus.truth.json").read_text())
        assert truth["bin_count"] == 3

    def test_missing_input_exits_one(self, tmp_path, capsys):
        code = main(
            [
                "analyze",
                "--corpus", str(tmp_path / "absent.jsonl"),
                "--framework", str(tmp_path / "absent.json"),
                "--out", str(tmp_path / "out"),
            ]
        )
        assert code == 1
        assert "error:" in capsys.readouterr().err

    def test_usage_error_exits_one(self, capsys):
        assert main(["analyze"]) == 1

    def test_internal_inconsistency_exits_two(self, workspace, tmp_path, capsys):
        _, corpus, framework = workspace
        staged = tmp_path / "staged"
        main(["trends", "--corpus", str(corpus), "--min-count", "1", "--out", str(staged)])
        main(["similarity", "--in", str(staged), "--framework", str(framework)])
        # Corrupt the associations so the salience stage hits a member with
        # no usage trend.
        (staged / "associations.json").write_text(
            json.dumps(
                {
                    tid: {
                        "sim_threshold": 0.0,
                        "rsd_threshold": 0.0,
                        "members": [
                            {"ngram": "never seen", "similarity": 0.5, "rsd": 2.0}
                        ],
                    }
                    for tid in (
                        "harbor_trade",
                        "mountain_weather",
                        "desert_wildlife",
                        "city_transit",
                    )
                }
            ),
            encoding="utf-8",
        )
        code = main(["salience", "--in", str(staged), "--framework", str(framework)])
        assert code == 2
        assert "error:" in capsys.readouterr().err

    def test_render_matrix_refused_without_grid(self, workspace):
        tmp, corpus, framework_path = workspace
        # The quadrant framework has no grid, so matrix rendering must refuse.
        out = tmp / "cli_run3"
        main(
            [
                "analyze",
                "--corpus", str(corpus),
                "--framework", str(framework_path),
                "--min-count", "1",
                "--out", str(out),
            ]
        )
        code = main(
            ["render", "--in", str(out), "--topics", "harbor_trade", "--bin", "2016-01"]
        )
        assert code == 1

    def test_render_matrix_for_grid_framework(self, workspace, tmp_path):
        from salience.topics import load_pmesii_ascope
        from conftest import framework_file as fw_file

        tmp, corpus, _ = workspace
        grid_fw = fw_file(tmp_path, load_pmesii_ascope(), name="pmesii.json")
        out = tmp_path / "grid_run"
        assert (
            main(
                [
                    "analyze",
                    "--corpus", str(corpus),
                    "--framework", str(grid_fw),
                    "--min-count", "1",
                    "--out", str(out),
                ]
            )
            == 0
        )
        code = main(
            [
                "render",
                "--in", str(out),
                "--topics", "political_events,infrastructure_capabilities",
                "--bin", "2016-05",
            ]
        )
        assert code == 0
        svg = (out / "render" / "matrix_2016-05.svg").read_text()
        assert svg.count("<rect") >= 36 and "2016-05" in svg
