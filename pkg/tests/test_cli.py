"""End-to-end CLI behavior: subcommands, exit codes, reproducibility."""

import pytest

from lingbridge.cli import build_parser, main

from conftest import write_cli_workspace


@pytest.fixture()
def ws(tmp_path):
    paths = write_cli_workspace(tmp_path)
    paths["root"] = tmp_path
    return paths


def run(*argv):
    return main([str(a) for a in argv])


def build_indexes(ws):
    root = ws["root"]
    assert run("build-index", "--corpus", ws["en_corpus.jsonl"], "--lang", "en",
               "--out", root / "en.idx") == 0
    assert run("build-index", "--corpus", ws["lw_corpus.jsonl"], "--lang", "lw",
               "--out", root / "lw.idx") == 0
    assert run("build-clesa", "--index-a", root / "lw.idx", "--index-b",
               root / "en.idx", "--links", ws["links.tsv"],
               "--out", root / "space.json") == 0


class TestPipeline:
    def test_full_pipeline(self, ws):
        root = ws["root"]
        build_indexes(ws)

        assert run("classify", "--docs", ws["docs_en.jsonl"], "--lang", "en",
                   "--labels", ws["labels.tsv"], "--index", root / "en.idx",
                   "--out", root / "pred_en.csv") == 0
        assert run("classify", "--docs", ws["docs_sw.jsonl"], "--lang", "sw",
                   "--labels", ws["labels.tsv"], "--space", root / "space.json",
                   "--dict", ws["dict_sw_lw.tsv"],
                   "--out", root / "pred_sw.csv") == 0
        assert run("classify", "--docs", ws["docs_sw.jsonl"], "--lang", "sw",
                   "--labels", ws["labels.tsv"], "--space", root / "space.json",
                   "--dict", ws["dict_sw_lw.tsv"], "--label-mode", "description",
                   "--out", root / "pred_sw2.csv") == 0
        assert run("vote", root / "pred_sw.csv", root / "pred_sw.csv",
                   root / "pred_sw2.csv", "--out", root / "voted.csv") == 0

        assert run("evaluate", "--pred", root / "pred_en.csv", "--gold",
                   ws["docs_en.jsonl"], "--metric", "accuracy",
                   "--out", root / "acc.csv") == 0
        metric_line = (root / "acc.csv").read_text().splitlines()[1]
        assert metric_line.startswith("accuracy,1.0,18")

        assert run("evaluate", "--pred", root / "pred_sw.csv", "--gold",
                   ws["docs_sw.jsonl"], "--metric", "purity",
                   "--out", root / "pur.csv") == 0

        assert run("dict-coverage", "--docs", ws["docs_sw.jsonl"], "--lang", "sw",
                   "--dict", ws["dict_sw_lw.tsv"], "--dict-tgt", "lw",
                   "--out", root / "cov.csv") == 0
        assert (root / "cov.csv").read_text().splitlines()[-1].startswith("summary,1.0,")

    def test_bridged_predictions_are_perfect(self, ws):
        root = ws["root"]
        build_indexes(ws)
        run("classify", "--docs", ws["docs_sw.jsonl"], "--lang", "sw",
            "--labels", ws["labels.tsv"], "--space", root / "space.json",
            "--dict", ws["dict_sw_lw.tsv"], "--out", root / "pred.csv")
        run("evaluate", "--pred", root / "pred.csv", "--gold", ws["docs_sw.jsonl"],
            "--metric", "accuracy", "--out", root / "m.csv")
        assert "accuracy,1.0,18" in (root / "m.csv").read_text()

    def test_classify_through_index_with_dict(self, ws):
        # word-translate into the index language, then monolingual dataless
        root = ws["root"]
        build_indexes(ws)
        dict_sw_en = root / "dict_sw_en.tsv"
        rows = []
        for line in ws["dict_sw_lw.tsv"].read_text().splitlines():
            sw, lw = line.split("\t")
            rows.append(f"{sw}\t{lw[:-1]}")  # strip the bridge suffix: real en word
        dict_sw_en.write_text("\n".join(rows) + "\n")
        assert run("classify", "--docs", ws["docs_sw.jsonl"], "--lang", "sw",
                   "--labels", ws["labels.tsv"], "--index", root / "en.idx",
                   "--dict", dict_sw_en, "--out", root / "pred.csv") == 0
        run("evaluate", "--pred", root / "pred.csv", "--gold", ws["docs_sw.jsonl"],
            "--metric", "accuracy", "--out", root / "m.csv")
        assert "accuracy,1.0,18" in (root / "m.csv").read_text()

    def test_evaluate_prints_three_of_four(self, ws, capsys):
        root = ws["root"]
        (root / "p.csv").write_text(
            "doc_id,predicted_label,score_0,score_1\n"
            "a,1,0.0,1.0\nb,1,0.0,1.0\nc,0,1.0,0.0\nd,0,1.0,0.0\n")
        (root / "g.jsonl").write_text(
            '{"id": "a", "text": "", "label": 1}\n'
            '{"id": "b", "text": "", "label": 1}\n'
            '{"id": "c", "text": "", "label": 0}\n'
            '{"id": "d", "text": "", "label": 1}\n')
        assert run("evaluate", "--pred", root / "p.csv", "--gold", root / "g.jsonl",
                   "--metric", "accuracy", "--out", root / "m.csv") == 0
        assert "accuracy,0.75,4" in capsys.readouterr().out
        assert "accuracy,0.75,4" in (root / "m.csv").read_text()

    def test_rank_bridges_all_methods(self, ws):
        root = ws["root"]
        for method, extra in [
            ("linguistic", ["--typology", ws["typology.csv"]]),
            ("wiki_size", ["--wiki-sizes", ws["wiki_sizes.csv"]]),
            ("lang_links", ["--link-counts", ws["link_counts.csv"]]),
            ("harmonic", ["--typology", ws["typology.csv"],
                          "--wiki-sizes", ws["wiki_sizes.csv"]]),
        ]:
            out = root / f"rank_{method}.csv"
            assert run("rank-bridges", "--method", method, "--src", "l00",
                       "--out", out, *extra) == 0
            lines = out.read_text().splitlines()
            assert len(lines) == 7  # the other seven languages
            first = lines[0].split(",")
            assert first[0] == "l00" and first[1] == "1"

    def test_train_ranker_and_ranksvm_method(self, ws):
        root = ws["root"]
        model_path = root / "model.txt"
        report_path = root / "report.csv"
        assert run("train-ranker", "--accuracy", ws["accuracy.csv"], "--typology",
                   ws["typology.csv"], "--out-model", model_path,
                   "--out-report", report_path) == 0
        report = report_path.read_text()
        # the default grid is echoed in the report
        assert report.splitlines()[0] == \
            "c_grid,0.01,0.1,1.0,10.0,100.0,1000.0,10000.0"
        assert "top_weights," in report
        assert model_path.read_text().startswith("ranksvm-model 1\n")
        assert run("rank-bridges", "--method", "ranksvm", "--src", "l00",
                   "--typology", ws["typology.csv"], "--model", model_path,
                   "--out", root / "rank_svm.csv") == 0

    def test_classify_matches_library_output_bytes(self, ws):
        root = ws["root"]
        build_indexes(ws)
        from lingbridge import classify_monolingual, load_documents, load_labels
        from lingbridge import load_index, write_predictions
        run("classify", "--docs", ws["docs_en.jsonl"], "--lang", "en",
            "--labels", ws["labels.tsv"], "--index", root / "en.idx",
            "--out", root / "cli.csv")
        docs = load_documents(ws["docs_en.jsonl"], "en")
        labels = load_labels(ws["labels.tsv"])
        index = load_index(root / "en.idx")
        write_predictions(classify_monolingual(docs, labels, index), root / "lib.csv")
        assert (root / "cli.csv").read_bytes() == (root / "lib.csv").read_bytes()


class TestExitCodes:
    def test_usage_error_is_2(self):
        assert run("build-index", "--corpus") == 2
        assert run("no-such-command") == 2

    def test_parse_error_is_3(self, ws):
        root = ws["root"]
        bad = root / "bad.jsonl"
        bad.write_text("{not json\n")
        assert run("build-index", "--corpus", bad, "--lang", "en",
                   "--out", root / "x.idx") == 3

    def test_validation_error_is_4(self, ws):
        root = ws["root"]
        missing = run("build-index", "--corpus", root / "nope.jsonl",
                      "--lang", "en", "--out", root / "x.idx")
        assert missing == 4
        dup = root / "dup.jsonl"
        dup.write_text('{"title": "A", "text": "x"}\n{"title": "A", "text": "y"}\n')
        assert run("build-index", "--corpus", dup, "--lang", "en",
                   "--out", root / "x.idx") == 4

    def test_runtime_error_is_5(self, ws, tmp_path):
        root = ws["root"]
        build_indexes(ws)
        target = tmp_path / "not_a_dir" / "deep" / "out.idx"
        assert run("build-index", "--corpus", ws["en_corpus.jsonl"], "--lang", "en",
                   "--out", target) == 5

    def test_help_everywhere(self, capsys):
        assert run("--help") == 0
        parser = build_parser()
        for sub in ("build-index", "build-clesa", "classify", "rank-bridges",
                    "train-ranker", "vote", "evaluate", "dict-coverage"):
            assert run(sub, "--help") == 0
            out = capsys.readouterr().out
            assert "--seed" in out and "--threads" in out


class TestReproducibility:
    def test_rerun_outputs_identical(self, ws):
        root = ws["root"]
        build_indexes(ws)
        for _ in range(2):
            run("classify", "--docs", ws["docs_sw.jsonl"], "--lang", "sw",
                "--labels", ws["labels.tsv"], "--space", root / "space.json",
                "--dict", ws["dict_sw_lw.tsv"], "--out", root / "p1.csv")
        first = (root / "p1.csv").read_bytes()
        run("classify", "--docs", ws["docs_sw.jsonl"], "--lang", "sw",
            "--labels", ws["labels.tsv"], "--space", root / "space.json",
            "--dict", ws["dict_sw_lw.tsv"], "--out", root / "p2.csv")
        assert (root / "p2.csv").read_bytes() == first

    def test_threads_do_not_change_bytes(self, ws):
        root = ws["root"]
        build_indexes(ws)
        outputs = []
        for threads in (1, 2, 8):
            out = root / f"p_t{threads}.csv"
            assert run("classify", "--docs", ws["docs_en.jsonl"], "--lang", "en",
                       "--labels", ws["labels.tsv"], "--index", root / "en.idx",
                       "--threads", threads, "--out", out) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]
