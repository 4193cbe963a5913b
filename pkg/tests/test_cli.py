import json
import subprocess
import sys

import pytest

from editlens.cli import main


def run_cli(*argv):
    return main([str(a) for a in argv])


def write(tmp_path, name, lines):
    path = tmp_path / name
    path.write_text("".join(line + "\n" for line in lines), encoding="utf-8")
    return path


@pytest.fixture
def corpus(tmp_path):
    hyp = write(tmp_path, "hyp.txt", ["the cat sat on the mat", "a quick brown fox"])
    ref = write(tmp_path, "ref.txt", ["the cat sat on a mat", "the quick brown fox jumps"])
    return hyp, ref


def test_identical_corpus(tmp_path, sample_dir):
    out = tmp_path / "r.json"
    assert run_cli("score", "--hyp", sample_dir / "ref.txt", "--ref", sample_dir / "ref.txt", "--metric", "ter,bleu,chrf", "--out", out) == 0
    report = json.loads(out.read_text())
    for seg in report["segments"]:
        scores = {r["metric"]: r["score"] for r in seg["results"]}
        assert scores == {"ter": 0.0, "bleu": 1.0, "chrf": 1.0}
    assert report["corpus"]["bleu"]["score"] == 1.0


def test_kitten_sitting_char_level(tmp_path):
    hyp = write(tmp_path, "h.txt", ["kitten"])
    ref = write(tmp_path, "r.txt", ["sitting"])
    out = tmp_path / "r.json"
    assert run_cli("score", "--hyp", hyp, "--ref", ref, "--metric", "lev", "--level", "char", "--out", out) == 0
    res = json.loads(out.read_text())["segments"][0]["results"][0]
    assert res["components"]["distance"] == 3
    assert res["score"] == pytest.approx(3 / 7)
    assert res["metric"] == "lev@char"


def test_missing_reference_exits_2_without_output(tmp_path, corpus, capsys):
    hyp, _ = corpus
    out = tmp_path / "r.json"
    assert run_cli("score", "--hyp", hyp, "--ref", tmp_path / "nope.txt", "--out", out) == 2
    assert not out.exists()
    assert "nope.txt" in capsys.readouterr().err


def test_line_count_mismatch_names_file(tmp_path, corpus, capsys):
    hyp, ref = corpus
    short = write(tmp_path, "short.txt", ["only one"])
    assert run_cli("score", "--hyp", hyp, "--ref", ref, "--ref", short) == 2
    assert "short.txt" in capsys.readouterr().err


@pytest.mark.parametrize("args", [["--metric", "meteor"], ["--metric", "ngram:0"], ["--max-shift-span", "-1"], ["--jobs", "0"], ["--smoothing", "cubic"]])
def test_bad_flags_exit_2(corpus, args):
    hyp, ref = corpus
    assert run_cli("score", "--hyp", hyp, "--ref", ref, *args) == 2


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["score"])
    assert exc.value.code == 2


def test_config_echo(tmp_path, corpus):
    hyp, ref = corpus
    out = tmp_path / "r.json"
    run_cli("score", "--hyp", hyp, "--ref", ref, "--metric", "ter", "--metric", "ngram:3", "--cased", "--chrf-order", "4", "--seed", "9", "--out", out)
    cfg = json.loads(out.read_text())["config"]
    assert cfg["metrics"] == ["ter", "ngram:3"]
    assert cfg["normalization"]["lowercase"] is False
    assert cfg["ter"] == {"case_sensitive": True, "max_shift_distance": 50, "max_shift_span": 10}
    assert cfg["chrf"]["char_order"] == 4
    assert cfg["global"] == {"format": "json", "seed": 9}


def test_tsv_format(corpus, capsys):
    hyp, ref = corpus
    assert run_cli("score", "--hyp", hyp, "--ref", ref, "--metric", "ter", "--format", "tsv") == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "segment\tmetric\tscore"
    assert lines[-1].startswith("corpus\tter\t")


def test_multiple_references(tmp_path, corpus):
    hyp, ref = corpus
    ref2 = write(tmp_path, "ref2.txt", ["the cat sat on the mat", "x"])
    out = tmp_path / "r.json"
    run_cli("score", "--hyp", hyp, "--ref", ref, "--ref", ref2, "--metric", "ter", "--out", out)
    seg = json.loads(out.read_text())["segments"][0]["results"][0]
    assert seg["score"] == 0 and seg["components"]["best_ref_index"] == 1


def test_empty_reference_line_reports_error_entry(tmp_path):
    hyp = write(tmp_path, "h.txt", ["a b", "c"])
    ref = write(tmp_path, "r.txt", ["", "c"])
    out = tmp_path / "r.json"
    assert run_cli("score", "--hyp", hyp, "--ref", ref, "--metric", "ter", "--out", out) == 0
    report = json.loads(out.read_text())
    first = report["segments"][0]["results"][0]
    assert first["score"] is None and "error" in first
    assert report["corpus"]["ter"]["score"] == 2.0


@pytest.mark.parametrize("jobs", ["1", "3"])
def test_score_is_byte_stable(tmp_path, sample_dir, jobs):
    args = ["score", "--hyp", sample_dir / "hyp.txt", "--ref", sample_dir / "ref.txt", "--ref", sample_dir / "ref2.txt", "--metric", "ter,bleu,chrf,lev,dl"]
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run_cli(*args, "--out", a) == 0
    assert run_cli(*args, "--jobs", jobs, "--out", b) == 0
    assert a.read_bytes() == b.read_bytes()


def test_trace_identical(capsys):
    assert run_cli("trace", "a b c", "a b c") == 0
    ops = [l for l in capsys.readouterr().out.splitlines() if l and not l.startswith(("#", "HYP", "REF"))]
    assert ops and all(l.startswith("MATCH") for l in ops)


def test_trace_shift(capsys):
    assert run_cli("trace", "a b x y", "x y a b") == 0
    out = capsys.readouterr().out
    ops = [l for l in out.splitlines() if l and not l.startswith(("#", "HYP", "REF"))]
    assert ops[0] == "SHIFT [0,2) -> 3"
    assert all(l.startswith("MATCH") for l in ops[1:])
    assert "HYP: x y a b" in out


def test_trace_lev_inserts(capsys):
    assert run_cli("trace", "--metric", "lev", "--level", "char", "", "abc") == 0
    out = capsys.readouterr().out
    assert [l.split()[0] for l in out.splitlines() if l.startswith("INSERT")] == ["INSERT"] * 3
    assert "HYP: * * *" in out


def test_trace_is_repeatable(capsys):
    run_cli("trace", "the cat sat on mat", "on the mat sat the cat")
    first = capsys.readouterr().out
    run_cli("trace", "the cat sat on mat", "on the mat sat the cat")
    assert capsys.readouterr().out == first


def test_staircase_matches_golden(tmp_path, data_dir):
    out = tmp_path / "s.json"
    assert run_cli("staircase", "--out", out) == 0
    assert out.read_bytes() == (data_dir / "staircase_golden.json").read_bytes()


def test_staircase_parallel_and_repeat(tmp_path):
    a, b, c = tmp_path / "a.json", tmp_path / "b.json", tmp_path / "c.json"
    run_cli("staircase", "--seed", "11", "--out", a)
    run_cli("staircase", "--seed", "11", "--out", b)
    run_cli("staircase", "--seed", "11", "--jobs", "2", "--out", c)
    assert a.read_bytes() == b.read_bytes() == c.read_bytes()
    assert json.loads(a.read_text())["seed"] == 11


def test_staircase_custom_inputs(tmp_path):
    base = write(tmp_path, "base.txt", ["one two three four five six"])
    spec = tmp_path / "spec.json"
    spec.write_text(json.dumps({"seed": 1, "steps": [{"kind": "replace", "at": 0}]}))
    out = tmp_path / "s.json"
    assert run_cli("staircase", "--base", base, "--spec", spec, "--metrics", "ter", "--out", out) == 0
    report = json.loads(out.read_text())
    assert len(report["steps"]) == 2 and report["base"] == "one two three four five six"


def test_staircase_bad_spec_exits_2(tmp_path):
    spec = tmp_path / "spec.json"
    spec.write_text('{"steps": [{"kind": "replace", "at": 99}]}')
    assert run_cli("staircase", "--spec", spec) == 2


def test_rates_empty_corpus(tmp_path, capsys):
    hyp = write(tmp_path, "h.txt", [])
    ref = write(tmp_path, "r.txt", [])
    assert run_cli("rates", "--hyp", hyp, "--ref", ref) == 0
    assert json.loads(capsys.readouterr().out)["weighted_wordcount"] == "0"


def test_rates_with_table(tmp_path, capsys):
    hyp = write(tmp_path, "h.txt", ["a b c d", "w x y z"])
    ref = write(tmp_path, "r.txt", ["a b c d", "a b c d"])
    table = tmp_path / "t.json"
    table.write_text(json.dumps({"base_rate": "0.5", "bands": [{"min_similarity": "1", "multiplier": "0"}, {"min_similarity": "0", "multiplier": "1"}]}))
    assert run_cli("rates", "--hyp", hyp, "--ref", ref, "--table", table, "--similarity-from", "ter") == 0
    report = json.loads(capsys.readouterr().out)
    assert report["weighted_wordcount"] == "4"
    assert report["cost"] == "2.0"


def test_rates_bad_table_exits_2(tmp_path, corpus):
    hyp, ref = corpus
    table = tmp_path / "t.json"
    table.write_text('{"bands": [{"min_similarity": "0.5", "multiplier": "1"}]}')
    assert run_cli("rates", "--hyp", hyp, "--ref", ref, "--table", table) == 2


def _compare_files(tmp_path, log, source, target):
    return (
        write(tmp_path, "log.txt", log),
        write(tmp_path, "src.txt", [source]),
        write(tmp_path, "tgt.txt", [target]),
    )


def test_compare_self(tmp_path, capsys):
    log, src, tgt = _compare_files(tmp_path, ["REPLACE [1,2) dog", "INSERT [6,6) today"], "the cat sat on the mat", "the dog sat on the mat today")
    assert run_cli("compare", "--log", log, "--source", src, "--target", tgt) == 0
    report = json.loads(capsys.readouterr().out)["report"]
    for info in report["categories"].values():
        assert info["precision"] == 1.0 and info["recall"] == 1.0


def test_compare_bad_log_exits_2(tmp_path):
    log, src, tgt = _compare_files(tmp_path, ["DELETE [0,1)"], "a b", "a b")
    assert run_cli("compare", "--log", log, "--source", src, "--target", tgt) == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "editlens", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and "editlens" in proc.stdout
