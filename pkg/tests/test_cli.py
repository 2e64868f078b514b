import json

import pytest

from escherpos.cli import main
from escherpos.coeffs import read_coefficient_dataset

pytestmark = pytest.mark.filterwarnings("ignore::DeprecationWarning")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


def test_generate_writes_files_idempotently(tmp_path, capsys):
    out = tmp_path / "data"
    code, _ = run(capsys, "generate", "--n", 4, "--lambda", "2,2", "--out", out)
    assert code == 0
    uio_lines = (out / "uios_n4.txt").read_text().splitlines()
    assert len(uio_lines) == 14
    _, data = read_coefficient_dataset(out / "coeffs_n4.tsv")
    assert sum(data[(2, 2)]) == 12
    snapshot = {p.name: p.read_bytes() for p in out.iterdir()}
    run(capsys, "generate", "--n", 4, "--lambda", "2,2", "--out", out)
    assert {p.name: p.read_bytes() for p in out.iterdir()} == snapshot


def test_generate_without_lambdas_covers_dataset(tmp_path, capsys):
    out = tmp_path / "d"
    run(capsys, "generate", "--n", 3, "--out", out)
    _, data = read_coefficient_dataset(out / "coeffs_n3.tsv")
    assert set(data) == {(1,), (2,), (1, 1), (3,), (2, 1), (1, 1, 1)}


def test_evaluate_prints_both_conventions(tmp_path, capsys):
    code, res = run(capsys, "evaluate", "--model", "triple-canonical", "--lambda", "3,2,1", "--n", 6, "--out", tmp_path, "--compute")
    assert code == 0
    assert "error=5/286 correct=129/132 bound=over" in res.out


def test_evaluate_needs_data(tmp_path, capsys):
    code, res = run(capsys, "evaluate", "--model", "pair-canonical", "--lambda", "2,2", "--n", 4, "--out", tmp_path)
    assert code == 2 and "error:" in res.err


def test_expect_file(tmp_path, capsys):
    good = tmp_path / "good.csv"
    good.write_text('lambda,n,error,correct,bound\n"2,2",4,0/12,14/14,exact\n')
    args = ["evaluate", "--model", "pair-canonical", "--lambda", "2,2", "--n", 4, "--out", tmp_path, "--compute"]
    code, res = run(capsys, *args, "--expect", good)
    assert code == 0 and "all expected cells match" in res.out
    bad = tmp_path / "bad.csv"
    bad.write_text('lambda,n,error,correct,bound\n"2,2",4,1/12,,\n')
    code, res = run(capsys, *args, "--expect", bad)
    assert code == 1 and "MISMATCH" in res.out


def test_model_arity_mismatch(tmp_path, capsys):
    code, res = run(capsys, "evaluate", "--model", "pair-canonical", "--lambda", "2,1,1", "--n", 4, "--out", tmp_path, "--compute")
    assert code == 2


def test_report_triple_lower(tmp_path, capsys):
    code, res = run(capsys, "report", "--model", "triple-lower", "--n", 5, "--out", tmp_path, "--compute")
    assert code == 0
    csv_lines = (tmp_path / "report_triple-lower_n5.csv").read_text().splitlines()
    assert csv_lines[0] == "lambda,n,error,correct,bound"
    assert '"2,1,1",4,4/16,12/14,under' in csv_lines
    assert all(not line.endswith(("over", "mixed")) for line in csv_lines)
    assert (tmp_path / "report_triple-lower_n5.txt").read_text() == res.out


def test_file_model(tmp_path, capsys):
    graph = tmp_path / "g.txt"
    graph.write_text("lambda 2,2\narity 2\nrows 1\nedge 0 2 3 LESS\n")
    code, res = run(capsys, "evaluate", "--model", f"file:{graph}", "--lambda", "2,2", "--n", 4, "--out", tmp_path, "--compute")
    assert code == 0 and "error=0/12" in res.out


def test_train_smoke_is_deterministic(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"lam": "3,3", "n": 5, "generations": 4, "batch_size": 20, "hidden": [8]}))
    histories = []
    for sub in ("a", "b"):
        out = tmp_path / sub
        code, _ = run(capsys, "train", "--config", cfg, "--seed", 7, "--compute", "--out", out)
        assert code == 0
        assert (out / "train_3-3_n5_seed7_graph.txt").exists()
        histories.append((out / "train_3-3_n5_seed7_history.csv").read_bytes())
    assert histories[0] == histories[1]
    assert len(histories[0].decode().splitlines()) == 5


def test_train_score_mode_flag(tmp_path, capsys):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"lam": "2,1,1", "n": 4, "generations": 2, "batch_size": 20, "hidden": [8]}))
    code, res = run(capsys, "train", "--config", cfg, "--score-mode", "lower-bound", "--edge-penalty", "0.25", "--compute", "--out", tmp_path)
    assert code == 0
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"lam": "2,1,1", "n": 4, "batch_size": 2}))
    code, res = run(capsys, "train", "--config", bad, "--compute", "--out", tmp_path)
    assert code == 2 and "batch_size" in res.err
