import json
import subprocess
import sys

import numpy as np
import pytest

from photonmesh.cli import main


def read_jsonl(path):
    return [json.loads(line) for line in path.read_text().splitlines()]


def strip_timing(rows):
    out = []
    for r in rows:
        out.append({k: v for k, v in r.items() if k not in ("secs", "peak_mem_bytes")})
    return out


def test_verify_single_configuration(capsys):
    assert main(["verify", "--ni", "8", "--nl", "8", "--seed", "7"]) == 0
    out = capsys.readouterr().out
    assert "oracle-equivalence" in out and "[PASS]" in out
    assert "kind=fldzhyan ni=8 nl=8 seed=7" in out


def test_verify_corrupt_phases_fails(capsys):
    assert main(["verify", "--ni", "4", "--nl", "4", "--corrupt-phases"]) == 1
    out = capsys.readouterr().out
    assert "[FAIL]" in out and "first failure" in out


def test_verify_dump_topology(capsys):
    assert main(["verify", "--dump-topology", "--ni", "4", "--nl", "4"]) == 0
    out = capsys.readouterr().out
    assert out.splitlines()[0] == "mesh fldzhyan ni=4 nl=4"
    assert out.splitlines()[1] == "B(0,0) B(0,1)"
    assert out.splitlines()[2] == "- B(1,0) -"


def test_verify_dump_matrix_parses(capsys):
    assert main(["verify", "--dump-matrix", "--ni", "3", "--nl", "2", "--kind", "clements"]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    m = np.array([[complex(tok) for tok in line.split(",")] for line in lines])
    assert m.shape == (3, 3)
    assert np.max(np.abs((m.conj().T @ m) - np.eye(3))) < 1e-12


def test_bench_writes_pinned_csv(tmp_path, capsys):
    out = tmp_path / "bench.csv"
    code = main(
        [
            "bench",
            "--scenario",
            "mesh",
            "--sizes",
            "8",
            "16",
            "--batch",
            "4",
            "--samples",
            "8",
            "--out",
            str(out),
        ]
    )
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "scenario,engine,ni,nl,batch,secs,peak_bytes"
    rows = [line.split(",") for line in lines[1:]]
    assert {r[0] for r in rows} == {"mesh"}
    assert {r[1] for r in rows} == {"sliced", "dense"}
    assert {r[2] for r in rows} == {"8", "16"}
    for r in rows:
        assert float(r[5]) > 0 and int(r[6]) > 0


def test_bench_dense_cap_excludes_large_sizes(tmp_path):
    out = tmp_path / "bench.csv"
    main(
        [
            "bench",
            "--scenario",
            "mesh",
            "--sizes",
            "8",
            "32",
            "--dense-cap",
            "16",
            "--batch",
            "4",
            "--samples",
            "4",
            "--out",
            str(out),
        ]
    )
    rows = [line.split(",") for line in out.read_text().splitlines()[1:]]
    dense_sizes = {r[2] for r in rows if r[1] == "dense"}
    assert dense_sizes == {"8"}


def test_train_iris_writes_metrics_and_summary(tmp_path, capsys):
    metrics = tmp_path / "m.jsonl"
    code = main(
        [
            "train",
            "--dataset",
            "iris",
            "--mesh",
            "fldzhyan",
            "--epochs",
            "3",
            "--runs",
            "2",
            "--seed",
            "5",
            "--metrics",
            str(metrics),
        ]
    )
    assert code == 0
    run0 = read_jsonl(tmp_path / "m.run0.jsonl")
    run1 = read_jsonl(tmp_path / "m.run1.jsonl")
    assert run0[0]["dataset"] == "iris" and "dataset_seed" in run0[0]
    assert run0[0]["run_seed"] == 5 and run1[0]["run_seed"] == 6
    assert [r["epoch"] for r in run0[1:]] == [0, 1, 2]
    assert set(run0[1]) == {"epoch", "train_loss", "val_acc", "secs", "peak_mem_bytes"}
    summary = read_jsonl(tmp_path / "m.summary.jsonl")
    assert summary[0]["runs"] == 2 and summary[0]["seeds"] == [5, 6]
    per_epoch = summary[1:-1]
    assert len(per_epoch) == 3
    assert {"train_loss_mean", "val_acc_min", "val_acc_max"} <= set(per_epoch[0])
    assert "test_acc_mean" in summary[-1]


def test_train_is_reproducible_modulo_timing(tmp_path):
    args = [
        "train",
        "--dataset",
        "iris",
        "--mesh",
        "clements",
        "--epochs",
        "2",
        "--seed",
        "1",
    ]
    a = tmp_path / "a.jsonl"
    b = tmp_path / "b.jsonl"
    assert main(args + ["--metrics", str(a)]) == 0
    assert main(args + ["--metrics", str(b)]) == 0
    assert strip_timing(read_jsonl(a)) == strip_timing(read_jsonl(b))


def test_train_save_load_eval(tmp_path, capsys):
    ckpt = tmp_path / "model.json"
    metrics = tmp_path / "m.jsonl"
    assert (
        main(
            [
                "train",
                "--dataset",
                "iris",
                "--epochs",
                "2",
                "--metrics",
                str(metrics),
                "--save",
                str(ckpt),
            ]
        )
        == 0
    )
    assert ckpt.exists()
    capsys.readouterr()
    assert (
        main(
            [
                "train",
                "--dataset",
                "iris",
                "--load",
                str(ckpt),
                "--eval-only",
                "--metrics",
                str(tmp_path / "unused.jsonl"),
            ]
        )
        == 0
    )
    out = capsys.readouterr().out
    assert "val_acc=" in out and "test_acc=" in out


def test_train_ni_mismatch_is_usage_error(tmp_path):
    assert (
        main(
            [
                "train",
                "--dataset",
                "iris",
                "--ni",
                "8",
                "--metrics",
                str(tmp_path / "m.jsonl"),
            ]
        )
        == 2
    )


def test_unknown_dataset_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["train", "--dataset", "nonsense"])
    assert exc.value.code == 2


def test_console_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "photonmesh.cli", "verify", "--dump-topology", "--ni", "2"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.startswith("mesh fldzhyan ni=2 nl=2")
