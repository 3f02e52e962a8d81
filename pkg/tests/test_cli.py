"""End-to-end subcommand flows, exit codes, and idempotence."""
import hashlib
import json
import os

import numpy as np
import pytest

from rejopt.cli import main
from rejopt.scores import ScoreSet, write_scoreset, write_thresholds, ThresholdVector
from rejopt.randomness import ViabilityMethod


def sha(path):
    with open(path, "rb") as fh:
        return hashlib.sha256(fh.read()).hexdigest()


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture()
def dataset(tmp_path):
    out = tmp_path / "data"
    assert run("synth", "--preset", "synthetic4", "--seed", 7, "--counts", "60,60,120", "--out", out) == 0
    return out


def test_synth_writes_partitions_and_masks(dataset):
    names = sorted(p.name for p in dataset.iterdir())
    assert names == ["spec.json", "test.csv", "test.mask.csv", "train.csv", "val.csv", "val.mask.csv"]


def test_synth_is_deterministic(dataset, tmp_path):
    again = tmp_path / "again"
    assert run("synth", "--preset", "synthetic4", "--seed", 7, "--counts", "60,60,120", "--out", again) == 0
    for name in ("train.csv", "val.csv", "test.csv", "val.mask.csv", "spec.json"):
        assert sha(dataset / name) == sha(again / name)
    other = tmp_path / "other"
    assert run("synth", "--preset", "synthetic4", "--seed", 8, "--counts", "60,60,120", "--out", other) == 0
    assert sha(dataset / "train.csv") != sha(other / "train.csv")


def test_synth_unknown_preset_lists_choices(tmp_path, capsys):
    assert run("synth", "--preset", "synthetic99", "--out", tmp_path) == 2
    err = capsys.readouterr().err
    assert "synthetic1" in err and "synthetic8" in err


def test_synth_env_default_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("REJOPT_DATA_DIR", str(tmp_path / "envout"))
    assert run("synth", "--preset", "synthetic1", "--counts", "10,10,10") == 0
    assert (tmp_path / "envout" / "train.csv").exists()
    monkeypatch.delenv("REJOPT_DATA_DIR")
    assert run("synth", "--preset", "synthetic1", "--counts", "10,10,10") == 2


def test_synth_from_spec_file(tmp_path):
    spec_path = tmp_path / "myspec.json"
    spec_path.write_text(
        json.dumps(
            {
                "name": "pair",
                "per_class_counts": [12, 10, 10],
                "classes": [
                    {"weight": 1.0, "shape": {"kind": "uniform_rect", "x_min": 0, "x_max": 1, "y_min": 0, "y_max": 1}},
                    {"weight": 1.0, "shape": {"kind": "uniform_rect", "x_min": 0.75, "x_max": 1.75, "y_min": 0, "y_max": 1}},
                ],
            }
        )
    )
    out = tmp_path / "custom"
    assert run("synth", "--spec", spec_path, "--seed", 3, "--out", out) == 0
    assert (out / "val.mask.csv").exists()
    bad = tmp_path / "bad.json"
    bad.write_text("{\"classes\": []}")
    assert run("synth", "--spec", bad, "--out", out) == 3


# Gaps chosen so the class-0 slice is already NLL-stationary at temperature
# one; the learner then sees confidences (.99 T, .97 T, .6 F, .579 T, .52 F)
# and the best viable cut is at the 0.6 mistake.
WORKED_GAPS = [4.595119850134589, 3.4760986898352724, 0.4054651081081642,
               0.32014847146602043, 0.08004270767353656]
WORKED_LABELS = [0, 0, 1, 0, 1]


def write_worked_csv(path):
    ss = ScoreSet(
        class_count=2,
        ids=tuple(f"r{i}" for i in range(5)),
        labels=np.array(WORKED_LABELS, dtype=np.int64),
        logits=np.array([[g, 0.0] for g in WORKED_GAPS]),
    )
    write_scoreset(ss, str(path))


def test_learn_worked_example(tmp_path, capsys):
    csv = tmp_path / "five.csv"
    write_worked_csv(csv)
    out = tmp_path / "tv.json"
    assert run("learn", "--val", csv, "--delta", "0.05", "--out", out) == 0
    payload = json.loads(out.read_text())
    assert payload["thresholds"][0] == pytest.approx(0.6, abs=1e-12)
    assert payload["thresholds"][1] == 0.0
    assert payload["temperatures"] == [1.0, 1.0]
    table = capsys.readouterr().out
    assert "viable" in table and "0.600000" in table


def test_learn_perfect_classifier_all_zero(tmp_path):
    ss = ScoreSet(
        class_count=2,
        ids=("a", "b", "c", "d"),
        labels=np.array([0, 1, 0, 1]),
        logits=np.array([[4.0, 0.0], [0.0, 4.0], [3.0, 0.0], [0.0, 3.0]]),
    )
    csv = tmp_path / "perfect.csv"
    write_scoreset(ss, str(csv))
    out = tmp_path / "tv.json"
    assert run("learn", "--val", csv, "--out", out) == 0
    assert json.loads(out.read_text())["thresholds"] == [0.0, 0.0]


def test_learn_flag_and_data_errors(tmp_path, capsys):
    csv = tmp_path / "five.csv"
    write_worked_csv(csv)
    assert run("learn", "--val", tmp_path / "nope.csv", "--out", tmp_path / "t.json") == 2
    assert run("learn", "--val", csv, "--delta", "1.5", "--out", tmp_path / "t.json") == 2
    bad = tmp_path / "bad.csv"
    bad.write_text("id,label,logit_0,logit_1\nr0,0,oops,1.0\n")
    assert run("learn", "--val", bad, "--out", tmp_path / "t.json") == 3
    assert "row 1" in capsys.readouterr().err


def learn_eval_paths(dataset, tmp_path, *eval_extra):
    tv = tmp_path / "tv.json"
    assert run("learn", "--val", dataset / "val.csv", "--out", tv) == 0
    report = tmp_path / "report.json"
    code = run(
        "eval", "--scores", dataset / "test.csv", "--thresholds", tv,
        "--mask", dataset / "test.mask.csv", "--report", report,
        "--no-timestamp", *eval_extra,
    )
    return code, tv, report


def test_eval_report_fields(dataset, tmp_path):
    code, _, report = learn_eval_paths(dataset, tmp_path)
    assert code == 0
    payload = json.loads(report.read_text())
    assert set(payload) == {
        "counts", "accuracy", "coverage", "select_accuracy",
        "reject_accuracy", "ida", "reject_tally", "per_class",
    }
    assert payload["counts"]["total"] == 480
    assert payload["counts"]["selected"] + payload["counts"]["rejected"] == 480
    assert payload["ida"] is not None
    assert len(payload["per_class"]) == 4


def test_eval_idempotent_without_timestamp(dataset, tmp_path):
    code, tv, report = learn_eval_paths(dataset, tmp_path)
    first = sha(report)
    code, _, report = learn_eval_paths(dataset, tmp_path)
    assert sha(report) == first
    timed = tmp_path / "timed.json"
    assert run("eval", "--scores", dataset / "test.csv", "--thresholds", tv, "--report", timed) == 0
    assert "generated_at" in json.loads(timed.read_text())


def test_eval_base_thresholds_full_coverage(dataset, tmp_path):
    base = ThresholdVector(
        class_count=4, delta=0.5, method=ViabilityMethod.BCDF,
        temperatures=(1.0,) * 4, thresholds=(0.0,) * 4,
    )
    tv_path = tmp_path / "base.json"
    write_thresholds(base, str(tv_path))
    report = tmp_path / "base_report.json"
    assert run("eval", "--scores", dataset / "test.csv", "--thresholds", tv_path,
               "--report", report, "--no-timestamp") == 0
    payload = json.loads(report.read_text())
    assert payload["coverage"] == 1.0
    assert payload["select_accuracy"] == payload["accuracy"]


def test_eval_class_count_mismatch(dataset, tmp_path, capsys):
    wrong = ThresholdVector(
        class_count=3, delta=0.05, method=ViabilityMethod.BCDF,
        temperatures=(1.0,) * 3, thresholds=(0.0,) * 3,
    )
    tv_path = tmp_path / "wrong.json"
    write_thresholds(wrong, str(tv_path))
    assert run("eval", "--scores", dataset / "test.csv", "--thresholds", tv_path,
               "--report", tmp_path / "r.json") == 3
    assert "classes" in capsys.readouterr().err


def test_eval_svg_output(dataset, tmp_path):
    code, _, _ = learn_eval_paths(dataset, tmp_path, "--svg", tmp_path / "plot.svg")
    assert code == 0
    svg = (tmp_path / "plot.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<circle") == 480
    report = json.loads((tmp_path / "report.json").read_text())
    assert svg.count('fill="#000000"') == report["counts"]["rejected"]


def test_eval_svg_requires_coords(tmp_path, capsys):
    csv = tmp_path / "flat.csv"
    write_worked_csv(csv)
    tv = tmp_path / "tv.json"
    assert run("learn", "--val", csv, "--out", tv) == 0
    assert run("eval", "--scores", csv, "--thresholds", tv,
               "--report", tmp_path / "r.json", "--svg", tmp_path / "p.svg") == 3
    assert "x,y" in capsys.readouterr().err


def test_eval_per_class_csv(dataset, tmp_path):
    code, _, _ = learn_eval_paths(dataset, tmp_path, "--per-class", tmp_path / "pc.csv")
    assert code == 0
    lines = (tmp_path / "pc.csv").read_text().splitlines()
    assert lines[0] == "class_index,predicted_count,coverage,select_accuracy,reject_count,reject_correct"
    assert len(lines) == 5


def test_sweep_grid_and_baselines(dataset, tmp_path, capsys):
    out = tmp_path / "sweep"
    assert run("sweep", "--val", dataset / "val.csv", "--test", dataset / "test.csv",
               "--out", out, "--no-timestamp") == 0
    payload = json.loads((out / "sweep.json").read_text())
    rows = payload["rows"]
    labels = [r["method"] for r in rows[:3]]
    assert labels == ["base", "naive_0.5", "naive_0.5_cal"]
    assert rows[0]["val_coverage"] == 1.0 and rows[0]["delta"] is None
    grid = [r for r in rows if r["delta"] is not None]
    assert len(grid) == 25
    # Select accuracy never increases and coverage never decreases in delta.
    bcdf = [r for r in grid if r["method"] == "bcdf"]
    deltas = [r["delta"] for r in bcdf]
    assert deltas == sorted(deltas)
    sas = [1.0 if r["val_select_accuracy"] is None else r["val_select_accuracy"] for r in bcdf]
    assert all(a >= b - 1e-12 for a, b in zip(sas, sas[1:]))
    covs = [r["val_coverage"] for r in bcdf]
    assert all(a <= b + 1e-12 for a, b in zip(covs, covs[1:]))
    # CSV mirrors the JSON rows and carries the match column.
    lines = (out / "sweep.csv").read_text().splitlines()
    assert len(lines) == 1 + len(rows)
    assert lines[0].endswith("match_bcdf")
    assert "all CI methods matched" in capsys.readouterr().out or payload["mismatches"]


def test_sweep_idempotent(dataset, tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run("sweep", "--val", dataset / "val.csv", "--test", dataset / "test.csv",
                   "--out", out, "--deltas", "0.05,0.5", "--methods", "bcdf,wilson_nocc",
                   "--jobs", "3", "--no-timestamp") == 0
    assert sha(a / "sweep.csv") == sha(b / "sweep.csv")
    assert sha(a / "sweep.json") == sha(b / "sweep.json")


def test_sweep_flag_errors(dataset, tmp_path):
    assert run("sweep", "--val", dataset / "val.csv", "--test", dataset / "test.csv",
               "--out", tmp_path, "--methods", "") == 2
    assert run("sweep", "--val", dataset / "val.csv", "--test", dataset / "test.csv",
               "--out", tmp_path, "--methods", "bcdf,quantum") == 2
    assert run("sweep", "--val", dataset / "val.csv", "--test", dataset / "test.csv",
               "--out", tmp_path, "--deltas", "0.05,2.0") == 2


def test_sweep_class_count_mismatch(dataset, tmp_path, capsys):
    pair = tmp_path / "pair.csv"
    write_worked_csv(pair)
    assert run("sweep", "--val", dataset / "val.csv", "--test", pair, "--out", tmp_path / "s") == 3
    assert "class counts differ" in capsys.readouterr().err


def test_no_subcommand_is_usage_error(capsys):
    assert run() == 2
    capsys.readouterr()
