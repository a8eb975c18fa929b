from __future__ import annotations

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from metamut.cli import main
from metamut.ingest import Dataset, load_dataset
from metamut.llm import ModelSpec
from metamut.metrics import read_records
from metamut.mutation import MutationOperator
from metamut.runner import RunConfig, run

from conftest import make_mock_script


def write_tasks(path: Path, tasks) -> Path:
    path.write_text(
        "\n".join(json.dumps(t.to_record()) for t in tasks) + "\n", encoding="utf-8"
    )
    return path


@pytest.fixture()
def scripted(tmp_path: Path, corpus) -> tuple[Path, Path]:
    """A 40-task dataset file plus a mock model script covering it."""
    script_path, tasks = make_mock_script(tmp_path / "script.jsonl", corpus)
    dataset_path = write_tasks(tmp_path / "tasks.jsonl", tasks)
    return dataset_path, script_path


def make_config(dataset_path: Path, script_path: Path, out_dir: Path) -> RunConfig:
    return RunConfig(
        dataset=load_dataset(dataset_path, name="mini40"),
        model=ModelSpec(name="mock", backend="mock", script_path=str(script_path)),
        operator_lists=[[MutationOperator.SEQUENTIAL_RENAME]],
        out_dir=out_dir,
    )


def test_run_end_to_end_counts(tmp_path: Path, scripted) -> None:
    dataset_path, script_path = scripted
    result = run(make_config(dataset_path, script_path, tmp_path / "out"))
    assert not result.harness_failures
    assert len(result.records) == 40
    report = result.report
    assert report.n_inconsistent == 10
    assert report.kind_counts == {
        "consistent": 30,
        "correctness_based": 6,
        "incorrectness_based": 3,
        "invalidity_based": 1,
    }
    assert report.directions == {
        "incorrect": {"og": 3, "mut": 9},
        "invalid": {"og": 0, "mut": 1},
    }
    from metamut.metrics import render_percent

    assert render_percent(report.rate) == "25.00"


def test_run_writes_artifacts(tmp_path: Path, scripted) -> None:
    dataset_path, script_path = scripted
    out = tmp_path / "out"
    run(make_config(dataset_path, script_path, out))
    for name in (
        "records.jsonl",
        "report.json",
        "report.csv",
        "report.md",
        "consistency_kinds.png",
        "inconsistency_by_slice.png",
    ):
        assert (out / name).exists(), name
    assert len(read_records(out / "records.jsonl")) == 40


def test_run_report_is_byte_identical_across_runs(tmp_path: Path, scripted) -> None:
    dataset_path, script_path = scripted
    out_a, out_b = tmp_path / "a", tmp_path / "b"
    run(make_config(dataset_path, script_path, out_a))
    run(make_config(dataset_path, script_path, out_b))
    assert (out_a / "report.json").read_bytes() == (out_b / "report.json").read_bytes()
    assert (
        out_a / "records.jsonl"
    ).read_bytes() == (out_b / "records.jsonl").read_bytes()


def test_run_confidence_threshold_drops_pairs(tmp_path: Path, scripted) -> None:
    dataset_path, script_path = scripted
    config = make_config(dataset_path, script_path, tmp_path / "out")
    config.confidence_threshold = 0.9
    result = run(config)
    dropped = result.skipped["confidence_dropped"]
    assert dropped > 0
    assert result.report.n_test_cases == 40 - dropped


def test_run_skips_inapplicable_operators(tmp_path: Path, scripted) -> None:
    dataset_path, script_path = scripted
    config = make_config(dataset_path, script_path, tmp_path / "out")
    # Not every program has a for loop, so some pairs never materialize.
    config.operator_lists = [[MutationOperator.FOR_TO_WHILE]]
    result = run(config)
    assert result.skipped.get("not_applicable", 0) > 0
    assert len(result.records) + result.skipped["not_applicable"] == 40


# --------------------------------------------------------------------------
# CLI
# --------------------------------------------------------------------------


PROGRAM = "def f(x):\n    if x and x > 0:\n        return True\n    return False\n"


def test_cli_mutate_writes_output(tmp_path: Path) -> None:
    source = tmp_path / "prog.py"
    source.write_text(PROGRAM, encoding="utf-8")
    out = tmp_path / "mutated.py"
    result = CliRunner().invoke(
        main,
        ["mutate", "--in", str(source), "--op", "demorgan", "--out", str(out)],
    )
    assert result.exit_code == 0, result.output
    assert "not (not x or not x > 0)" in out.read_text(encoding="utf-8")


def test_cli_mutate_not_applicable_exits_nonzero(tmp_path: Path) -> None:
    source = tmp_path / "prog.py"
    source.write_text("def f(x):\n    return x\n", encoding="utf-8")
    result = CliRunner().invoke(
        main, ["mutate", "--in", str(source), "--op", "for_to_while"]
    )
    assert result.exit_code == 1


def test_cli_mutate_emits_trace(tmp_path: Path) -> None:
    source = tmp_path / "prog.py"
    source.write_text(PROGRAM, encoding="utf-8")
    out = tmp_path / "mutated.py"
    result = CliRunner().invoke(
        main,
        ["mutate", "--in", str(source), "--op", "boolean_literal", "--out", str(out)],
    )
    assert result.exit_code == 0
    trace = json.loads(result.output.strip().splitlines()[-1])
    assert trace["applied"] is True
    assert trace["operators"] == [{"operator": "boolean_literal", "sites": 2}]


def test_cli_ingest_reports_counts(tmp_path: Path, corpus) -> None:
    path = write_tasks(tmp_path / "tasks.jsonl", corpus.tasks[:3])
    result = CliRunner().invoke(main, ["ingest", "--path", str(path)])
    assert result.exit_code == 0
    assert "loaded 3 task(s), skipped 0" in result.output


def test_cli_run_and_report(tmp_path: Path, scripted) -> None:
    dataset_path, script_path = scripted
    out = tmp_path / "out"
    runner = CliRunner()
    result = runner.invoke(
        main,
        [
            "run",
            "--dataset", str(dataset_path),
            "--model", "mock",
            "--mock-script", str(script_path),
            "--ops", "sequential",
            "--out", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    assert "pairs: 40, inconsistent: 10" in result.output
    assert (out / "report.json").exists()

    report_dir = tmp_path / "re"
    result = runner.invoke(
        main,
        ["report", "--run", str(out), "--by", "task_type", "--out", str(report_dir)],
    )
    assert result.exit_code == 0, result.output
    payload = json.loads((report_dir / "report.json").read_text(encoding="utf-8"))
    assert payload["group_by"] == ["task_type"]
    assert payload["n_test_cases"] == 40


def test_cli_version() -> None:
    result = CliRunner().invoke(main, ["--version"])
    assert result.exit_code == 0
