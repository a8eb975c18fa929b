"""Command-line interface: mutate, ingest, run, report."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from metamut import __version__
from metamut.ingest import DATASET_FORMATS, load_dataset, validate_dataset
from metamut.llm import ModelSpec
from metamut.metrics import aggregate, emit_report, read_records
from metamut.mutation import MutationOperator, SubjectProgram, compose
from metamut.runner import RunConfig, run as run_pipeline

_OPERATOR_NAMES = [op.value for op in MutationOperator]


def _parse_ops(ops: tuple[str, ...]) -> list[MutationOperator]:
    return [MutationOperator.from_name(name) for name in ops]


@click.group()
@click.version_option(version=__version__)
def main() -> None:
    """Consistency testing for code LLMs via semantic-preserving mutation."""


@main.command()
@click.option("--in", "in_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--op", "ops", multiple=True, required=True, type=click.Choice(_OPERATOR_NAMES))
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--entry-point", default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), default=None)
def mutate(in_path: str, ops: tuple[str, ...], seed: int, entry_point: str | None, out_path: str | None) -> None:
    """Apply one or more operators to a source file."""
    source = Path(in_path).read_text(encoding="utf-8")
    program = SubjectProgram(source=source, entry_point=entry_point)
    outcome = compose(program, _parse_ops(ops), seed)
    trace = {
        "applied": outcome.applied,
        "operators": [
            {"operator": name, "sites": sites} for name, sites in outcome.operator_trace
        ],
        "reason": outcome.reason,
        "entry_point": outcome.entry_point,
    }
    if outcome.applied:
        if out_path:
            Path(out_path).write_text(outcome.mutated_source, encoding="utf-8")
        else:
            click.echo(outcome.mutated_source, nl=False)
    click.echo(json.dumps(trace, sort_keys=True), err=True)
    if not outcome.applied:
        sys.exit(1)


@main.command()
@click.option("--format", "fmt", default="generic_jsonl", type=click.Choice(DATASET_FORMATS), show_default=True)
@click.option("--path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--validate", "do_validate", is_flag=True, default=False)
def ingest(fmt: str, path: str, do_validate: bool) -> None:
    """Load a dataset, report malformed records, optionally validate."""
    dataset = load_dataset(path, format=fmt)
    click.echo(f"loaded {len(dataset.tasks)} task(s), skipped {len(dataset.skipped)}")
    for error in dataset.skipped:
        click.echo(f"  skipped {error.task_id}: {error.reason}", err=True)
    if do_validate:
        report = validate_dataset(dataset)
        click.echo(f"validated: {len(report.passed)} pass, {len(report.failed)} fail")
        for task_id, reason in report.failed:
            click.echo(f"  failed {task_id}: {reason}", err=True)


def _load_model_spec(spec: str, script: str | None) -> ModelSpec:
    path = Path(spec)
    if path.suffix == ".json" and path.exists():
        fields = json.loads(path.read_text(encoding="utf-8"))
        return ModelSpec(**fields)
    return ModelSpec(name=spec, backend="mock", script_path=script)


@main.command(name="run")
@click.option("--dataset", "dataset_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--format", "fmt", default="generic_jsonl", type=click.Choice(DATASET_FORMATS), show_default=True)
@click.option("--model", required=True, help="Model spec JSON file, or a mock model name.")
@click.option("--mock-script", default=None, type=click.Path(exists=True, dir_okay=False))
@click.option("--ops", default="all", show_default=True, help="Comma-separated operator names, or 'all'.")
@click.option("--second-order", is_flag=True, default=False, help="Treat --ops as one composed pipeline.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "out_dir", required=True, type=click.Path(file_okay=False))
@click.option("--confidence-threshold", type=float, default=None)
@click.option("--no-figures", is_flag=True, default=False)
def run_cmd(
    dataset_path: str,
    fmt: str,
    model: str,
    mock_script: str | None,
    ops: str,
    second_order: bool,
    seed: int,
    out_dir: str,
    confidence_threshold: float | None,
    no_figures: bool,
) -> None:
    """Run the full consistency pipeline over a dataset."""
    dataset = load_dataset(dataset_path, format=fmt)
    if ops == "all":
        operator_lists = [[op] for op in MutationOperator]
    elif second_order:
        operator_lists = [_parse_ops(tuple(ops.split(",")))]
    else:
        operator_lists = [[op] for op in _parse_ops(tuple(ops.split(",")))]
    config = RunConfig(
        dataset=dataset,
        model=_load_model_spec(model, mock_script),
        operator_lists=operator_lists,
        seed=seed,
        out_dir=out_dir,
        confidence_threshold=confidence_threshold,
        figures=not no_figures,
    )
    result = run_pipeline(config)
    report = result.report
    click.echo(
        f"pairs: {report.n_test_cases}, inconsistent: {report.n_inconsistent}, "
        f"skipped: {result.skipped}"
    )
    click.echo(f"reports written to {out_dir}")
    if result.harness_failures:
        for failure in result.harness_failures:
            click.echo(f"harness failure: {failure}", err=True)
        sys.exit(1)


@main.command()
@click.option("--run", "run_dir", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--by", default="operator", show_default=True, help="Comma-separated slice fields.")
@click.option("--format", "formats", default="json,csv,markdown", show_default=True)
@click.option("--out", "out_dir", default=None, type=click.Path(file_okay=False))
@click.option("--no-figures", is_flag=True, default=False)
def report(run_dir: str, by: str, formats: str, out_dir: str | None, no_figures: bool) -> None:
    """Re-aggregate a run's records into sliced reports and figures."""
    records = read_records(Path(run_dir) / "records.jsonl")
    group_by = tuple(f for f in by.split(",") if f)
    run_report = aggregate(records, group_by=group_by)
    target = Path(out_dir or run_dir)
    written = emit_report(
        run_report,
        target,
        formats=tuple(f for f in formats.split(",") if f),
        figures=not no_figures,
    )
    for path in written:
        click.echo(str(path))


if __name__ == "__main__":
    main()
