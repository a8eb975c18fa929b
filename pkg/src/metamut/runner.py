"""End-to-end run orchestration.

For each validated task and operator list: mutate, verify equivalence,
query the model on both variants, grade both answers, classify the pair,
and append a PairRecord.  Results persist as append-only JSONL plus the
aggregated report.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from metamut.executor import InProcessExecutor, split_assertions
from metamut.ingest import Dataset, Task, TaskType, validate_task
from metamut.llm import Gateway, ModelSpec, ResponseCache
from metamut.metrics import PairRecord, RunReport, aggregate, emit_report, write_records
from metamut.mutation import (
    MutationOperator,
    SubjectProgram,
    compose,
    verify_equivalence,
)
from metamut.oracles import (
    distance_from_sets,
    judge_consistency,
    judge_correctness,
)
from metamut.prompts import build_prompt


@dataclass
class RunConfig:
    dataset: Dataset
    model: ModelSpec
    operator_lists: Sequence[Sequence[MutationOperator]]
    seed: int = 0
    out_dir: str | Path | None = None
    prompt_config: str = "zero_shot"
    confidence_threshold: float | None = None
    timeout_s: float = 3.0
    group_by: Sequence[str] = ("operator",)
    figures: bool = True


@dataclass
class RunResult:
    records: list[PairRecord] = field(default_factory=list)
    report: RunReport | None = None
    skipped: dict[str, int] = field(default_factory=dict)
    harness_failures: list[str] = field(default_factory=list)

    def bump(self, reason: str) -> None:
        self.skipped[reason] = self.skipped.get(reason, 0) + 1


def _category_label(operators: Sequence[MutationOperator]) -> str:
    categories = {op.category.value for op in operators}
    return categories.pop() if len(categories) == 1 else "mixed"


def _verification_material(task: Task) -> tuple[list[str], list[str]]:
    """(inputs, tests) used for differential equivalence checking."""
    if task.task_type is TaskType.CODE_GENERATION:
        return [], split_assertions(task.test or "")
    if task.input is not None:
        return [task.input], []
    return [], []


def run(config: RunConfig) -> RunResult:
    result = RunResult()
    executor = InProcessExecutor(timeout_s=config.timeout_s)
    cache = (
        ResponseCache(Path(config.out_dir) / "cache") if config.out_dir else None
    )
    gateway = Gateway(model=config.model, cache=cache)

    for task in config.dataset.tasks:
        if task.code is None:
            result.bump("no_program")
            continue
        reason = validate_task(task, executor)
        if reason is not None:
            result.bump("validation_failed")
            continue
        program = task.subject_program()
        inputs, tests = _verification_material(task)

        for operators in config.operator_lists:
            operators = list(operators)
            outcome = compose(program, operators, config.seed)
            if not outcome.applied:
                result.bump("not_applicable")
                continue
            equivalence = verify_equivalence(
                program, outcome, inputs=inputs, tests=tests, executor=executor
            )
            if not equivalence.equivalent:
                if MutationOperator.COMMUTATIVE_REORDER in operators:
                    result.bump("verification_rejected")
                else:
                    result.bump("verification_failed")
                    result.harness_failures.append(
                        f"{task.task_id}: non-equivalent mutant from "
                        f"{[op.value for op in operators]}: {equivalence.mismatches[:3]}"
                    )
                continue

            record = _evaluate_pair(
                task, outcome, operators, config, gateway, executor
            )
            result.records.append(record)

    records = result.records
    if config.confidence_threshold is not None:
        from metamut.metrics import confidence_filter

        filtered = confidence_filter(records, config.confidence_threshold)
        records = filtered.retained + filtered.unscored
        result.skipped["confidence_dropped"] = len(filtered.dropped)

    if records:
        result.report = aggregate(
            records, group_by=config.group_by, skipped=result.skipped
        )
    else:
        result.report = aggregate([], skipped=result.skipped)

    if config.out_dir:
        out_dir = Path(config.out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        write_records(result.records, out_dir / "records.jsonl")
        emit_report(result.report, out_dir, figures=config.figures)
    return result


def _evaluate_pair(
    task: Task,
    outcome,
    operators: Sequence[MutationOperator],
    config: RunConfig,
    gateway: Gateway,
    executor: InProcessExecutor,
) -> PairRecord:
    og_prompt = build_prompt(task, config=config.prompt_config)
    mut_prompt = build_prompt(
        _mutated_view(task, outcome), config=config.prompt_config
    )
    og_answer = gateway.query(
        og_prompt, task.task_type, task_id=task.task_id, variant="original"
    )
    mut_answer = gateway.query(
        mut_prompt, task.task_type, task_id=task.task_id, variant="mutated"
    )
    og_verdict = judge_correctness(task, og_answer.extracted, executor)
    mut_verdict = judge_correctness(
        task,
        mut_answer.extracted,
        executor,
        code_override_entry=outcome.entry_point,
    )
    consistency = judge_consistency(og_verdict, mut_verdict)

    distance = None
    test_count = None
    if (
        og_verdict.passed_set is not None
        and mut_verdict.passed_set is not None
        and og_verdict.test_count
        and og_verdict.test_count == mut_verdict.test_count
    ):
        record = distance_from_sets(
            og_verdict.passed_set, mut_verdict.passed_set, og_verdict.test_count
        )
        distance = record.per_pair_distance
        test_count = record.test_count

    return PairRecord(
        task_id=task.task_id,
        dataset=config.dataset.name,
        task_type=task.task_type.value,
        model=config.model.name,
        operators=tuple(op.value for op in operators),
        category=_category_label(operators),
        og_status=og_verdict.status,
        mut_status=mut_verdict.status,
        kind=consistency.kind,
        incorrect_direction=consistency.incorrect_direction,
        invalid_direction=consistency.invalid_direction,
        distance=distance,
        test_count=test_count,
        og_confidence=og_answer.confidence,
        mut_confidence=mut_answer.confidence,
    )


def _mutated_view(task: Task, outcome) -> Task:
    """The task as the model sees it after mutation."""
    import copy

    mutated = copy.copy(task)
    mutated.code = outcome.mutated_source
    mutated.entry_point = outcome.entry_point or task.entry_point
    if task.task_type is TaskType.CODE_GENERATION:
        mutated.description = outcome.mutated_source
    return mutated
