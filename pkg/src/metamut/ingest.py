"""Benchmark loading, validation, and I/O-pair derivation.

Datasets arrive as line-delimited JSON.  Four named formats (HumanEval,
CruxEval, CodeMMLU, BigCodeBench style) are adapters onto one generic
interchange schema with fields: task_id, task_type, code, description,
test, entry_point, input, output, options, answer.
"""

from __future__ import annotations

import ast
import enum
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

from metamut.executor import InProcessExecutor, TestStatus, split_assertions
from metamut.mutation.types import SubjectProgram
from metamut.values import NotALiteral, parse_literal, safe_equal

MCQ_LETTERS = ("A", "B", "C", "D")


class TaskType(enum.Enum):
    MCQ = "mcq"
    INPUT_PREDICTION = "input_prediction"
    OUTPUT_PREDICTION = "output_prediction"
    CODE_GENERATION = "code_generation"

    @classmethod
    def from_name(cls, name: str) -> "TaskType":
        try:
            return cls(name)
        except ValueError:
            raise FormatError("?", f"unknown task_type: {name!r}") from None


class FormatError(ValueError):
    """A malformed dataset record (task_id + reason)."""

    def __init__(self, task_id: str, reason: str) -> None:
        super().__init__(f"{task_id}: {reason}")
        self.task_id = task_id
        self.reason = reason


@dataclass
class Task:
    """One benchmark item in the generic interchange shape."""

    task_id: str
    task_type: TaskType
    code: str | None = None
    description: str | None = None
    test: str | None = None
    entry_point: str | None = None
    input: str | None = None
    output: str | None = None
    options: dict[str, str] | None = None
    answer: str | None = None

    def subject_program(self) -> SubjectProgram:
        if self.code is None:
            raise ValueError(f"{self.task_id}: task has no program source")
        return SubjectProgram(
            source=self.code,
            entry_point=self.entry_point,
            origin_task_id=self.task_id,
        )

    def canonical_answer(self) -> str | None:
        """The ground-truth answer literal / option letter, if any."""
        if self.task_type is TaskType.OUTPUT_PREDICTION and self.answer is None:
            return self.output
        return self.answer

    def to_record(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "task_id": self.task_id,
            "task_type": self.task_type.value,
        }
        for key in (
            "code",
            "description",
            "test",
            "entry_point",
            "input",
            "output",
            "options",
            "answer",
        ):
            value = getattr(self, key)
            if value is not None:
                record[key] = value
        return record


@dataclass
class Dataset:
    name: str
    tasks: list[Task] = field(default_factory=list)
    prompt_config: str = "zero_shot"
    skipped: list[FormatError] = field(default_factory=list)

    def by_id(self, task_id: str) -> Task:
        for task in self.tasks:
            if task.task_id == task_id:
                return task
        raise KeyError(task_id)


def _require(record: dict, task_id: str, *keys: str) -> None:
    for key in keys:
        if record.get(key) in (None, ""):
            raise FormatError(task_id, f"missing required field {key!r}")


def _task_from_generic(record: dict[str, Any]) -> Task:
    task_id = str(record.get("task_id") or "")
    if not task_id:
        raise FormatError("?", "missing task_id")
    task_type = TaskType.from_name(str(record.get("task_type") or ""))
    task = Task(
        task_id=task_id,
        task_type=task_type,
        code=record.get("code"),
        description=record.get("description"),
        test=record.get("test"),
        entry_point=record.get("entry_point"),
        input=record.get("input"),
        output=record.get("output"),
        options=record.get("options"),
        answer=record.get("answer"),
    )
    _validate_shape(task)
    return task


def _validate_shape(task: Task) -> None:
    tid = task.task_id
    if task.task_type is TaskType.CODE_GENERATION:
        _require(task.to_record(), tid, "code", "test", "entry_point")
        _parseable(task.code, tid, "code")
        _parseable(task.test, tid, "test")
    elif task.task_type is TaskType.OUTPUT_PREDICTION:
        _require(task.to_record(), tid, "code", "entry_point", "output")
        if task.input is None:
            raise FormatError(tid, "missing required field 'input'")
        _parseable(task.code, tid, "code")
    elif task.task_type is TaskType.INPUT_PREDICTION:
        _require(task.to_record(), tid, "code", "entry_point", "output")
        if task.input is None:
            raise FormatError(tid, "missing required field 'input'")
        _parseable(task.code, tid, "code")
    elif task.task_type is TaskType.MCQ:
        if not task.options:
            raise FormatError(tid, "mcq task has no options")
        if sorted(task.options) != list(MCQ_LETTERS):
            raise FormatError(tid, "mcq options must be exactly A-D")
        if task.answer not in MCQ_LETTERS:
            raise FormatError(tid, f"mcq answer must be one of A-D, got {task.answer!r}")


def _parseable(source: str | None, task_id: str, which: str) -> None:
    try:
        ast.parse(source or "")
    except SyntaxError as exc:
        raise FormatError(task_id, f"{which} does not parse: {exc.msg}") from exc


# --------------------------------------------------------------------------
# Format adapters onto the generic schema
# --------------------------------------------------------------------------


def _adapt_humaneval(record: dict[str, Any]) -> dict[str, Any]:
    task_id = str(record.get("task_id", "?"))
    _require(record, task_id, "prompt", "canonical_solution", "test", "entry_point")
    return {
        "task_id": task_id,
        "task_type": "code_generation",
        "code": record["prompt"] + record["canonical_solution"],
        "description": record["prompt"],
        "test": record["test"],
        "entry_point": record["entry_point"],
    }


def _adapt_cruxeval(record: dict[str, Any]) -> dict[str, Any]:
    task_id = str(record.get("id") or record.get("task_id") or "?")
    _require(record, task_id, "code", "output")
    if record.get("input") is None:
        raise FormatError(task_id, "missing required field 'input'")
    return {
        "task_id": task_id,
        "task_type": record.get("task_type", "output_prediction"),
        "code": record["code"],
        "entry_point": record.get("entry_point", "f"),
        "input": record["input"],
        "output": record["output"],
    }


def _adapt_codemmlu(record: dict[str, Any]) -> dict[str, Any]:
    task_id = str(record.get("task_id") or record.get("question_id") or "?")
    _require(record, task_id, "question", "choices", "answer")
    choices = record["choices"]
    if isinstance(choices, list):
        options = dict(zip(MCQ_LETTERS, [str(c) for c in choices]))
    else:
        options = {str(k): str(v) for k, v in dict(choices).items()}
    return {
        "task_id": task_id,
        "task_type": "mcq",
        "description": record["question"],
        "options": options,
        "answer": str(record["answer"]).strip().upper(),
    }


def _adapt_bigcodebench(record: dict[str, Any]) -> dict[str, Any]:
    task_id = str(record.get("task_id", "?"))
    _require(record, task_id, "complete_prompt", "canonical_solution", "test", "entry_point")
    return {
        "task_id": task_id,
        "task_type": "code_generation",
        "code": record["complete_prompt"] + record["canonical_solution"],
        "description": record["complete_prompt"],
        "test": record["test"],
        "entry_point": record["entry_point"],
    }


_ADAPTERS = {
    "generic_jsonl": lambda record: record,
    "humaneval_jsonl": _adapt_humaneval,
    "cruxeval_jsonl": _adapt_cruxeval,
    "codemmlu_jsonl": _adapt_codemmlu,
    "bigcodebench_jsonl": _adapt_bigcodebench,
}

DATASET_FORMATS = tuple(_ADAPTERS)


def load_dataset(
    path: str | Path, format: str = "generic_jsonl", name: str | None = None
) -> Dataset:
    """Load a JSONL dataset; malformed records are skipped and reported."""
    if format not in _ADAPTERS:
        raise ValueError(f"unknown dataset format: {format!r}")
    adapter = _ADAPTERS[format]
    path = Path(path)
    dataset = Dataset(name=name or path.stem)
    if format == "cruxeval_jsonl":
        # This source ships without exemplars, so richer shot configs
        # are not available for it.
        dataset.prompt_config = "zero_shot"
    seen: set[str] = set()
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
        except json.JSONDecodeError as exc:
            dataset.skipped.append(FormatError(f"line {lineno}", f"bad JSON: {exc.msg}"))
            continue
        try:
            task = _task_from_generic(adapter(raw))
            if task.task_id in seen:
                raise FormatError(task.task_id, "duplicate task_id")
        except FormatError as exc:
            dataset.skipped.append(exc)
            continue
        seen.add(task.task_id)
        dataset.tasks.append(task)
    return dataset


def dump_dataset(dataset: Dataset, path: str | Path) -> None:
    lines = [json.dumps(task.to_record(), sort_keys=True) for task in dataset.tasks]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


# --------------------------------------------------------------------------
# Canonical-solution validation
# --------------------------------------------------------------------------


@dataclass
class ValidationReport:
    passed: list[str] = field(default_factory=list)
    failed: list[tuple[str, str]] = field(default_factory=list)

    @property
    def passed_ids(self) -> set[str]:
        return set(self.passed)


def validate_task(task: Task, executor: InProcessExecutor) -> str | None:
    """Return a failure reason, or None when the task checks out."""
    if task.task_type is TaskType.MCQ:
        return None  # shape checks at load are the whole story
    if task.task_type is TaskType.CODE_GENERATION:
        units = split_assertions(task.test or "")
        if not units:
            return "test suite contains no assertions"
        report = executor.run_tests(task.code or "", units, task.entry_point)
        if report.all_passed:
            return None
        bad = [r.status.value for r in report.results if not r.passed]
        return f"canonical solution fails its suite ({', '.join(bad)})"
    # Prediction tasks: the program on the recorded input must reproduce
    # the recorded output.
    outcome = executor.call_entry(task.code or "", task.entry_point or "f", task.input or "")
    if outcome.status is not TestStatus.PASS:
        return f"canonical run failed: {outcome.detail}"
    try:
        expected = parse_literal(task.output or "")
    except NotALiteral:
        return "expected output is not a literal"
    if not safe_equal(outcome.value, expected):
        return f"canonical output {outcome.value!r} != expected {expected!r}"
    return None


def validate_dataset(
    dataset: Dataset, executor: InProcessExecutor | None = None
) -> ValidationReport:
    """Execute every canonical solution; failing tasks are listed."""
    executor = executor or InProcessExecutor()
    report = ValidationReport()
    for task in dataset.tasks:
        reason = validate_task(task, executor)
        if reason is None:
            report.passed.append(task.task_id)
        else:
            report.failed.append((task.task_id, reason))
    return report


# --------------------------------------------------------------------------
# Assertion → I/O-pair extraction
# --------------------------------------------------------------------------


@dataclass
class IOPair:
    input: str  # argument-list source text, e.g. "1, 'x'"
    output: str  # expected-value literal text


def _extract_pair(
    stmt: ast.Assert, entry_names: set[str]
) -> tuple[IOPair | None, str | None]:
    test = stmt.test
    if not isinstance(test, ast.Compare) or len(test.ops) != 1:
        return None, "not a single comparison"
    if not isinstance(test.ops[0], (ast.Eq, ast.Is)):
        return None, "comparison is not == or is"
    call, expected = test.left, test.comparators[0]
    if not (
        isinstance(call, ast.Call)
        and isinstance(call.func, ast.Name)
        and call.func.id in entry_names
    ):
        return None, "left side is not an entry-point call"
    if call.keywords:
        return None, "keyword arguments not supported"
    try:
        ast.literal_eval(expected)
    except (ValueError, TypeError, SyntaxError):
        return None, "expected value is not a literal"
    for arg in call.args:
        try:
            ast.literal_eval(arg)
        except (ValueError, TypeError, SyntaxError):
            return None, "argument is not a literal"
    args_source = ", ".join(ast.unparse(a) for a in call.args)
    return IOPair(input=args_source, output=ast.unparse(expected)), None


def split_tests_to_io_pairs(
    task: Task, executor: InProcessExecutor | None = None
) -> tuple[list[IOPair], list[str]]:
    """Turn assertion-style tests into (input, output) pairs.

    Only top-level ``assert entry(args) == literal`` (or ``is``) forms
    are extracted; everything else is skipped with a reason.  Each pair
    is confirmed by running the canonical solution on the input.
    """
    executor = executor or InProcessExecutor()
    if task.task_type is not TaskType.CODE_GENERATION:
        if task.input is not None and task.output is not None:
            return [IOPair(input=task.input, output=task.output)], []
        return [], ["task has no test suite or recorded I/O"]
    tree = ast.parse(task.test or "")
    body = tree.body
    if len(body) == 1 and isinstance(body[0], ast.FunctionDef):
        entry_names = {task.entry_point or "", body[0].args.args[0].arg if body[0].args.args else "candidate"}
        body = body[0].body
    else:
        entry_names = {task.entry_point or "", "candidate"}
    pairs: list[IOPair] = []
    skipped: list[str] = []
    for index, stmt in enumerate(body):
        if not isinstance(stmt, ast.Assert):
            continue
        pair, reason = _extract_pair(stmt, entry_names)
        if pair is None:
            skipped.append(f"assertion {index}: {reason}")
            continue
        outcome = executor.call_entry(task.code or "", task.entry_point or "", pair.input)
        if outcome.status is not TestStatus.PASS or not safe_equal(
            outcome.value, parse_literal(pair.output)
        ):
            skipped.append(f"assertion {index}: canonical run does not reproduce output")
            continue
        pairs.append(pair)
    return pairs, skipped
