"""Deterministic prompt construction from versioned template files.

Templates live under ``metamut/templates`` as plain text, one per
(task type) with a version suffix, so a run is reproducible from the
repository state alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from importlib import resources

from metamut.ingest import Task, TaskType

TEMPLATE_VERSION = "v1"

SHOT_CONFIGS = ("zero_shot", "one_shot", "few_shot")
_MIN_EXEMPLARS = {"zero_shot": 0, "one_shot": 1, "few_shot": 2}


class ConfigError(ValueError):
    """A prompt configuration the dataset cannot satisfy."""


@dataclass(frozen=True)
class Prompt:
    system: str
    user: str
    template: str


def _load_template(name: str) -> str:
    path = resources.files("metamut").joinpath(f"templates/{name}_{TEMPLATE_VERSION}.txt")
    return path.read_text(encoding="utf-8")


def _render_body(task: Task, code: str | None) -> str:
    kind = task.task_type
    if kind is TaskType.CODE_GENERATION:
        return _load_template("code_generation").format(
            description=(code or task.description or "").rstrip()
        )
    if kind is TaskType.OUTPUT_PREDICTION:
        return _load_template("output_prediction").format(
            code=(code or task.code or "").rstrip(),
            entry_point=task.entry_point or "f",
            input=task.input or "",
        )
    if kind is TaskType.INPUT_PREDICTION:
        return _load_template("input_prediction").format(
            code=(code or task.code or "").rstrip(),
            entry_point=task.entry_point or "f",
            input=task.input or "",
            output=task.output or "",
        )
    options = task.options or {}
    return _load_template("mcq").format(
        description=(task.description or "").rstrip(),
        option_a=options.get("A", ""),
        option_b=options.get("B", ""),
        option_c=options.get("C", ""),
        option_d=options.get("D", ""),
    )


def build_prompt(
    task: Task,
    code: str | None = None,
    config: str = "zero_shot",
    exemplars: tuple[Task, ...] = (),
) -> Prompt:
    """Build the prompt for a task, optionally over mutated source.

    ``code`` overrides the program text shown to the model (the mutated
    variant); ``exemplars`` are solved tasks prepended for one-/few-shot
    configurations.
    """
    if config not in SHOT_CONFIGS:
        raise ConfigError(f"unknown prompt config: {config!r}")
    needed = _MIN_EXEMPLARS[config]
    if len(exemplars) < needed:
        raise ConfigError(
            f"{config} requires at least {needed} exemplar(s), got {len(exemplars)}"
        )
    sections: list[str] = []
    for exemplar in exemplars[: needed or None] if needed else ():
        answer = exemplar.canonical_answer() or ""
        sections.append(
            "Example:\n" + _render_body(exemplar, None).rstrip() + f"\nAnswer: {answer}\n"
        )
    sections.append(_render_body(task, code).rstrip() + "\n")
    template = f"{task.task_type.value}_{TEMPLATE_VERSION}"
    return Prompt(
        system=_load_template("system").strip(),
        user="\n\n".join(sections),
        template=template,
    )
