from __future__ import annotations

import json
from importlib import resources
from pathlib import Path

import pytest

from metamut.executor import InProcessExecutor
from metamut.ingest import Dataset, TaskType, load_dataset

CORPUS_PATH = str(resources.files("metamut").joinpath("data/mini_corpus.jsonl"))


@pytest.fixture(scope="session")
def corpus() -> Dataset:
    dataset = load_dataset(CORPUS_PATH, name="mini_corpus")
    assert not dataset.skipped
    return dataset


@pytest.fixture(scope="session")
def executor() -> InProcessExecutor:
    return InProcessExecutor(timeout_s=3.0)


def make_mock_script(
    path: Path, corpus: Dataset, confidences: bool = True
) -> tuple[Path, list]:
    """Script a mock model over the first 40 output-prediction tasks.

    Tasks 1-6: correct original, wrong mutant (correctness-based).
    Tasks 7-9: two different wrong answers (incorrectness-based).
    Task 10: correct original, empty mutant answer (invalidity-based).
    Tasks 11-40: correct on both sides (consistent).
    """
    tasks = [t for t in corpus.tasks if t.task_type is TaskType.OUTPUT_PREDICTION][:40]
    assert len(tasks) == 40
    lines = []
    for index, task in enumerate(tasks):
        canonical = task.output
        if index < 6:
            original, mutated = canonical, "['__wrong_mut__']"
        elif index < 9:
            original, mutated = "['__wrong_og__']", "['__wrong_mut__']"
        elif index == 9:
            original, mutated = canonical, ""
        else:
            original, mutated = canonical, canonical
        for variant, response in (("original", original), ("mutated", mutated)):
            record = {"task_id": task.task_id, "variant": variant, "response": response}
            if confidences:
                record["confidence"] = round(0.5 + (index % 11) * 0.045, 3)
            lines.append(json.dumps(record))
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path, tasks
