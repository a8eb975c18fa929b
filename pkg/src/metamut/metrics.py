"""Aggregation of pair records into run-level metrics and reports.

All arithmetic is exact (``fractions.Fraction``); rounding to two
decimal places (half-up) happens only when a number is rendered.  The
canonical JSON report is deterministic: sorted keys, no timestamps, so
identical inputs produce byte-identical files.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence

from metamut.oracles import ConsistencyKind, CorrectnessStatus, Direction

REPORT_SCHEMA_VERSION = 1

SLICE_FIELDS = ("model", "dataset", "task_type", "operator", "category")


@dataclass
class PairRecord:
    """One consistency test case: an (original, mutated) task pair."""

    task_id: str
    dataset: str
    task_type: str
    model: str
    operators: tuple[str, ...]
    category: str
    og_status: CorrectnessStatus
    mut_status: CorrectnessStatus
    kind: ConsistencyKind
    incorrect_direction: Direction = Direction.NONE
    invalid_direction: Direction = Direction.NONE
    distance: Fraction | None = None
    test_count: int | None = None
    og_confidence: float | None = None
    mut_confidence: float | None = None

    @property
    def inconsistent(self) -> bool:
        return self.kind is not ConsistencyKind.CONSISTENT

    @property
    def operator_label(self) -> str:
        return "+".join(self.operators)

    def slice_value(self, field_name: str) -> str:
        if field_name == "operator":
            return self.operator_label
        return str(getattr(self, field_name))

    def to_json(self) -> dict[str, Any]:
        record: dict[str, Any] = {
            "task_id": self.task_id,
            "dataset": self.dataset,
            "task_type": self.task_type,
            "model": self.model,
            "operators": list(self.operators),
            "category": self.category,
            "og_status": self.og_status.value,
            "mut_status": self.mut_status.value,
            "kind": self.kind.value,
            "incorrect_direction": self.incorrect_direction.value,
            "invalid_direction": self.invalid_direction.value,
        }
        if self.distance is not None:
            record["distance"] = str(self.distance)
        if self.test_count is not None:
            record["test_count"] = self.test_count
        if self.og_confidence is not None:
            record["og_confidence"] = self.og_confidence
        if self.mut_confidence is not None:
            record["mut_confidence"] = self.mut_confidence
        return record

    @classmethod
    def from_json(cls, record: dict[str, Any]) -> "PairRecord":
        distance = record.get("distance")
        return cls(
            task_id=record["task_id"],
            dataset=record["dataset"],
            task_type=record["task_type"],
            model=record["model"],
            operators=tuple(record["operators"]),
            category=record["category"],
            og_status=CorrectnessStatus(record["og_status"]),
            mut_status=CorrectnessStatus(record["mut_status"]),
            kind=ConsistencyKind(record["kind"]),
            incorrect_direction=Direction(record["incorrect_direction"]),
            invalid_direction=Direction(record["invalid_direction"]),
            distance=Fraction(distance) if distance is not None else None,
            test_count=record.get("test_count"),
            og_confidence=record.get("og_confidence"),
            mut_confidence=record.get("mut_confidence"),
        )


def render_percent(value: Fraction | None) -> str:
    """Two-decimal, half-up percentage text; exact math upstream."""
    if value is None:
        return "--"
    quantized = (
        Decimal(value.numerator) / Decimal(value.denominator)
    ).quantize(Decimal("0.01"), rounding=ROUND_HALF_UP)
    return f"{quantized:.2f}"


# --------------------------------------------------------------------------
# Core metrics (exact rational math)
# --------------------------------------------------------------------------


def inconsistency_rate(records: Sequence[PairRecord]) -> Fraction:
    """Percentage of pairs judged inconsistent (exact fraction)."""
    if not records:
        raise ValueError("inconsistency_rate requires at least one record")
    inconsistent = sum(1 for r in records if r.inconsistent)
    return Fraction(100) * Fraction(inconsistent, len(records))


def accuracy(records: Sequence[PairRecord]) -> Fraction | None:
    """Percent of mutated-task answers graded Correct among scored ones.

    Invalid (absent/unscored) mutated answers are excluded from the
    denominator, which is why accuracy and inconsistency-rate
    denominators can differ.
    """
    scored = [r for r in records if r.mut_status is not CorrectnessStatus.INVALID]
    if not scored:
        return None
    correct = sum(1 for r in scored if r.mut_status is CorrectnessStatus.CORRECT)
    return Fraction(100) * Fraction(correct, len(scored))


def direction_tallies(records: Sequence[PairRecord]) -> dict[str, dict[str, int]]:
    tallies = {"incorrect": {"og": 0, "mut": 0}, "invalid": {"og": 0, "mut": 0}}
    for record in records:
        for name, direction in (
            ("incorrect", record.incorrect_direction),
            ("invalid", record.invalid_direction),
        ):
            if direction in (Direction.OG, Direction.BOTH):
                tallies[name]["og"] += 1
            if direction in (Direction.MUT, Direction.BOTH):
                tallies[name]["mut"] += 1
    return tallies


def aggregate_distance(records: Sequence[PairRecord]) -> Fraction | None:
    """Mean of per-pair distances over records that carry one."""
    distances = [r.distance for r in records if r.distance is not None]
    if not distances:
        return None
    return sum(distances, Fraction(0)) / len(distances)


# --------------------------------------------------------------------------
# Confidence filtering
# --------------------------------------------------------------------------


@dataclass
class FilterResult:
    retained: list[PairRecord]
    dropped: list[PairRecord]
    unscored: list[PairRecord]


def confidence_filter(records: Sequence[PairRecord], threshold: float) -> FilterResult:
    """Keep pairs whose both confidences are present and >= threshold.

    Records lacking a confidence on either side are retained separately
    as "unscored" rather than silently dropped.
    """
    retained: list[PairRecord] = []
    dropped: list[PairRecord] = []
    unscored: list[PairRecord] = []
    for record in records:
        if record.og_confidence is None or record.mut_confidence is None:
            unscored.append(record)
        elif record.og_confidence >= threshold and record.mut_confidence >= threshold:
            retained.append(record)
        else:
            dropped.append(record)
    return FilterResult(retained=retained, dropped=dropped, unscored=unscored)


# --------------------------------------------------------------------------
# Aggregation into a run report
# --------------------------------------------------------------------------


@dataclass
class SliceStats:
    key: dict[str, str]
    n_test_cases: int
    n_inconsistent: int
    rate: Fraction
    accuracy: Fraction | None
    agg_inc_distance: Fraction | None
    kind_counts: dict[str, int]
    directions: dict[str, dict[str, int]]

    def to_json(self) -> dict[str, Any]:
        return {
            "key": self.key,
            "n_test_cases": self.n_test_cases,
            "n_inconsistent": self.n_inconsistent,
            "inconsistency_rate": {
                "percent": render_percent(self.rate),
                "fraction": f"{self.n_inconsistent}/{self.n_test_cases}",
            },
            "accuracy_percent": render_percent(self.accuracy),
            "agg_inc_distance": (
                str(self.agg_inc_distance)
                if self.agg_inc_distance is not None
                else None
            ),
            "kind_counts": self.kind_counts,
            "directions": self.directions,
        }


@dataclass
class RunReport:
    n_test_cases: int
    n_inconsistent: int
    rate: Fraction | None
    accuracy: Fraction | None
    accuracy_numerator: int
    accuracy_denominator: int
    agg_inc_distance: Fraction | None
    kind_counts: dict[str, int]
    directions: dict[str, dict[str, int]]
    slices: list[SliceStats] = field(default_factory=list)
    group_by: tuple[str, ...] = ()
    skipped: dict[str, int] = field(default_factory=dict)
    unscored_confidence: int = 0

    def to_json(self) -> dict[str, Any]:
        return {
            "schema_version": REPORT_SCHEMA_VERSION,
            "n_test_cases": self.n_test_cases,
            "n_inconsistent": self.n_inconsistent,
            "inconsistency_rate": {
                "percent": render_percent(self.rate),
                "fraction": f"{self.n_inconsistent}/{self.n_test_cases}",
            },
            "accuracy": {
                "percent": render_percent(self.accuracy),
                "fraction": f"{self.accuracy_numerator}/{self.accuracy_denominator}",
            },
            "agg_inc_distance": (
                str(self.agg_inc_distance)
                if self.agg_inc_distance is not None
                else None
            ),
            "kind_counts": self.kind_counts,
            "directions": self.directions,
            "group_by": list(self.group_by),
            "slices": [s.to_json() for s in self.slices],
            "skipped": self.skipped,
            "unscored_confidence": self.unscored_confidence,
        }


def _stats_for(records: Sequence[PairRecord]) -> tuple:
    n = len(records)
    inconsistent = sum(1 for r in records if r.inconsistent)
    rate = inconsistency_rate(records) if records else None
    acc = accuracy(records)
    scored = [r for r in records if r.mut_status is not CorrectnessStatus.INVALID]
    correct = sum(1 for r in scored if r.mut_status is CorrectnessStatus.CORRECT)
    kinds = {kind.value: 0 for kind in ConsistencyKind}
    for record in records:
        kinds[record.kind.value] += 1
    return (
        n,
        inconsistent,
        rate,
        acc,
        correct,
        len(scored),
        aggregate_distance(records),
        kinds,
        direction_tallies(records),
    )


def aggregate(
    records: Sequence[PairRecord],
    group_by: Sequence[str] = (),
    skipped: dict[str, int] | None = None,
) -> RunReport:
    """Fold pair records into a run report with optional slice breakdowns."""
    for field_name in group_by:
        if field_name not in SLICE_FIELDS:
            raise ValueError(f"unknown slice field: {field_name!r}")
    (
        n,
        inconsistent,
        rate,
        acc,
        correct,
        scored,
        distance,
        kinds,
        directions,
    ) = _stats_for(records)
    report = RunReport(
        n_test_cases=n,
        n_inconsistent=inconsistent,
        rate=rate,
        accuracy=acc,
        accuracy_numerator=correct,
        accuracy_denominator=scored,
        agg_inc_distance=distance,
        kind_counts=kinds,
        directions=directions,
        group_by=tuple(group_by),
        skipped=dict(skipped or {}),
        unscored_confidence=sum(
            1
            for r in records
            if r.og_confidence is None or r.mut_confidence is None
        ),
    )
    if group_by:
        buckets: dict[tuple[str, ...], list[PairRecord]] = {}
        for record in records:
            key = tuple(record.slice_value(f) for f in group_by)
            buckets.setdefault(key, []).append(record)
        for key in sorted(buckets):
            bucket = buckets[key]
            (bn, binc, brate, bacc, _, _, bdist, bkinds, bdirs) = _stats_for(bucket)
            report.slices.append(
                SliceStats(
                    key=dict(zip(group_by, key)),
                    n_test_cases=bn,
                    n_inconsistent=binc,
                    rate=brate if brate is not None else Fraction(0),
                    accuracy=bacc,
                    agg_inc_distance=bdist,
                    kind_counts=bkinds,
                    directions=bdirs,
                )
            )
    return report


# --------------------------------------------------------------------------
# Emission
# --------------------------------------------------------------------------


def report_json_text(report: RunReport) -> str:
    return json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n"


def report_csv_text(report: RunReport) -> str:
    buffer = io.StringIO()
    fields = list(report.group_by) or ["scope"]
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(
        fields
        + ["n_test_cases", "n_inconsistent", "inc_percent", "acc_percent", "agg_inc_distance"]
    )
    rows = report.slices or [
        SliceStats(
            key={"scope": "all"},
            n_test_cases=report.n_test_cases,
            n_inconsistent=report.n_inconsistent,
            rate=report.rate if report.rate is not None else Fraction(0),
            accuracy=report.accuracy,
            agg_inc_distance=report.agg_inc_distance,
            kind_counts=report.kind_counts,
            directions=report.directions,
        )
    ]
    for stats in rows:
        writer.writerow(
            [stats.key.get(f, "") for f in fields]
            + [
                stats.n_test_cases,
                stats.n_inconsistent,
                render_percent(stats.rate),
                render_percent(stats.accuracy),
                str(stats.agg_inc_distance) if stats.agg_inc_distance is not None else "",
            ]
        )
    return buffer.getvalue()


def report_markdown_text(report: RunReport) -> str:
    lines = ["# Consistency run report", ""]
    lines.append(
        f"- Test cases: {report.n_test_cases} (inconsistent: {report.n_inconsistent})"
    )
    lines.append(
        f"- Inc.: {render_percent(report.rate)}% "
        f"({report.n_inconsistent}/{report.n_test_cases})"
    )
    lines.append(
        f"- Acc.: {render_percent(report.accuracy)}% "
        f"({report.accuracy_numerator}/{report.accuracy_denominator})"
    )
    if report.agg_inc_distance is not None:
        lines.append(f"- Agg Inc Dist: {report.agg_inc_distance}")
    if report.skipped:
        parts = ", ".join(f"{k}: {v}" for k, v in sorted(report.skipped.items()))
        lines.append(f"- Skipped: {parts}")
    lines.append("")
    header_fields = list(report.group_by) or ["scope"]
    lines.append("| " + " | ".join(header_fields + ["N", "Inc.", "Acc."]) + " |")
    lines.append("|" + "---|" * (len(header_fields) + 3))
    if report.slices:
        for stats in report.slices:
            cells = [stats.key.get(f, "") for f in header_fields]
            cells += [
                str(stats.n_test_cases),
                render_percent(stats.rate),
                render_percent(stats.accuracy),
            ]
            lines.append("| " + " | ".join(cells) + " |")
    else:
        lines.append(
            "| all | "
            f"{report.n_test_cases} | {render_percent(report.rate)} | "
            f"{render_percent(report.accuracy)} |"
        )
    return "\n".join(lines) + "\n"


def render_figures(report: RunReport, out_dir: str | Path) -> list[Path]:
    """Render summary figures (PNG) alongside the delimited reports."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []

    fig, ax = plt.subplots(figsize=(6, 4))
    kinds = [k for k in report.kind_counts if report.kind_counts[k]]
    counts = [report.kind_counts[k] for k in kinds]
    if not kinds:
        kinds, counts = ["consistent"], [0]
    ax.bar(range(len(kinds)), counts, color="#4878a8")
    ax.set_xticks(range(len(kinds)))
    ax.set_xticklabels([k.replace("_", "\n") for k in kinds], fontsize=8)
    ax.set_ylabel("pairs")
    ax.set_title("Consistency outcomes")
    fig.tight_layout()
    path = out_dir / "consistency_kinds.png"
    fig.savefig(path, dpi=120)
    plt.close(fig)
    written.append(path)

    if report.slices:
        fig, ax = plt.subplots(figsize=(7, 4))
        labels = ["/".join(s.key.values()) for s in report.slices]
        rates = [float(s.rate) for s in report.slices]
        ax.bar(range(len(labels)), rates, color="#a85448")
        ax.set_xticks(range(len(labels)))
        ax.set_xticklabels(labels, rotation=45, ha="right", fontsize=7)
        ax.set_ylabel("inconsistency rate (%)")
        ax.set_title("Inconsistency rate by slice")
        fig.tight_layout()
        path = out_dir / "inconsistency_by_slice.png"
        fig.savefig(path, dpi=120)
        plt.close(fig)
        written.append(path)
    return written


def emit_report(
    report: RunReport,
    out_dir: str | Path,
    formats: Iterable[str] = ("json", "csv", "markdown"),
    figures: bool = True,
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    renderers = {
        "json": ("report.json", report_json_text),
        "csv": ("report.csv", report_csv_text),
        "markdown": ("report.md", report_markdown_text),
    }
    for fmt in formats:
        if fmt not in renderers:
            raise ValueError(f"unknown report format: {fmt!r}")
        filename, renderer = renderers[fmt]
        path = out_dir / filename
        path.write_text(renderer(report), encoding="utf-8")
        written.append(path)
    if figures:
        written.extend(render_figures(report, out_dir))
    return written


def write_records(records: Sequence[PairRecord], path: str | Path) -> None:
    lines = [json.dumps(r.to_json(), sort_keys=True) for r in records]
    Path(path).write_text("\n".join(lines) + ("\n" if lines else ""), encoding="utf-8")


def read_records(path: str | Path) -> list[PairRecord]:
    records: list[PairRecord] = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.strip():
            records.append(PairRecord.from_json(json.loads(line)))
    return records
