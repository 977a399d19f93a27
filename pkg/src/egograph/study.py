"""Study planning, session orchestration, and the analysis pipeline.

A 3x3 Graeco-Latin square counterbalances interface order against graph
assignment; participants cycle over its three rows. Sessions pair a small
training graph with a large measured graph per condition, and only measured
passes enter the analysis. Completion times are log-transformed before the
1.5*IQR outlier filter and reported untransformed.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np

from .ego import ViewCondition
from .errors import ParameterError
from .events import EventLog
from .protocol import SceneFile
from .tasks import TaskKind, generate_tasks

CONDITIONS = (ViewCondition.BASELINE, ViewCondition.HIGHLIGHT, ViewCondition.BUBBLE)

# Orthogonal 3x3 Latin squares: one over conditions, one over graph pairs.
_CONDITION_SQUARE = ((0, 1, 2), (1, 2, 0), (2, 0, 1))
_GRAPH_SQUARE = ((0, 1, 2), (2, 0, 1), (1, 2, 0))

MIN_FILTER_SAMPLES = 4

# Measures analyzed per task kind (completion times only where the study
# compared them; END and SO report their dedicated measures instead).
MEASURES: dict[TaskKind, tuple[str, ...]] = {
    TaskKind.FIN: ("completion_time",),
    TaskKind.FCN: (
        "completion_time",
        "correctness_rate",
        "miss_rate",
        "false_positive_rate",
    ),
    TaskKind.END: ("judgement_error",),
    TaskKind.SO_OD: ("angle_deviation_degrees",),
    TaskKind.FIP: ("completion_time", "path_correct", "path_deviation"),
    TaskKind.FOP: ("completion_time",),
    TaskKind.SO_DD: ("angle_deviation_degrees",),
    TaskKind.SO_DO: ("angle_deviation_degrees",),
}

_LOG_TRANSFORMED = ("completion_time",)


@dataclass(frozen=True)
class PlanCell:
    condition: ViewCondition
    graph: int  # graph-pair id: (small training graph, large measured graph)


@dataclass(frozen=True)
class StudyPlan:
    participants: int
    seed: int
    rows: tuple[tuple[PlanCell, ...], ...]

    def to_dict(self) -> dict:
        return {
            "participants": self.participants,
            "seed": self.seed,
            "rows": [
                [{"condition": c.condition.value, "graph": c.graph} for c in row]
                for row in self.rows
            ],
        }

    @classmethod
    def from_dict(cls, obj: dict) -> "StudyPlan":
        return cls(
            participants=int(obj["participants"]),
            seed=int(obj["seed"]),
            rows=tuple(
                tuple(
                    PlanCell(condition=ViewCondition(c["condition"]), graph=int(c["graph"]))
                    for c in row
                )
                for row in obj["rows"]
            ),
        )


def canonical_rows() -> tuple[tuple[PlanCell, ...], ...]:
    return tuple(
        tuple(
            PlanCell(condition=CONDITIONS[_CONDITION_SQUARE[i][j]], graph=_GRAPH_SQUARE[i][j])
            for j in range(3)
        )
        for i in range(3)
    )


def build_plan(participants: int, seed: int) -> StudyPlan:
    """Cycle participants over the seeded-permuted canonical square rows."""
    if participants < 1:
        raise ParameterError("participants must be >= 1")
    rng = np.random.default_rng(np.random.PCG64(seed))
    rows = canonical_rows()
    order = [int(i) for i in rng.permutation(3)]
    assigned = tuple(rows[order[p % 3]] for p in range(participants))
    return StudyPlan(participants=participants, seed=seed, rows=assigned)


def _agent_for(condition: ViewCondition) -> str:
    return "flyer" if condition == ViewCondition.BASELINE else "jumper"


def run_session(
    plan_row: tuple[PlanCell, ...],
    scenes: dict[int, dict[str, SceneFile]],
    mode: str = "simulated-agent",
    tasks_seed: int = 0,
    participant: int = 0,
) -> EventLog:
    """Execute one participant's session row and return its event log.

    Each condition runs twice: a training pass on the small graph and a
    measured pass on the large graph. In simulated-agent mode the scripted
    agent matching the condition (flyer for baseline, jumper otherwise)
    performs every task.
    """
    from .agents import run_scripted_session  # local import; agents drive sessions

    if mode != "simulated-agent":
        raise ParameterError(
            "run_session only executes simulated-agent mode; interactive "
            "sessions run through the serve endpoint"
        )
    log = EventLog()
    log.append(0.0, "study.header", {"participant": participant, "cells": len(plan_row)})
    if not plan_row:
        return log
    log.append(0.0, "tutorial", {"note": "procedural controls tutorial; not measured"})
    for cell in plan_row:
        if cell.graph not in scenes:
            raise ParameterError(f"no scenes provided for graph pair {cell.graph}")
        for phase, size in (("training", "small"), ("measured", "large")):
            if size not in scenes[cell.graph]:
                raise ParameterError(f"graph pair {cell.graph} is missing its {size} scene")
            scene = scenes[cell.graph][size]
            seed = tasks_seed * 1000 + cell.graph * 10 + (0 if phase == "training" else 1)
            tasks = generate_tasks(scene.graph, scene.positions, seed=seed)
            log.append(
                log.end_seconds,
                "pass.start",
                {
                    "condition": cell.condition.value,
                    "graph": cell.graph,
                    "phase": phase,
                    "tasks_seed": seed,
                },
            )
            start = log.end_seconds + 1.0
            run_scripted_session(
                scene,
                cell.condition,
                tasks,
                agent=_agent_for(cell.condition),
                start_time=start,
                log=log,
            )
            log.append(log.end_seconds, "pass.end", {"phase": phase})
    return log


def record_questionnaire(
    log: EventLog, session_seconds: float, instrument: str, items: list
) -> None:
    """Store raw SSQ/TLX responses verbatim; no scoring happens here."""
    from .session import (
        SSQ_ITEM_COUNT,
        SSQ_ITEM_RANGE,
        TLX_ITEM_COUNT,
        TLX_ITEM_RANGE,
    )

    if instrument == "ssq":
        count, (lo, hi) = SSQ_ITEM_COUNT, SSQ_ITEM_RANGE
    elif instrument == "tlx":
        count, (lo, hi) = TLX_ITEM_COUNT, TLX_ITEM_RANGE
    else:
        raise ParameterError(f"unknown instrument '{instrument}'")
    if len(items) != count or not all(lo <= v <= hi for v in items):
        raise ParameterError(f"{instrument} expects {count} items in [{lo}, {hi}]")
    log.append(session_seconds, "questionnaire", {"instrument": instrument, "items": list(items)})


def replay_session(log: EventLog, scenes: dict[int, dict[str, SceneFile]]) -> list[dict]:
    """Re-run every pass's client messages through fresh engines.

    Returns the replayed TaskResult dicts in order, for comparison against
    the log's own task.complete records (they must match exactly: the
    protocol adds no semantics beyond the engine).
    """
    from .session import replay_client_log

    results: list[dict] = []
    i = 0
    records = log.records
    while i < len(records):
        rec = records[i]
        if rec.kind != "pass.start":
            i += 1
            continue
        j = i + 1
        while j < len(records) and records[j].kind != "pass.end":
            j += 1
        segment = EventLog(records=records[i + 1 : j])
        condition = ViewCondition(rec.payload["condition"])
        phase_scenes = scenes[rec.payload["graph"]]
        size = "small" if rec.payload["phase"] == "training" else "large"
        scene = phase_scenes[size]
        tasks = generate_tasks(scene.graph, scene.positions, seed=rec.payload["tasks_seed"])
        engine = replay_client_log(scene, condition, tasks, segment)
        results.extend(r.to_dict() for r in engine.results)
        i = j + 1
    return results


def _outlier_mask(values: np.ndarray) -> np.ndarray:
    q1, q3 = np.percentile(values, [25, 75])  # linear interpolation
    iqr = q3 - q1
    lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
    return (values >= lo) & (values <= hi)


def filter_outliers(samples) -> tuple[list[float], bool]:
    """Drop samples beyond 1.5*IQR from the quartiles.

    Returns (kept samples, whether the filter was applied); fewer than four
    samples pass through unfiltered with the flag down.
    """
    values = [float(v) for v in samples]
    if len(values) < MIN_FILTER_SAMPLES:
        return values, False
    mask = _outlier_mask(np.array(values))
    return [v for v, keep in zip(values, mask) if keep], True


@dataclass(frozen=True)
class MeasureStats:
    task: str
    condition: str
    measure: str
    n_samples: int
    n_kept: int
    filtered: bool
    transform: str
    mean: float | None
    median: float | None
    std: float | None

    def to_dict(self) -> dict:
        return {
            "task": self.task,
            "condition": self.condition,
            "measure": self.measure,
            "n_samples": self.n_samples,
            "n_kept": self.n_kept,
            "filtered": self.filtered,
            "transform": self.transform,
            "mean": self.mean,
            "median": self.median,
            "std": self.std,
        }


@dataclass
class AnalysisReport:
    rows: list[MeasureStats] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "rows": [r.to_dict() for r in self.rows],
            "warnings": list(self.warnings),
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf)
        writer.writerow(
            [
                "task",
                "condition",
                "measure",
                "n_samples",
                "n_kept",
                "filtered",
                "transform",
                "mean",
                "median",
                "std",
            ]
        )
        for r in self.rows:
            writer.writerow(
                [
                    r.task,
                    r.condition,
                    r.measure,
                    r.n_samples,
                    r.n_kept,
                    r.filtered,
                    r.transform,
                    "" if r.mean is None else repr(r.mean),
                    "" if r.median is None else repr(r.median),
                    "" if r.std is None else repr(r.std),
                ]
            )
        return buf.getvalue()

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)


def _measured_samples(logs: list[EventLog], warnings: list[str]) -> dict:
    samples: dict[tuple[str, str, str], list[float]] = {}
    for idx, log in enumerate(logs):
        try:
            phase = None
            condition = None
            saw_records = False
            for rec in log.records:
                saw_records = True
                if rec.kind == "pass.start":
                    phase = rec.payload["phase"]
                    condition = rec.payload["condition"]
                elif rec.kind == "pass.end":
                    phase = None
                elif rec.kind == "task.complete":
                    if phase != "measured":
                        continue  # training passes never enter the analysis
                    result = rec.payload["result"]
                    kind = TaskKind(result["kind"])
                    cond = rec.payload.get("condition", condition)
                    for measure in MEASURES[kind]:
                        value = result.get(measure)
                        if measure == "path_correct" and value is not None:
                            value = 1.0 if value else 0.0
                        if value is None:
                            continue
                        key = (kind.value, cond, measure)
                        samples.setdefault(key, []).append(float(value))
            if not saw_records:
                warnings.append(f"log {idx}: empty log skipped")
        except (KeyError, ValueError, TypeError) as exc:
            warnings.append(f"log {idx}: skipped ({exc})")
    return samples


def analyze(logs: list[EventLog]) -> AnalysisReport:
    """Aggregate measured-pass results per task, condition, and measure."""
    if not logs:
        raise ParameterError("analyze needs at least one event log")
    report = AnalysisReport()
    samples = _measured_samples(logs, report.warnings)
    for (task, condition, measure), values in sorted(samples.items()):
        arr = np.array(values, dtype=float)
        transform = "log10" if measure in _LOG_TRANSFORMED else "none"
        if transform == "log10":
            work = np.log10(arr)
        else:
            work = arr
        if len(arr) >= MIN_FILTER_SAMPLES:
            mask = _outlier_mask(work)
            filtered = True
        else:
            mask = np.ones(len(arr), dtype=bool)
            filtered = False
        kept = arr[mask]
        report.rows.append(
            MeasureStats(
                task=task,
                condition=condition,
                measure=measure,
                n_samples=len(arr),
                n_kept=len(kept),
                filtered=filtered,
                transform=transform,
                mean=float(np.mean(kept)) if len(kept) else None,
                median=float(np.median(kept)) if len(kept) else None,
                std=float(np.std(kept, ddof=1)) if len(kept) > 1 else None,
            )
        )
    return report
