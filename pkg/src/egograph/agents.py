"""Scripted session agents.

The agents exist to exercise the timing model and the logging pipeline, not
to imitate humans: they answer every task perfectly and pay a fixed
selection overhead before each deliberate pick. The jumper traverses paths
by node-to-node jumps (ego conditions); the flyer steers straight legs at
the scene's calibrated speed (baseline). A flyer's selection clicks happen
mid-flight and cost no extra time; only the jumper stalls on selection,
because a jump cannot start before its target is selected.
"""

from __future__ import annotations

import numpy as np

from .ego import ViewCondition
from .errors import ParameterError
from .events import EventLog
from .graphs import common_neighbors, degree
from .navigation import JUMP_DURATION_S
from .protocol import Message, SceneFile
from .session import SessionEngine
from .tasks import TaskKind, TaskSet

SELECTION_OVERHEAD_S = 0.75  # model constant: aim + trigger before each pick


class _Driver:
    """Feeds client messages into an engine with a monotonically advancing clock."""

    def __init__(self, engine: SessionEngine, start_time: float):
        self.engine = engine
        self.t = start_time
        self.seq = 0
        self.inbox: list[Message] = []

    def send(self, mtype: str, payload: dict | None = None) -> None:
        self.seq += 1
        replies = self.engine.process(
            Message(
                type=mtype,
                seq=self.seq,
                session_seconds=self.t,
                payload=payload or {},
            )
        )
        self.inbox.extend(replies)

    def wait(self, seconds: float) -> None:
        self.t += seconds
        self.inbox.extend(self.engine.advance_time(self.t))

    def point_at(self, target: np.ndarray) -> None:
        origin = self.engine.pose.position
        direction = np.asarray(target, dtype=float) - origin
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            direction = np.array([1.0, 0.0, 0.0])
            norm = 1.0
        self.send(
            "input.pointer",
            {
                "origin": [float(c) for c in origin],
                "direction": [float(c) for c in (direction / norm)],
            },
        )

    def submit_ray_at(self, target: np.ndarray) -> None:
        origin = self.engine.pose.position
        direction = np.asarray(target, dtype=float) - origin
        direction = direction / float(np.linalg.norm(direction))
        self.send(
            "task.submit",
            {
                "ray_origin": [float(c) for c in origin],
                "ray_direction": [float(c) for c in direction],
            },
        )


def _jumper_fop(driver: _Driver, path: tuple[int, ...]) -> None:
    driver.wait(SELECTION_OVERHEAD_S)
    driver.send("action.select", {"node": path[0]})  # timer starts here
    for node in path[1:]:
        driver.wait(SELECTION_OVERHEAD_S)
        driver.send("action.select", {"node": node})  # click starts the jump
        driver.wait(JUMP_DURATION_S)  # ride the jump to arrival


def _flyer_fop(driver: _Driver, path: tuple[int, ...], scene: SceneFile) -> None:
    positions = np.asarray(scene.positions)
    speed = scene.calibration.max_fly_speed
    driver.wait(SELECTION_OVERHEAD_S)
    driver.send("action.select", {"node": path[0]})  # timer starts here
    for node in path[1:]:
        # steer through each node center; the engine's proximity rule ends
        # the task as soon as the final approach crosses the arrival radius
        target = positions[node]
        driver.point_at(target)
        driver.send("input.fly", {"axis_x": 0.0, "axis_y": 1.0})
        distance = float(np.linalg.norm(target - driver.engine.pose.position))
        driver.wait(distance / speed)
        driver.send("input.fly", {"axis_x": 0.0, "axis_y": 0.0})
        driver.send("action.select", {"node": node})  # clicked in passing


def run_scripted_session(
    scene: SceneFile,
    condition: ViewCondition,
    tasks: TaskSet,
    agent: str = "jumper",
    start_time: float = 0.0,
    log: EventLog | None = None,
    questionnaires: bool = True,
) -> SessionEngine:
    """Drive a full task battery with a perfect scripted agent.

    'jumper' requires an ego condition, 'flyer' requires the baseline: the
    study design couples locomotion to the interface.
    """
    if agent == "jumper" and condition == ViewCondition.BASELINE:
        raise ParameterError("the jumper agent needs an ego condition (no jumps in baseline)")
    if agent == "flyer" and condition != ViewCondition.BASELINE:
        raise ParameterError("the flyer agent needs the baseline condition (no flying in ego)")
    if agent not in ("jumper", "flyer"):
        raise ParameterError(f"unknown agent '{agent}'")

    engine = SessionEngine(scene, condition, tasks, log=log)
    driver = _Driver(engine, start_time)
    positions = np.asarray(scene.positions)
    driver.send("hello", {"client": f"scripted-{agent}"})

    for spec in tasks:
        kind = spec.kind
        if kind == TaskKind.FIN:
            driver.wait(SELECTION_OVERHEAD_S)
            driver.send("action.select", {"node": spec.target_node})
        elif kind == TaskKind.FCN:
            for node in sorted(common_neighbors(scene.graph, *spec.pair)):
                driver.wait(SELECTION_OVERHEAD_S)
                driver.send("action.select", {"node": node})
            driver.wait(SELECTION_OVERHEAD_S)
            driver.send("task.submit", {})
        elif kind == TaskKind.END:
            driver.wait(SELECTION_OVERHEAD_S)
            driver.send("task.submit", {"estimate": degree(scene.graph, spec.hub)})
        elif kind == TaskKind.SO_OD:
            driver.wait(SELECTION_OVERHEAD_S)
            driver.send("task.submit", {"ready": True})
            driver.wait(SELECTION_OVERHEAD_S)
            driver.submit_ray_at(positions[spec.point_target])
        elif kind == TaskKind.FIP:
            driver.wait(SELECTION_OVERHEAD_S)
            driver.send("task.submit", {"path": list(spec.truth_path)})
        elif kind == TaskKind.FOP:
            if agent == "jumper":
                _jumper_fop(driver, spec.path)
            else:
                _flyer_fop(driver, spec.path, scene)
        elif kind in (TaskKind.SO_DD, TaskKind.SO_DO):
            driver.wait(SELECTION_OVERHEAD_S)
            driver.submit_ray_at(positions[spec.point_target])

    if questionnaires:
        driver.wait(1.0)
        driver.send(
            "questionnaire.submit", {"instrument": "ssq", "items": [0] * 16}
        )
        driver.send(
            "questionnaire.submit", {"instrument": "tlx", "items": [50] * 6}
        )
    return engine
