"""Authoritative session state machine.

One engine instance owns one participant session: pose, view condition,
running animations, task lifecycle, and the event log. All state changes
happen at deterministic times (client event times, animation end times, or
60 Hz fly-integration tick boundaries), so replaying the logged client
messages reproduces the identical final state and measures. Wall clock only
decides when pending transitions are noticed, never when they take effect.
"""

from __future__ import annotations

import math

import numpy as np

from .ego import EgoViewState, ViewCondition, apply_condition, geodesic_color, morph
from .errors import ProtocolError, UnknownNodeError
from .events import EventLog
from .graphs import common_neighbors, degree, geodesic_distances
from .navigation import (
    JUMP_DURATION_S,
    JumpAnimation,
    NavParams,
    Pose,
    fly_step,
    jump_sample,
    look_rotation,
    start_jump,
    teleport,
)
from .protocol import Message, SceneFile, SequenceChecker, scene_to_dict, _is_int, _is_vec3
from .tasks import (
    TaskKind,
    TaskResult,
    TaskSet,
    fop_progress,
    prompt_payload,
    score_end,
    score_fcn,
    score_fip,
    score_so,
)

TICK_HZ = 60
FOP_ARRIVAL_RADIUS_FACTOR = 1.5  # baseline "reached" = within 1.5 node radii

SSQ_ITEM_COUNT = 16
SSQ_ITEM_RANGE = (0, 3)
TLX_ITEM_COUNT = 6
TLX_ITEM_RANGE = (0, 100)

_STUDY_FLY_CONDITIONS = {ViewCondition.BASELINE}


def view_state_payload(view: EgoViewState, g, positions: np.ndarray) -> dict:
    """Serialize a view state, colors as 8-bit RGB triples."""
    out = {
        "condition": view.condition.value,
        "user_node": view.user_node,
        "highlight_set": sorted(view.highlight_set),
        "hidden_edges": [list(e) for e in sorted(view.hidden_edges)],
        "displaced_positions": {
            str(n): [float(c) for c in p] for n, p in sorted(view.displaced_positions.items())
        },
        "clipped_edges": [
            {
                "edge": list(edge),
                "segments": [
                    [[float(c) for c in a], [float(c) for c in b]] for a, b in segs
                ],
            }
            for edge, segs in sorted(view.clipped_edges.items())
        ],
        "bubble_radius": view.bubble_radius,
    }
    if view.user_node is not None:
        dist = geodesic_distances(g, view.user_node)
        max_d = max(max(dist.values()), 1)
        distances = [dist.get(v, max_d) for v in g.nodes]
        colors = [
            [int(round(255 * c)) for c in geodesic_color(d, max_d)] for d in distances
        ]
        out["geodesic"] = {
            "distances": distances,
            "max_distance": max_d,
            "colors": colors,
        }
    return out


def _pose_payload(pose: Pose) -> dict:
    return {
        "position": [float(c) for c in pose.position],
        "orientation": [float(c) for c in pose.orientation],
    }


class SessionEngine:
    """Processes protocol messages against one scene/condition/task set."""

    def __init__(
        self,
        scene: SceneFile,
        condition: ViewCondition,
        tasks: TaskSet | None = None,
        log: EventLog | None = None,
    ):
        self.scene = scene
        self.g = scene.graph
        self.positions = np.asarray(scene.positions, dtype=float)
        self.condition = condition
        self.tasks = tasks
        self.study_mode = tasks is not None
        self.log = log if log is not None else EventLog()
        self.nav = NavParams(max_fly_speed=scene.calibration.max_fly_speed)

        self.pose: Pose = scene.overview
        self.at_overview = True
        self.user_node: int | None = None
        self.view = EgoViewState(condition=condition)
        self.anim: JumpAnimation | None = None
        self._teleport_to_overview = False
        self.fly_axes = (0.0, 0.0)
        self._tick = 0  # completed 60 Hz fly-integration ticks
        self.bookmarks: set[int] = set()
        self.visited: set[int] = set()
        self.selected: set[int] = set()
        self.results: list[TaskResult] = []
        self.started = False
        self.time = 0.0  # last deterministic event time

        self.task_index = -1
        self.task_started_at: float | None = None
        self.so_phase: str | None = None
        self.fop_highlight = 0
        self.fop_click_time: float | None = None
        self._detail_return: Pose | None = None

        self._seq_in = SequenceChecker()
        self._seq_out = 0
        self._outbox: list[Message] = []

    # ------------------------------------------------------------------ I/O

    def make_server_message(self, mtype: str, payload: dict, t: float) -> Message:
        """Envelope a server message; all outgoing seqs come from one counter."""
        self._seq_out += 1
        return Message(type=mtype, seq=self._seq_out, session_seconds=t, payload=payload)

    def _emit(self, mtype: str, payload: dict, t: float) -> None:
        self._outbox.append(self.make_server_message(mtype, payload, t))

    def _error(self, message: str, ref_seq: int, t: float) -> None:
        self._emit("error", {"message": message, "ref_seq": ref_seq}, t)

    def _drain(self) -> list[Message]:
        out, self._outbox = self._outbox, []
        return out

    def process(self, msg: Message) -> list[Message]:
        """Apply one client message; returns the server messages it produced."""
        self._seq_in.check(msg.seq)
        t = max(msg.session_seconds, self.time)
        pending = self.advance_time(t)
        self.log.append(
            t,
            "client",
            {
                "type": msg.type,
                "seq": msg.seq,
                "session_seconds": msg.session_seconds,
                "payload": msg.payload,
            },
        )
        handler = getattr(self, "_on_" + msg.type.replace(".", "_"), None)
        if handler is None:
            raise ProtocolError(f"unknown message type '{msg.type}'")
        handler(msg, t)
        return pending + self._drain()

    # ----------------------------------------------------------------- time

    def advance_time(self, t: float) -> list[Message]:
        """Flush animation arrivals and fly integration up to time t."""
        t = max(t, self.time)
        while self.anim is not None and self.anim.end_time <= t:
            self._finalize_animation(self.anim.end_time)
        if self.anim is None:
            self._integrate_fly(t)
        self.time = t
        return self._drain()

    def _fly_allowed(self) -> bool:
        if self.anim is not None:
            return False
        if self.study_mode:
            return self.condition in _STUDY_FLY_CONDITIONS
        return True

    def _integrate_fly(self, t: float) -> None:
        if self.fly_axes == (0.0, 0.0) or not self._fly_allowed():
            self._tick = max(self._tick, int(math.floor(t * TICK_HZ)))
            return
        dt = 1.0 / TICK_HZ
        reassociate = not self.study_mode and self.condition != ViewCondition.BASELINE
        while (self._tick + 1) / TICK_HZ <= t:
            self.pose = fly_step(self.pose, self.fly_axes, dt, self.nav)
            self._tick += 1
            self.at_overview = False
            tick_time = self._tick / TICK_HZ
            if reassociate:
                self._associate_nearest(tick_time)
            self._check_fop_proximity(tick_time)

    def _associate_nearest(self, t: float) -> None:
        """Flexible navigation: ego adaptations follow the closest node in flight."""
        nearest = int(
            np.argmin(np.linalg.norm(self.positions - self.pose.position[None, :], axis=1))
        )
        if nearest == self.user_node:
            return
        self.user_node = nearest
        self.visited.add(nearest)
        self.view = apply_condition(
            self.g,
            self.positions,
            self.condition,
            nearest,
            self.scene.calibration.bubble_radius,
        )
        self._emit_view(t)
        self._emit_hud(t)

    def _finalize_animation(self, t_arr: float) -> None:
        anim, self.anim = self.anim, None
        self.pose = anim.base_pose.moved_to(anim.target_position)
        self._tick = max(self._tick, int(math.floor(t_arr * TICK_HZ)))
        if anim.kind == "jump":
            self.user_node = anim.target_node
            self.visited.add(anim.target_node)
            self.at_overview = False
            if anim.to_view is not None:
                self.view = anim.to_view
            self.log.append(t_arr, "jump.arrive", {"node": anim.target_node})
            self._emit("anim.update", self.sample_frame(t_arr), t_arr)
            self._emit_view(t_arr)
            self._emit_hud(t_arr)
            if (
                self._active_kind() == TaskKind.FOP
                and self.fop_click_time is not None
                and self.tasks is not None
                and anim.target_node == self.tasks[self.task_index].path[-1]
                and self.fop_highlight >= len(self.tasks[self.task_index].path)
            ):
                self._complete_fop(t_arr)
        else:
            self.at_overview = self._teleport_to_overview
            self.log.append(t_arr, "teleport.arrive", {"overview": self.at_overview})
            self._emit("anim.update", self.sample_frame(t_arr), t_arr)

    def sample_frame(self, t: float) -> dict:
        """Render-stream frame: eased pose plus effective position overrides."""
        if self.anim is not None:
            progress = self.anim.progress(t)
            pose = jump_sample(self.anim, t)
            if self.anim.kind == "jump" and self.anim.from_view and self.anim.to_view:
                eff = morph(self.anim.from_view, self.anim.to_view, self.positions, progress)
                moved = set(self.anim.from_view.displaced_positions) | set(
                    self.anim.to_view.displaced_positions
                )
                overrides = {str(n): [float(c) for c in eff[n]] for n in sorted(moved)}
            else:
                overrides = {}
            return {"t": progress, "pose": _pose_payload(pose), "effective_positions": overrides}
        return {
            "t": 1.0,
            "pose": _pose_payload(self.pose),
            "effective_positions": {
                str(n): [float(c) for c in p]
                for n, p in sorted(self.view.displaced_positions.items())
            },
        }

    # ------------------------------------------------------------- handlers

    def _on_hello(self, msg: Message, t: float) -> None:
        if self.started:
            self._error("session already started", msg.seq, t)
            return
        self.started = True
        self.log.append(
            t,
            "session.header",
            {
                "client": msg.payload.get("client", ""),
                "condition": self.condition.value,
                "nodes": self.g.n,
                "edges": self.g.edge_count,
                "study_mode": self.study_mode,
            },
        )
        self._emit(
            "scene.init",
            {
                "scene": scene_to_dict(self.scene),
                "condition": self.condition.value,
                "study_mode": self.study_mode,
            },
            t,
        )
        if self.tasks:
            self._setup_task(0, t)
        else:
            self._emit_view(t)

    def _on_input_fly(self, msg: Message, t: float) -> None:
        self.fly_axes = (float(msg.payload["axis_x"]), float(msg.payload["axis_y"]))

    def _on_input_pointer(self, msg: Message, t: float) -> None:
        direction = np.asarray(msg.payload["direction"], dtype=float)
        norm = float(np.linalg.norm(direction))
        if norm == 0.0:
            self._error("pointer direction must be nonzero", msg.seq, t)
            return
        direction = direction / norm
        self.pose = Pose(
            position=self.pose.position,
            orientation=look_rotation(direction),
            ray_origin=np.asarray(msg.payload["origin"], dtype=float),
            ray_direction=direction,
        )

    def _check_node(self, node: int, seq: int, t: float) -> bool:
        if not (0 <= node < self.g.n):
            self._error(f"unknown node id {node}", seq, t)
            return False
        return True

    def _on_action_select(self, msg: Message, t: float) -> None:
        node = msg.payload["node"]
        if not self._check_node(node, msg.seq, t):
            return
        kind = self._active_kind()
        if kind == TaskKind.FIN:
            spec = self.tasks[self.task_index]
            if node == spec.target_node:
                self._complete(
                    TaskResult(
                        kind=kind,
                        completion_time=t - self.task_started_at,
                        selected_nodes=(node,),
                    ),
                    t,
                )
        elif kind == TaskKind.FCN:
            self.selected.add(node)
        elif kind == TaskKind.FOP:
            self._fop_click(node, t)

    def _on_action_deselect(self, msg: Message, t: float) -> None:
        node = msg.payload["node"]
        if not self._check_node(node, msg.seq, t):
            return
        if self._active_kind() == TaskKind.FCN:
            self.selected.discard(node)

    def _on_action_jump(self, msg: Message, t: float) -> None:
        node = msg.payload["node"]
        if not self._check_node(node, msg.seq, t):
            return
        if self.condition == ViewCondition.BASELINE:
            self._error("jumping is not available in the baseline interface", msg.seq, t)
            return
        self._start_jump_to(node, t)

    def _on_action_bookmark(self, msg: Message, t: float) -> None:
        node = msg.payload["node"]
        if not self._check_node(node, msg.seq, t):
            return
        if node in self.bookmarks:
            self.bookmarks.discard(node)
        else:
            self.bookmarks.add(node)
        self.log.append(t, "bookmark", {"node": node, "set": node in self.bookmarks})

    def _on_action_switch_view(self, msg: Message, t: float) -> None:
        if self.study_mode:
            self._error("view switching is disabled during study tasks", msg.seq, t)
            return
        if self.anim is not None:
            self._finalize_animation(t)
        if self.at_overview:
            target = self._detail_return or Pose(position=self.positions[0])
            self._teleport_to_overview = False
        else:
            self._detail_return = self.pose
            target = self.scene.overview
            self._teleport_to_overview = True
        self.anim = teleport(t, self.pose, target, self.nav.teleport_duration)
        self.log.append(t, "teleport.start", {"overview": self._teleport_to_overview})
        self._emit("anim.update", self.sample_frame(t), t)

    def _on_task_submit(self, msg: Message, t: float) -> None:
        kind = self._active_kind()
        if kind is None:
            self._error("no task is active", msg.seq, t)
            return
        payload = msg.payload
        if kind == TaskKind.FCN:
            spec = self.tasks[self.task_index]
            truth = common_neighbors(self.g, *spec.pair)
            correctness, miss, fp = score_fcn(self.selected, truth)
            self._complete(
                TaskResult(
                    kind=kind,
                    completion_time=t - self.task_started_at,
                    selected_nodes=tuple(sorted(self.selected)),
                    correctness_rate=correctness,
                    miss_rate=miss,
                    false_positive_rate=fp,
                ),
                t,
            )
        elif kind == TaskKind.END:
            estimate = payload.get("estimate")
            if not _is_int(estimate) or estimate < 0:
                self._error("estimate must be a non-negative integer", msg.seq, t)
                return
            spec = self.tasks[self.task_index]
            err, signed = score_end(estimate, degree(self.g, spec.hub))
            self._complete(
                TaskResult(
                    kind=kind,
                    completion_time=t - self.task_started_at,
                    reported_estimate=estimate,
                    judgement_error=err,
                    judgement_error_signed=signed,
                ),
                t,
            )
        elif kind == TaskKind.SO_OD and self.so_phase == "memorize":
            if not payload.get("ready"):
                self._error("expected {'ready': true} to leave the overview", msg.seq, t)
                return
            spec = self.tasks[self.task_index]
            self.so_phase = "point"
            self._place_at_node(spec.start, t)
            prompt = prompt_payload(spec, self.g)
            prompt["phase"] = "point"
            self._emit("task.prompt", {"index": self.task_index, **prompt}, t)
        elif kind in (TaskKind.SO_OD, TaskKind.SO_DD, TaskKind.SO_DO):
            if not (_is_vec3(payload.get("ray_origin")) and _is_vec3(payload.get("ray_direction"))):
                self._error("expected ray_origin and ray_direction", msg.seq, t)
                return
            spec = self.tasks[self.task_index]
            origin = np.asarray(payload["ray_origin"], dtype=float)
            direction = np.asarray(payload["ray_direction"], dtype=float)
            angle = score_so(origin, direction, self.positions[spec.point_target])
            self._complete(
                TaskResult(
                    kind=kind,
                    completion_time=t - self.task_started_at,
                    ray_origin=tuple(float(c) for c in origin),
                    ray_direction=tuple(float(c) for c in direction),
                    angle_deviation_degrees=angle,
                ),
                t,
            )
        elif kind == TaskKind.FIP:
            reported = payload.get("path")
            if not (
                isinstance(reported, list)
                and reported
                and all(_is_int(v) and 0 <= v < self.g.n for v in reported)
            ):
                self._error("expected a non-empty node id list in 'path'", msg.seq, t)
                return
            spec = self.tasks[self.task_index]
            correct, deviation = score_fip(reported, self.g, spec.truth_path)
            self._complete(
                TaskResult(
                    kind=kind,
                    completion_time=t - self.task_started_at,
                    reported_path=tuple(reported),
                    path_correct=correct,
                    path_deviation=deviation,
                ),
                t,
            )
        else:
            self._error(f"task {kind.value} is not completed by submission", msg.seq, t)

    def _on_questionnaire_submit(self, msg: Message, t: float) -> None:
        instrument = msg.payload["instrument"]
        items = msg.payload["items"]
        count, (lo, hi) = (
            (SSQ_ITEM_COUNT, SSQ_ITEM_RANGE)
            if instrument == "ssq"
            else (TLX_ITEM_COUNT, TLX_ITEM_RANGE)
        )
        if len(items) != count or not all(lo <= v <= hi for v in items):
            self._error(
                f"{instrument} expects {count} items in [{lo}, {hi}]", msg.seq, t
            )
            return
        self.log.append(
            t, "questionnaire", {"instrument": instrument, "items": list(items)}
        )

    # ------------------------------------------------------------ tasks

    def _active_kind(self) -> TaskKind | None:
        if self.tasks is None or not (0 <= self.task_index < len(self.tasks)):
            return None
        return self.tasks[self.task_index].kind

    def _setup_task(self, index: int, t: float) -> None:
        self.task_index = index
        spec = self.tasks[index]
        self.selected = set()
        self.so_phase = None
        self.task_started_at = t
        self.log.append(t, "task.start", {"index": index, "kind": spec.kind.value})
        if spec.kind in (TaskKind.FIN, TaskKind.END):
            self._place_at_node(spec.hub, t)
        elif spec.kind == TaskKind.FCN:
            self._place_at_node(spec.pair[0], t)
        elif spec.kind == TaskKind.SO_OD:
            self.so_phase = "memorize"
            self._place_at_overview(t)
        elif spec.kind == TaskKind.FIP:
            self._place_at_node(spec.start, t)
        elif spec.kind == TaskKind.FOP:
            self.fop_highlight = 0
            self.fop_click_time = None
            self.task_started_at = None  # clock starts at the start-node click
            self._place_at_node(spec.path[0], t)
        elif spec.kind == TaskKind.SO_DO:
            self._place_at_overview(t)
        # SO_DD stays wherever FoP ended
        prompt = prompt_payload(spec, self.g, highlight_index=0)
        self._emit("task.prompt", {"index": index, **prompt}, t)

    def _place_at_node(self, node: int, t: float) -> None:
        """Instant scripted placement (study transitions, SO teleports)."""
        if self.anim is not None:
            self._finalize_animation(t)
        self.pose = self.pose.moved_to(self.positions[node])
        self.at_overview = False
        self._tick = max(self._tick, int(math.floor(t * TICK_HZ)))
        if self.condition != ViewCondition.BASELINE:
            self.user_node = node
            self.visited.add(node)
            self.view = apply_condition(
                self.g,
                self.positions,
                self.condition,
                node,
                self.scene.calibration.bubble_radius,
            )
        self.log.append(t, "teleport.instant", {"node": node})
        self._emit_view(t)
        self._emit_hud(t)

    def _place_at_overview(self, t: float) -> None:
        if self.anim is not None:
            self._finalize_animation(t)
        self.pose = self.scene.overview
        self.at_overview = True
        self.user_node = None
        self.view = EgoViewState(condition=self.condition)
        self._tick = max(self._tick, int(math.floor(t * TICK_HZ)))
        self.log.append(t, "teleport.instant", {"node": None})
        self._emit_view(t)

    def _fop_click(self, node: int, t: float) -> None:
        spec = self.tasks[self.task_index]
        next_index, advanced = fop_progress(spec.path, self.fop_highlight, node)
        if not advanced:
            return
        self.fop_highlight = next_index
        if next_index == 1:
            self.fop_click_time = t
            self.log.append(t, "fop.timer_start", {})
        prompt = prompt_payload(spec, self.g, highlight_index=self.fop_highlight)
        self._emit("task.prompt", {"index": self.task_index, **prompt}, t)
        if self.condition != ViewCondition.BASELINE and node != self.user_node:
            self._start_jump_to(node, t)

    def _check_fop_proximity(self, t: float) -> None:
        if self._active_kind() != TaskKind.FOP or self.fop_click_time is None:
            return
        if self.condition != ViewCondition.BASELINE:
            return
        path = self.tasks[self.task_index].path
        if self.fop_highlight < len(path) - 1:
            return
        reach = FOP_ARRIVAL_RADIUS_FACTOR * self.scene.calibration.node_radius
        if np.linalg.norm(self.pose.position - self.positions[path[-1]]) <= reach:
            self._complete_fop(t)

    def _complete_fop(self, t: float) -> None:
        self._complete(
            TaskResult(
                kind=TaskKind.FOP, completion_time=t - self.fop_click_time
            ),
            t,
        )

    def _complete(self, result: TaskResult, t: float) -> None:
        self.results.append(result)
        self.log.append(
            t,
            "task.complete",
            {
                "index": self.task_index,
                "condition": self.condition.value,
                "result": result.to_dict(),
            },
        )
        self._emit("task.complete", {"index": self.task_index, **result.to_dict()}, t)
        if self.task_index + 1 < len(self.tasks):
            self._setup_task(self.task_index + 1, t)
        else:
            self.task_index = len(self.tasks)
            self.log.append(t, "session.end", {"tasks_completed": len(self.results)})

    # ----------------------------------------------------------- jumps

    def _start_jump_to(self, node: int, t: float) -> None:
        if self.anim is not None:
            # complete-then-start: the previous animation lands instantly
            self._finalize_animation(t)
        to_view = apply_condition(
            self.g,
            self.positions,
            self.condition,
            node,
            self.scene.calibration.bubble_radius,
        )
        self.anim = start_jump(
            t,
            self.pose,
            node,
            self.positions[node],
            from_view=self.view,
            to_view=to_view,
            duration=JUMP_DURATION_S,
        )
        self.log.append(t, "jump.start", {"node": node})
        self._emit("anim.update", self.sample_frame(t), t)

    # ------------------------------------------------------------ emits

    def _emit_view(self, t: float) -> None:
        self._emit("view.state", view_state_payload(self.view, self.g, self.positions), t)

    def _emit_hud(self, t: float) -> None:
        if self.user_node is None:
            return
        self._emit(
            "hud.info",
            {
                "label": self.g.labels[self.user_node],
                "degree": degree(self.g, self.user_node),
            },
            t,
        )


def replay_client_log(
    scene: SceneFile,
    condition: ViewCondition,
    tasks: TaskSet | None,
    log: EventLog,
) -> SessionEngine:
    """Re-feed the logged client messages through a fresh engine."""
    engine = SessionEngine(scene, condition, tasks)
    for rec in log.records:
        if rec.kind != "client":
            continue
        engine.process(
            Message(
                type=rec.payload["type"],
                seq=rec.payload["seq"],
                session_seconds=rec.payload["session_seconds"],
                payload=rec.payload["payload"],
            )
        )
    engine.advance_time(log.end_seconds)
    return engine
