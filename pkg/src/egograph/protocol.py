"""Wire protocol and file schemas.

Every message travels in a typed envelope {type, seq, session_seconds,
payload} with per-direction strictly increasing sequence numbers. Unknown
types are rejected loudly; payloads are validated field by field so that a
malformed client can never silently corrupt a session. Scene files bundle
everything a session needs: graph, positions, layout parameters, navigation
calibration, and the overview vantage point.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ParameterError, ProtocolError
from .graphs import (
    GeneratorParams,
    Graph,
    geodesic_distances,
    graph_from_dict,
    graph_to_dict,
    shortest_path,
)
from .layout import LayoutParams, run_layout
from .navigation import Pose, overview_pose

REFERENCE_PATH_SECONDS = 25.0  # target flight time along a 5-node path
NODE_RADIUS = 2.0  # rendered sphere size; also drives picking and proximity
_CALIBRATION_SAMPLES = 400


def _is_num(x) -> bool:
    return isinstance(x, (int, float)) and not isinstance(x, bool) and math.isfinite(x)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _is_vec3(x) -> bool:
    return isinstance(x, (list, tuple)) and len(x) == 3 and all(_is_num(v) for v in x)


def _is_axis(x) -> bool:
    return _is_num(x) and -1.0 <= x <= 1.0


_NODE_FIELD = {"node": _is_int}

CLIENT_PAYLOADS: dict[str, dict] = {
    "hello": {"client": lambda x: isinstance(x, str)},
    "input.fly": {"axis_x": _is_axis, "axis_y": _is_axis},
    "input.pointer": {"origin": _is_vec3, "direction": _is_vec3},
    "action.select": _NODE_FIELD,
    "action.deselect": _NODE_FIELD,
    "action.jump": _NODE_FIELD,
    "action.bookmark": _NODE_FIELD,
    "action.switch_view": {},
    "task.submit": None,  # kind-specific; validated by the session
    "questionnaire.submit": {
        "instrument": lambda x: x in ("ssq", "tlx"),
        "items": lambda x: isinstance(x, list) and all(_is_num(v) for v in x),
    },
}

SERVER_PAYLOADS: dict[str, dict | None] = {
    "scene.init": None,
    "view.state": None,
    "anim.update": None,
    "task.prompt": None,
    "task.complete": None,
    "hud.info": None,
    "error": {"message": lambda x: isinstance(x, str), "ref_seq": _is_int},
}


@dataclass(frozen=True)
class Message:
    type: str
    seq: int
    session_seconds: float
    payload: dict


def encode_message(msg: Message) -> str:
    return json.dumps(
        {
            "type": msg.type,
            "seq": msg.seq,
            "session_seconds": msg.session_seconds,
            "payload": msg.payload,
        }
    )


def decode_message(text: str, direction: str = "client") -> Message:
    """Parse and validate one envelope; direction is 'client' or 'server'."""
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProtocolError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ProtocolError("message must be a JSON object")
    for key in ("type", "seq", "session_seconds", "payload"):
        if key not in obj:
            raise ProtocolError(f"envelope missing '{key}'")
    mtype = obj["type"]
    registry = CLIENT_PAYLOADS if direction == "client" else SERVER_PAYLOADS
    if mtype not in registry:
        raise ProtocolError(f"unknown message type '{mtype}'")
    if not _is_int(obj["seq"]) or obj["seq"] < 1:
        raise ProtocolError("seq must be a positive integer")
    if not _is_num(obj["session_seconds"]) or obj["session_seconds"] < 0:
        raise ProtocolError("session_seconds must be a non-negative number")
    payload = obj["payload"]
    if not isinstance(payload, dict):
        raise ProtocolError("payload must be an object")
    schema = registry[mtype]
    if schema is not None:
        for name, check in schema.items():
            if name not in payload:
                raise ProtocolError(f"{mtype} payload missing '{name}'")
            if not check(payload[name]):
                raise ProtocolError(f"{mtype} payload field '{name}' is invalid")
    return Message(
        type=mtype,
        seq=obj["seq"],
        session_seconds=float(obj["session_seconds"]),
        payload=payload,
    )


class SequenceChecker:
    """Enforces strictly increasing seq per direction."""

    def __init__(self) -> None:
        self.last = 0

    def check(self, seq: int) -> None:
        if seq <= self.last:
            raise ProtocolError(f"seq {seq} not greater than previous {self.last}")
        self.last = seq


@dataclass(frozen=True)
class SceneCalibration:
    max_fly_speed: float
    bubble_radius: float
    node_radius: float = NODE_RADIUS


@dataclass(frozen=True, eq=False)
class SceneFile:
    graph: Graph
    params: GeneratorParams
    positions: np.ndarray
    layout_params: LayoutParams
    calibration: SceneCalibration
    overview: Pose


def _reference_path_length(g: Graph, positions: np.ndarray, hops: int = 4) -> float:
    """Median Euclidean length over sampled canonical shortest paths of `hops` hops."""
    rng = np.random.default_rng(np.random.PCG64(0))
    starts = rng.permutation(g.n)[: min(_CALIBRATION_SAMPLES, g.n)]
    lengths = []
    for s in starts:
        dist = geodesic_distances(g, int(s))
        ends = sorted(v for v, d in dist.items() if d == hops)
        for _ in range(min(3, len(ends))):
            e = ends[int(rng.integers(len(ends)))]
            path = shortest_path(g, int(s), e)
            legs = np.diff(positions[list(path)], axis=0)
            lengths.append(float(np.linalg.norm(legs, axis=1).sum()))
    if not lengths:
        # degenerate scene: fall back to a bounding-scale guess
        span = float(np.linalg.norm(positions.max(axis=0) - positions.min(axis=0)))
        return max(span, 1.0)
    return float(np.median(lengths))


def _scene_bubble_radius(g: Graph, positions: np.ndarray) -> float:
    if not g.edges:
        return 2.0
    e = np.array(g.edges)
    lengths = np.linalg.norm(positions[e[:, 0]] - positions[e[:, 1]], axis=1)
    return float(min(max(0.5 * float(np.median(lengths)), 2.0), 10.0))


def build_scene(
    g: Graph, params: GeneratorParams, layout_params: LayoutParams | None = None
) -> SceneFile:
    """Lay the graph out and derive the scene's navigation calibration.

    max_fly_speed is set so that flying a typical 5-node path takes the
    reference 25 seconds, which fixes the jump/fly speed ratio the timing
    model depends on.
    """
    layout_params = layout_params or LayoutParams()
    positions = run_layout(g, layout_params)
    ref = _reference_path_length(g, positions)
    calibration = SceneCalibration(
        max_fly_speed=ref / REFERENCE_PATH_SECONDS,
        bubble_radius=_scene_bubble_radius(g, positions),
    )
    return SceneFile(
        graph=g,
        params=params,
        positions=positions,
        layout_params=layout_params,
        calibration=calibration,
        overview=overview_pose(positions),
    )


def scene_to_dict(scene: SceneFile) -> dict:
    return {
        "graph": graph_to_dict(scene.graph, scene.params),
        "positions": [[float(c) for c in row] for row in scene.positions],
        "layout_params": {
            "link_distance": scene.layout_params.link_distance,
            "link_strength": scene.layout_params.link_strength,
            "repulsion_strength": scene.layout_params.repulsion_strength,
            "center_strength": scene.layout_params.center_strength,
            "alpha_start": scene.layout_params.alpha_start,
            "alpha_min": scene.layout_params.alpha_min,
            "alpha_decay": scene.layout_params.alpha_decay,
            "velocity_decay": scene.layout_params.velocity_decay,
            "max_iterations": scene.layout_params.max_iterations,
            "seed": scene.layout_params.seed,
        },
        "calibration": {
            "max_fly_speed": scene.calibration.max_fly_speed,
            "bubble_radius": scene.calibration.bubble_radius,
            "node_radius": scene.calibration.node_radius,
        },
        "overview_pose": {
            "position": [float(c) for c in scene.overview.position],
            "orientation": [float(c) for c in scene.overview.orientation],
        },
    }


def scene_from_dict(obj: dict) -> SceneFile:
    for key in ("graph", "positions", "layout_params", "calibration", "overview_pose"):
        if key not in obj:
            raise ParameterError(f"scene file missing '{key}'")
    g, params = graph_from_dict(obj["graph"])
    positions = np.asarray(obj["positions"], dtype=float)
    if positions.shape != (g.n, 3):
        raise ParameterError(
            f"scene has {positions.shape} positions for {g.n} nodes"
        )
    cal = obj["calibration"]
    for key in ("max_fly_speed", "bubble_radius"):
        if key not in cal:
            raise ParameterError(f"scene calibration missing '{key}'")
    return SceneFile(
        graph=g,
        params=params,
        positions=positions,
        layout_params=LayoutParams(**obj["layout_params"]),
        calibration=SceneCalibration(
            max_fly_speed=float(cal["max_fly_speed"]),
            bubble_radius=float(cal["bubble_radius"]),
            node_radius=float(cal.get("node_radius", NODE_RADIUS)),
        ),
        overview=Pose(
            position=np.asarray(obj["overview_pose"]["position"], dtype=float),
            orientation=np.asarray(obj["overview_pose"]["orientation"], dtype=float),
        ),
    )


def save_scene(path: str | Path, scene: SceneFile) -> None:
    Path(path).write_text(json.dumps(scene_to_dict(scene)), encoding="utf-8")


def load_scene(path: str | Path) -> SceneFile:
    return scene_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
