"""Task instance generation and response scoring.

Eight task kinds run in a fixed order per session. Generation samples
qualifying entities uniformly with a seeded RNG and keeps task entities
disjoint where the graph allows it; scoring is exact set/path/angle
arithmetic with no hidden tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError, TaskGenerationError
from .graphs import Graph, common_neighbors, degree, geodesic_distances, neighbors, shortest_path
from .navigation import angular_deviation

FIN_DEGREE_RANGE = (14, 44)
FCN_COMMON_RANGE = (1, 5)
END_DEGREE_RANGE = (21, 53)
FIP_PATH_NODE_COUNTS = (4, 5)
FOP_PATH_NODE_COUNT = 5


class TaskKind(str, Enum):
    FIN = "FiN"
    FCN = "FCN"
    END = "END"
    SO_OD = "SO_OD"
    FIP = "FiP"
    FOP = "FoP"
    SO_DD = "SO_DD"
    SO_DO = "SO_DO"


TASK_ORDER = (
    TaskKind.FIN,
    TaskKind.FCN,
    TaskKind.END,
    TaskKind.SO_OD,
    TaskKind.FIP,
    TaskKind.FOP,
    TaskKind.SO_DD,
    TaskKind.SO_DO,
)


@dataclass(frozen=True)
class TaskSpec:
    kind: TaskKind
    hub: int | None = None  # FiN, END
    target_node: int | None = None  # FiN
    target_label: str | None = None  # FiN
    pair: tuple[int, int] | None = None  # FCN
    start: int | None = None  # SO_OD, FiP
    end: int | None = None  # SO_OD, FiP
    truth_path: tuple[int, ...] | None = None  # SO_OD, FiP (shared pair)
    path: tuple[int, ...] | None = None  # FoP
    point_target: int | None = None  # SO_* ground-truth direction node

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value}
        for name in (
            "hub",
            "target_node",
            "target_label",
            "pair",
            "start",
            "end",
            "truth_path",
            "path",
            "point_target",
        ):
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "TaskSpec":
        kind = TaskKind(obj["kind"])
        kwargs = {}
        for name in ("hub", "target_node", "target_label", "start", "end", "point_target"):
            if name in obj:
                kwargs[name] = obj[name]
        if "pair" in obj:
            kwargs["pair"] = tuple(obj["pair"])
        for name in ("truth_path", "path"):
            if name in obj:
                kwargs[name] = tuple(obj[name])
        return cls(kind=kind, **kwargs)


@dataclass
class TaskResult:
    kind: TaskKind
    completion_time: float
    selected_nodes: tuple[int, ...] = ()
    reported_estimate: int | None = None
    reported_path: tuple[int, ...] | None = None
    ray_origin: tuple[float, float, float] | None = None
    ray_direction: tuple[float, float, float] | None = None
    correctness_rate: float | None = None
    miss_rate: float | None = None
    false_positive_rate: float | None = None
    judgement_error: float | None = None
    judgement_error_signed: float | None = None
    path_correct: bool | None = None
    path_deviation: float | None = None
    angle_deviation_degrees: float | None = None

    def to_dict(self) -> dict:
        out = {"kind": self.kind.value, "completion_time": self.completion_time}
        for name in (
            "selected_nodes",
            "reported_estimate",
            "reported_path",
            "ray_origin",
            "ray_direction",
            "correctness_rate",
            "miss_rate",
            "false_positive_rate",
            "judgement_error",
            "judgement_error_signed",
            "path_correct",
            "path_deviation",
            "angle_deviation_degrees",
        ):
            value = getattr(self, name)
            if value is not None and value != ():
                out[name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_dict(cls, obj: dict) -> "TaskResult":
        kwargs = dict(obj)
        kwargs["kind"] = TaskKind(kwargs["kind"])
        for name in ("selected_nodes", "reported_path", "ray_origin", "ray_direction"):
            if name in kwargs and kwargs[name] is not None:
                kwargs[name] = tuple(kwargs[name])
        return cls(**kwargs)


TaskSet = tuple[TaskSpec, ...]


def _choice(rng: np.random.Generator, items: list):
    return items[int(rng.integers(len(items)))]


def _prefer_unused(cands: list, used: set[int], key=lambda c: {c}) -> list:
    fresh = [c for c in cands if not (key(c) & used)]
    return fresh if fresh else cands


def _distance_pairs(
    g: Graph, node_counts: tuple[int, ...], rng: np.random.Generator, used: set[int]
) -> tuple[int, int]:
    """A (start, end) pair whose canonical shortest path has a wanted node count."""
    hops = tuple(c - 1 for c in node_counts)
    starts = list(g.nodes)
    order = rng.permutation(len(starts))
    fallback = None
    for idx in order:
        start = starts[int(idx)]
        dist = geodesic_distances(g, start)
        ends = sorted(v for v, d in dist.items() if d in hops)
        if not ends:
            continue
        fresh_start = start not in used
        fresh_ends = [v for v in ends if v not in used]
        if fresh_start and fresh_ends:
            return start, _choice(rng, fresh_ends)
        if fallback is None:
            fallback = (start, _choice(rng, ends))
    if fallback is not None:
        return fallback
    wanted = " or ".join(str(c) for c in node_counts)
    raise TaskGenerationError(f"no node pair with a {wanted}-node shortest path")


def generate_tasks(g: Graph, positions: np.ndarray, seed: int) -> TaskSet:
    """One instance of every task kind, in presentation order.

    SO_OD and FiP share their node pair; SO_DD/SO_DO point back at the FoP
    path's endpoints. Raises TaskGenerationError naming the first constraint
    the graph cannot satisfy.
    """
    del positions  # constraints are purely topological; signature kept uniform
    rng = np.random.default_rng(np.random.PCG64(seed))
    used: set[int] = set()

    fin_hubs = [v for v in g.nodes if FIN_DEGREE_RANGE[0] <= degree(g, v) <= FIN_DEGREE_RANGE[1]]
    if not fin_hubs:
        raise TaskGenerationError(
            f"no FiN hub with degree in {list(FIN_DEGREE_RANGE)}"
        )
    fin_hub = _choice(rng, _prefer_unused(fin_hubs, used))
    fin_target = _choice(rng, sorted(neighbors(g, fin_hub)))
    used |= {fin_hub, fin_target}
    fin = TaskSpec(
        kind=TaskKind.FIN,
        hub=fin_hub,
        target_node=fin_target,
        target_label=g.labels[fin_target],
    )

    adj = np.zeros((g.n, g.n), dtype=np.int32)
    for u, v in g.edges:
        adj[u, v] = adj[v, u] = 1
    counts = adj @ adj
    iu, iv = np.triu_indices(g.n, k=1)
    band = (counts[iu, iv] >= FCN_COMMON_RANGE[0]) & (counts[iu, iv] <= FCN_COMMON_RANGE[1])
    fcn_pairs = list(zip(iu[band].tolist(), iv[band].tolist()))
    if not fcn_pairs:
        raise TaskGenerationError(
            f"no node pair with {FCN_COMMON_RANGE[0]}-{FCN_COMMON_RANGE[1]} common neighbors"
        )
    fcn_pair = _choice(rng, _prefer_unused(fcn_pairs, used, key=lambda p: set(p)))
    used |= set(fcn_pair)
    fcn = TaskSpec(kind=TaskKind.FCN, pair=fcn_pair)

    end_hubs = [v for v in g.nodes if END_DEGREE_RANGE[0] <= degree(g, v) <= END_DEGREE_RANGE[1]]
    if not end_hubs:
        raise TaskGenerationError(
            f"no END hub with degree in {list(END_DEGREE_RANGE)}"
        )
    end_hub = _choice(rng, _prefer_unused(end_hubs, used))
    used.add(end_hub)
    end_task = TaskSpec(kind=TaskKind.END, hub=end_hub)

    fip_start, fip_end = _distance_pairs(g, FIP_PATH_NODE_COUNTS, rng, used)
    fip_path = tuple(shortest_path(g, fip_start, fip_end))
    used |= {fip_start, fip_end}
    so_od = TaskSpec(
        kind=TaskKind.SO_OD,
        start=fip_start,
        end=fip_end,
        truth_path=fip_path,
        point_target=fip_end,
    )
    fip = TaskSpec(
        kind=TaskKind.FIP, start=fip_start, end=fip_end, truth_path=fip_path
    )

    fop_start, fop_end = _distance_pairs(g, (FOP_PATH_NODE_COUNT,), rng, used)
    fop_path = tuple(shortest_path(g, fop_start, fop_end))
    used |= set(fop_path)
    fop = TaskSpec(kind=TaskKind.FOP, path=fop_path)
    so_dd = TaskSpec(kind=TaskKind.SO_DD, point_target=fop_path[0])
    so_do = TaskSpec(kind=TaskKind.SO_DO, point_target=fop_path[-1])

    return (fin, fcn, end_task, so_od, fip, fop, so_dd, so_do)


def score_fcn(selected: set[int], truth: set[int]) -> tuple[float, float, float]:
    """(correctness, miss, false-positive) rates for a common-neighbor pick set."""
    if not truth:
        raise ParameterError("FCN truth set must be non-empty")
    correctness = len(selected & truth) / len(truth)
    miss = len(truth - selected) / len(truth)
    false_positive = len(selected - truth) / max(1, len(selected))
    return correctness, miss, false_positive


def score_end(estimate: int, truth_degree: int) -> tuple[float, float]:
    """Relative judgement error and its signed value (negative = underestimate)."""
    if truth_degree < 1:
        raise ParameterError("truth degree must be >= 1")
    if estimate < 0:
        raise ParameterError("degree estimate cannot be negative")
    signed = (estimate - truth_degree) / truth_degree
    return abs(signed), signed


def score_fip(
    reported: list[int] | tuple[int, ...], g: Graph, truth_path: tuple[int, ...]
) -> tuple[bool, float | None]:
    """Path correctness and, when correct, edge-count ratio vs the shortest path."""
    if not reported:
        raise ParameterError("reported path is empty")
    if reported[0] != truth_path[0] or reported[-1] != truth_path[-1]:
        return False, None
    eset = set(g.edges)
    for a, b in zip(reported, reported[1:]):
        if a == b or (min(a, b), max(a, b)) not in eset:
            return False, None
    deviation = (len(reported) - 1) / (len(truth_path) - 1)
    return True, deviation


def score_so(
    ray_origin, ray_direction, target_position
) -> float:
    """Angular deviation in degrees between the pointed ray and the true direction."""
    return angular_deviation(ray_origin, ray_direction, target_position)


def fop_progress(
    path: tuple[int, ...], highlighted_index: int, clicked_node: int
) -> tuple[int, bool]:
    """Advance the follow-path highlight on a correct click.

    Returns (next highlighted index, whether the click advanced). Clicks on
    anything but the currently highlighted node are ignored.
    """
    if 0 <= highlighted_index < len(path) and clicked_node == path[highlighted_index]:
        return highlighted_index + 1, True
    return highlighted_index, False


def task_set_to_dict(tasks: TaskSet, seed: int) -> dict:
    return {"seed": seed, "tasks": [t.to_dict() for t in tasks]}


def task_set_from_dict(obj: dict) -> tuple[TaskSet, int]:
    tasks = tuple(TaskSpec.from_dict(t) for t in obj["tasks"])
    kinds = tuple(t.kind for t in tasks)
    if kinds != TASK_ORDER:
        raise ParameterError("task file does not follow the fixed task order")
    return tasks, int(obj["seed"])


def prompt_payload(spec: TaskSpec, g: Graph, highlight_index: int | None = None) -> dict:
    """Public fields shown to the participant (ground truth stays server-side)."""
    kind = spec.kind
    if kind == TaskKind.FIN:
        return {
            "kind": kind.value,
            "hub": spec.hub,
            "target_label": spec.target_label,
            "instruction": f"Find and select the neighbor labeled {spec.target_label}.",
        }
    if kind == TaskKind.FCN:
        u, v = spec.pair
        return {
            "kind": kind.value,
            "pair": [u, v],
            "instruction": (
                f"Select all common neighbors of {g.labels[u]} and {g.labels[v]}, "
                "then submit."
            ),
        }
    if kind == TaskKind.END:
        return {
            "kind": kind.value,
            "hub": spec.hub,
            "instruction": f"Estimate the number of neighbors of {g.labels[spec.hub]}.",
        }
    if kind == TaskKind.SO_OD:
        return {
            "kind": kind.value,
            "start": spec.start,
            "end": spec.end,
            "instruction": (
                "Memorize the highlighted start and end nodes, submit when ready, "
                "then point toward the end node."
            ),
        }
    if kind == TaskKind.FIP:
        return {
            "kind": kind.value,
            "start": spec.start,
            "end": spec.end,
            "instruction": (
                f"Report the shortest path from {g.labels[spec.start]} "
                f"to {g.labels[spec.end]} as a node list."
            ),
        }
    if kind == TaskKind.FOP:
        return {
            "kind": kind.value,
            "path": list(spec.path),
            "highlight_index": highlight_index if highlight_index is not None else 0,
            "instruction": "Follow the highlighted path as quickly as possible.",
        }
    if kind == TaskKind.SO_DD:
        return {
            "kind": kind.value,
            "instruction": "Point back toward the node where the path started.",
        }
    return {
        "kind": kind.value,
        "instruction": "Point toward the last node of the path you followed.",
    }
