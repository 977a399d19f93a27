"""Per-condition view derivation.

Three conditions form a continuum: baseline leaves the scene untouched,
highlight marks the user node's neighbors and drops its now-redundant
incident edges, and bubble additionally re-seats those neighbors on an
evenly covered sphere around the user and clips every edge crossing it.
All derivations are pure functions of (graph, positions, user node); the
global layout is never mutated, only locally overridden.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import ParameterError
from .graphs import Graph, neighbors
from .navigation import ease

GOLDEN_ANGLE = math.pi * (3.0 - math.sqrt(5.0))

BUBBLE_RADIUS_MIN = 2.0
BUBBLE_RADIUS_MAX = 10.0
BUBBLE_RADIUS_EDGE_FRACTION = 0.5

_SEGMENT_T_EPS = 1e-9


class ViewCondition(str, Enum):
    BASELINE = "baseline"
    HIGHLIGHT = "highlight"
    BUBBLE = "bubble"


Segment = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True, eq=False)
class EgoViewState:
    condition: ViewCondition
    user_node: int | None = None
    highlight_set: frozenset[int] = frozenset()
    hidden_edges: frozenset[tuple[int, int]] = frozenset()
    displaced_positions: dict[int, np.ndarray] = field(default_factory=dict)
    clipped_edges: dict[tuple[int, int], list[Segment]] = field(default_factory=dict)
    bubble_radius: float = 0.0

    def effective_position(self, node: int, base_positions: np.ndarray) -> np.ndarray:
        moved = self.displaced_positions.get(node)
        return moved if moved is not None else base_positions[node]

    def effective_positions(self, base_positions: np.ndarray) -> np.ndarray:
        out = np.array(base_positions, dtype=float, copy=True)
        for node, pos in self.displaced_positions.items():
            out[node] = pos
        return out


def fibonacci_sphere(k: int, radius: float, center: np.ndarray) -> np.ndarray:
    """k points spread evenly on the sphere via the golden-angle lattice.

    Point i: y = 1 - 2(i+0.5)/k, ring radius sqrt(1-y^2), azimuth
    i * pi * (3 - sqrt(5)); all points lie exactly at `radius` from center.
    """
    if k < 1:
        raise ParameterError("fibonacci_sphere needs k >= 1")
    if radius <= 0:
        raise ParameterError("fibonacci_sphere needs a positive radius")
    i = np.arange(k, dtype=float)
    y = 1.0 - 2.0 * (i + 0.5) / k
    ring = np.sqrt(np.maximum(1.0 - y * y, 0.0))
    phi = i * GOLDEN_ANGLE
    unit = np.column_stack([ring * np.cos(phi), y, ring * np.sin(phi)])
    return np.asarray(center, dtype=float)[None, :] + radius * unit


def assign_bubble_slots(
    neighbor_positions: dict[int, np.ndarray],
    user_pos: np.ndarray,
    slots: np.ndarray,
) -> dict[int, np.ndarray]:
    """Deterministic greedy slot assignment by smallest angular displacement.

    Neighbors are processed in ascending node id; each takes the free slot
    closest in angle to its original direction from the user. Greedy, not
    optimal matching, but stable and O(d^2).
    """
    if len(slots) != len(neighbor_positions):
        raise ParameterError(
            f"{len(slots)} slots for {len(neighbor_positions)} neighbors"
        )
    user_pos = np.asarray(user_pos, dtype=float)
    slot_dirs = slots - user_pos[None, :]
    slot_dirs = slot_dirs / np.linalg.norm(slot_dirs, axis=1, keepdims=True)
    free = list(range(len(slots)))
    out: dict[int, np.ndarray] = {}
    for node in sorted(neighbor_positions):
        d = np.asarray(neighbor_positions[node], dtype=float) - user_pos
        n = float(np.linalg.norm(d))
        d = d / n if n > 0 else np.array([1.0, 0.0, 0.0])
        scores = slot_dirs[free] @ d
        pick = free.pop(int(np.argmax(scores)))
        out[node] = slots[pick]
    return out


def _inside_interval(
    p0: np.ndarray, p1: np.ndarray, center: np.ndarray, r: float
) -> tuple[float, float] | None:
    """Parameter window [lo, hi] of the segment inside the sphere, or None."""
    d = p1 - p0
    f = p0 - center
    a = float(d @ d)
    if a == 0.0:
        return (0.0, 1.0) if float(f @ f) < r * r else None
    b = 2.0 * float(f @ d)
    c = float(f @ f) - r * r
    disc = b * b - 4.0 * a * c
    if disc <= 0.0:
        return None  # miss or tangent graze
    sq = math.sqrt(disc)
    t0 = (-b - sq) / (2.0 * a)
    t1 = (-b + sq) / (2.0 * a)
    lo, hi = max(t0, 0.0), min(t1, 1.0)
    if lo >= hi:
        return None
    return lo, hi


def clip_edge_to_sphere(
    p0: np.ndarray, p1: np.ndarray, center: np.ndarray, r: float
) -> list[Segment]:
    """Sub-segments of p0-p1 outside the sphere (0, 1, or 2 of them)."""
    if r <= 0:
        raise ParameterError("clip radius must be positive")
    p0 = np.asarray(p0, dtype=float)
    p1 = np.asarray(p1, dtype=float)
    center = np.asarray(center, dtype=float)
    window = _inside_interval(p0, p1, center, r)
    if window is None:
        return [(p0, p1)]
    lo, hi = window
    d = p1 - p0
    segments: list[Segment] = []
    if lo > _SEGMENT_T_EPS:
        segments.append((p0, p0 + lo * d))
    if hi < 1.0 - _SEGMENT_T_EPS:
        segments.append((p0 + hi * d, p1))
    return segments


def default_bubble_radius(g: Graph, positions: np.ndarray, user_node: int) -> float:
    """Half the median incident-edge length, clamped to a legible range."""
    nbrs = sorted(neighbors(g, user_node))
    if not nbrs:
        return BUBBLE_RADIUS_MIN
    lengths = np.linalg.norm(
        np.asarray(positions)[nbrs] - np.asarray(positions)[user_node][None, :], axis=1
    )
    r = BUBBLE_RADIUS_EDGE_FRACTION * float(np.median(lengths))
    return float(min(max(r, BUBBLE_RADIUS_MIN), BUBBLE_RADIUS_MAX))


def apply_condition(
    g: Graph,
    positions: np.ndarray,
    condition: ViewCondition,
    user_node: int | None = None,
    bubble_radius: float | None = None,
) -> EgoViewState:
    """Derive the per-condition view state for a user node.

    Baseline is the identity. Highlight marks direct neighbors and hides the
    user node's incident edges. Bubble additionally places those neighbors on
    a Fibonacci sphere around the user position and clips every remaining
    visible edge against that sphere; nodes outside the neighborhood keep
    their global layout position untouched.
    """
    positions = np.asarray(positions, dtype=float)
    if condition == ViewCondition.BASELINE:
        return EgoViewState(condition=condition)
    if user_node is None:
        raise ParameterError(f"{condition.value} requires a user node")
    g.check_node(user_node)

    nbrs = frozenset(neighbors(g, user_node))
    hidden = frozenset(
        e for e in g.edges if user_node in e
    )
    if condition == ViewCondition.HIGHLIGHT:
        return EgoViewState(
            condition=condition,
            user_node=user_node,
            highlight_set=nbrs,
            hidden_edges=hidden,
        )

    user_pos = positions[user_node]
    radius = (
        default_bubble_radius(g, positions, user_node)
        if bubble_radius is None
        else float(bubble_radius)
    )
    if radius <= 0:
        raise ParameterError("bubble radius must be positive")
    displaced: dict[int, np.ndarray] = {}
    if nbrs:
        slots = fibonacci_sphere(len(nbrs), radius, user_pos)
        displaced = assign_bubble_slots(
            {v: positions[v] for v in sorted(nbrs)}, user_pos, slots
        )

    clipped: dict[tuple[int, int], list[Segment]] = {}
    for edge in g.edges:
        if edge in hidden:
            continue
        u, v = edge
        a = displaced.get(u, positions[u])
        b = displaced.get(v, positions[v])
        window = _inside_interval(a, b, user_pos, radius)
        if window is None:
            continue
        lo, hi = window
        d = b - a
        segs: list[Segment] = []
        if lo > _SEGMENT_T_EPS:
            segs.append((a, a + lo * d))
        if hi < 1.0 - _SEGMENT_T_EPS:
            segs.append((a + hi * d, b))
        clipped[edge] = segs

    return EgoViewState(
        condition=condition,
        user_node=user_node,
        highlight_set=nbrs,
        hidden_edges=hidden,
        displaced_positions=displaced,
        clipped_edges=clipped,
        bubble_radius=radius,
    )


def morph(
    from_state: EgoViewState,
    to_state: EgoViewState,
    base_positions: np.ndarray,
    t: float,
) -> np.ndarray:
    """Effective node positions partway through a view transition.

    Interpolates each node between its effective position under the two
    states with the eased parameter; t=0 and t=1 reproduce the endpoint
    states exactly.
    """
    base_positions = np.asarray(base_positions, dtype=float)
    a = from_state.effective_positions(base_positions)
    if t <= 0.0:
        return a
    b = to_state.effective_positions(base_positions)
    if t >= 1.0:
        return b
    s = ease(t)
    return (1.0 - s) * a + s * b


def geodesic_color(distance: int, max_distance: int) -> tuple[float, float, float]:
    """Hop-distance ramp: 0/1 hops map to red, max_distance to yellow."""
    if max_distance < 1:
        raise ParameterError("max_distance must be >= 1")
    if max_distance <= 1:
        green = 0.0
    else:
        green = min(max((distance - 1.0) / (max_distance - 1.0), 0.0), 1.0)
    return (1.0, green, 0.0)


def lowlight_set(g: Graph, hovered_node: int) -> tuple[set[int], set[tuple[int, int]]]:
    """Everything to dim while the pointer rests on a node.

    Keeps the hovered node, its neighbors, and its incident edges; all other
    nodes and edges are dimmed.
    """
    keep = neighbors(g, hovered_node) | {hovered_node}
    dim_nodes = set(g.nodes) - keep
    dim_edges = {e for e in g.edges if hovered_node not in e}
    return dim_nodes, dim_edges
