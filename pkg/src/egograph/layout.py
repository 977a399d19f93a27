"""Deterministic 3D force-directed layout.

Spring-electrical model with cooling: springs pull edge endpoints toward a
rest length, an octree-approximated many-body force pushes all node pairs
apart, and a weak positioning force keeps the cloud near the origin. Forces
accumulate into velocities scaled by the cooling factor alpha, velocities
decay each tick, and alpha relaxes toward alpha_min, so every run freezes
after a bounded number of ticks regardless of wall clock.

The documented defaults (link_distance=30, repulsion_strength=-30,
alpha_decay=0.0228, velocity_decay=0.4) are part of the engine contract:
identical (graph, params, seed) triples must reproduce identical layouts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .graphs import Graph

BARNES_HUT_THETA = 0.9  # opening criterion: cell side / distance < theta
REPULSION_DISTANCE_MIN = 1.0  # near-field clamp, avoids singular kicks
_LINK_ITERATIONS = 4  # constraint-style spring relaxation passes per tick
_INIT_JITTER = 1e-3  # fraction of the spiral spread
_COINCIDENT_JITTER = 1e-6  # separation applied to exactly coincident nodes


@dataclass(frozen=True)
class LayoutParams:
    link_distance: float = 30.0
    link_strength: float = 1.0
    repulsion_strength: float = -30.0
    center_strength: float = 0.02
    alpha_start: float = 1.0
    alpha_min: float = 0.001
    alpha_decay: float = 0.0228
    velocity_decay: float = 0.4
    max_iterations: int = 300
    seed: int = 0

    def validate(self) -> None:
        if not (0.0 < self.alpha_min < self.alpha_start <= 1.0):
            raise ParameterError("need 0 < alpha_min < alpha_start <= 1")
        if not (0.0 < self.alpha_decay < 1.0):
            raise ParameterError("need 0 < alpha_decay < 1")
        if not (0.0 <= self.velocity_decay < 1.0):
            raise ParameterError("need 0 <= velocity_decay < 1")


@dataclass(frozen=True, eq=False)
class LayoutState:
    positions: np.ndarray  # (n, 3)
    velocities: np.ndarray  # (n, 3)
    alpha: float


def _spiral_directions(n: int) -> np.ndarray:
    i = np.arange(n, dtype=float)
    y = 1.0 - 2.0 * (i + 0.5) / n
    ring = np.sqrt(np.maximum(1.0 - y * y, 0.0))
    phi = i * np.pi * (3.0 - np.sqrt(5.0))
    return np.column_stack([ring * np.cos(phi), y, ring * np.sin(phi)])


def init_layout(g: Graph, params: LayoutParams) -> LayoutState:
    """Seeded phyllotaxis ball: distinct positions, zero velocities."""
    params.validate()
    rng = np.random.default_rng(np.random.PCG64(params.seed))
    n = g.n
    radius = params.link_distance * np.cbrt(np.arange(n, dtype=float))
    positions = radius[:, None] * _spiral_directions(n)
    positions += rng.normal(scale=_INIT_JITTER * params.link_distance, size=(n, 3))
    return LayoutState(
        positions=positions,
        velocities=np.zeros((n, 3)),
        alpha=params.alpha_start,
    )


def _separate_coincident(positions: np.ndarray) -> np.ndarray:
    """Nudge exactly coincident rows apart along fixed per-index directions."""
    out = None
    seen: dict[bytes, int] = {}
    dirs = None
    for i, row in enumerate(positions):
        key = row.tobytes()
        if key in seen:
            if out is None:
                out = positions.copy()
                dirs = _spiral_directions(len(positions))
            out[i] = row + _COINCIDENT_JITTER * dirs[i]
        else:
            seen[key] = i
    return positions if out is None else out


class _Octree:
    """Array-backed octree with one point per leaf.

    Aggregates per cell: occupant count, center of mass, and the quadrupole
    tensor sum (p - com)(p - com)^T. The quadrupole term keeps the per-node
    approximation error well under the documented 5% bound at theta = 0.9,
    where a monopole-only sum would not.
    """

    __slots__ = ("children", "point", "center", "half", "parent", "depth",
                 "com", "count", "quad", "com_offset")

    def __init__(self, positions: np.ndarray):
        n = len(positions)
        pts = positions.tolist()  # plain floats keep the insert loop cheap
        lo = positions.min(axis=0)
        hi = positions.max(axis=0)
        side = float((hi - lo).max())
        side = side if side > 0 else 1.0
        root = tuple((lo + hi) / 2.0)
        children: list[list[int]] = [[-1] * 8]
        point: list[int] = [-1]
        center: list[tuple[float, float, float]] = [root]
        half: list[float] = [side / 2.0]
        parent: list[int] = [-1]
        depth: list[int] = [0]
        has_kids: list[bool] = [False]

        def make_child(cell: int, octant: int) -> int:
            h = half[cell] / 2.0
            cx, cy, cz = center[cell]
            children.append([-1] * 8)
            point.append(-1)
            center.append(
                (
                    cx + (h if octant & 4 else -h),
                    cy + (h if octant & 2 else -h),
                    cz + (h if octant & 1 else -h),
                )
            )
            half.append(h)
            parent.append(cell)
            depth.append(depth[cell] + 1)
            has_kids.append(False)
            idx = len(children) - 1
            children[cell][octant] = idx
            has_kids[cell] = True
            return idx

        for i in range(n):
            px, py, pz = pts[i]
            cell = 0
            while True:
                if point[cell] == -1 and not has_kids[cell]:
                    point[cell] = i  # empty leaf takes the point
                    break
                if point[cell] != -1:
                    # split: push the resident point one level down
                    resident = point[cell]
                    point[cell] = -1
                    rx, ry, rz = pts[resident]
                    cx, cy, cz = center[cell]
                    oct_r = ((rx >= cx) << 2) | ((ry >= cy) << 1) | (rz >= cz)
                    point[make_child(cell, oct_r)] = resident
                cx, cy, cz = center[cell]
                oct_p = ((px >= cx) << 2) | ((py >= cy) << 1) | (pz >= cz)
                nxt = children[cell][oct_p]
                cell = nxt if nxt != -1 else make_child(cell, oct_p)

        self.children = np.array(children, dtype=np.int64)
        self.point = np.array(point, dtype=np.int64)
        self.center = np.array(center)
        self.half = np.array(half)
        self.parent = np.array(parent, dtype=np.int64)
        self.depth = np.array(depth, dtype=np.int64)
        self._build_aggregates(positions)

    def _build_aggregates(self, positions: np.ndarray) -> None:
        m = len(self.point)
        count = np.zeros(m, dtype=np.int64)
        weighted = np.zeros((m, 3))
        leaves = self.point != -1
        count[leaves] = 1
        weighted[leaves] = positions[self.point[leaves]]
        # level passes, deepest first: children fold into their parents
        levels = [np.flatnonzero(self.depth == d) for d in range(int(self.depth.max()) + 1)]
        for cells in reversed(levels[1:]):
            np.add.at(count, self.parent[cells], count[cells])
            np.add.at(weighted, self.parent[cells], weighted[cells])
        com = weighted / np.maximum(count, 1)[:, None]
        quad = np.zeros((m, 3, 3))
        for cells in reversed(levels[1:]):
            d = com[cells] - com[self.parent[cells]]
            contrib = quad[cells] + count[cells, None, None] * np.einsum(
                "ka,kb->kab", d, d
            )
            np.add.at(quad, self.parent[cells], contrib)
        self.com = com
        self.count = count
        self.quad = quad
        self.com_offset = np.linalg.norm(self.com - self.center, axis=1)


def barnes_hut_repulsion(
    positions: np.ndarray,
    strength: float,
    theta: float = BARNES_HUT_THETA,
    distance_min: float = REPULSION_DISTANCE_MIN,
) -> np.ndarray:
    """Per-node many-body field sum_j (p_j - p_i) * strength / max(r^2, m^2).

    Negative strength repels. Cells pass the opening test when
    side/theta + |com - cell center| < distance, and accepted cells
    contribute their monopole plus quadrupole expansion.
    """
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    if n < 2:
        return np.zeros_like(positions)
    positions = _separate_coincident(positions)
    tree = _Octree(positions)
    forces = np.zeros_like(positions)
    dmin2 = distance_min * distance_min

    targets = np.arange(n, dtype=np.int64)
    cells = np.zeros(n, dtype=np.int64)  # everyone starts at the root
    while len(targets):
        rel = tree.com[cells] - positions[targets]
        d2 = np.einsum("ij,ij->i", rel, rel)
        is_leaf = tree.point[cells] != -1
        reach = 2.0 * tree.half[cells] / theta + tree.com_offset[cells]
        accept = is_leaf | (reach * reach < d2)
        use = accept & ~(is_leaf & (tree.point[cells] == targets))
        if use.any():
            d2c = np.maximum(d2[use], dmin2)
            r = rel[use]
            cell_ids = cells[use]
            contrib = r * (tree.count[cell_ids] / d2c)[:, None]
            internal = ~is_leaf[use]  # leaves carry a zero quadrupole
            if internal.any():
                q = tree.quad[cell_ids[internal]]
                ri = r[internal]
                d2i = d2c[internal]
                qr = np.einsum("kab,kb->ka", q, ri)
                tr_q = np.einsum("kaa->k", q)
                rqr = np.einsum("ka,ka->k", ri, qr)
                contrib[internal] += (-2.0 * qr - tr_q[:, None] * ri) / (d2i**2)[
                    :, None
                ] + 4.0 * (rqr / (d2i**3))[:, None] * ri
            np.add.at(forces, targets[use], strength * contrib)
        expand = ~accept
        if not expand.any():
            break
        kids = tree.children[cells[expand]].reshape(-1)
        parent_targets = np.repeat(targets[expand], 8)
        keep = kids != -1
        targets = parent_targets[keep]
        cells = kids[keep]
    return forces


def _link_arrays(g: Graph):
    if not g.edges:
        return None
    e = np.array(g.edges, dtype=np.int64)
    deg = np.zeros(g.n)
    for u, v in g.edges:
        deg[u] += 1
        deg[v] += 1
    src, dst = e[:, 0], e[:, 1]
    bias = deg[src] / (deg[src] + deg[dst])
    strength = 1.0 / np.minimum(deg[src], deg[dst])
    return src, dst, bias, strength


def layout_step(state: LayoutState, g: Graph, params: LayoutParams) -> LayoutState:
    """One cooling tick: springs, octree repulsion, centering, integration."""
    params.validate()
    pos = state.positions.copy()
    vel = state.velocities.copy()
    alpha = state.alpha

    links = _link_arrays(g)
    if links is not None:
        src, dst, bias, strength = links
        strength = strength * params.link_strength
        for _ in range(_LINK_ITERATIONS):
            delta = (pos[dst] + vel[dst]) - (pos[src] + vel[src])
            dist = np.linalg.norm(delta, axis=1)
            degenerate = dist < 1e-12
            if degenerate.any():
                delta[degenerate] = _COINCIDENT_JITTER * _spiral_directions(g.n)[src[degenerate]]
                dist[degenerate] = _COINCIDENT_JITTER
            coef = (dist - params.link_distance) / dist * alpha * strength
            adj = delta * coef[:, None]
            np.subtract.at(vel, dst, adj * bias[:, None])
            np.add.at(vel, src, adj * (1.0 - bias)[:, None])

    vel += alpha * barnes_hut_repulsion(pos, params.repulsion_strength)
    vel += (0.0 - pos) * (params.center_strength * alpha)

    vel *= 1.0 - params.velocity_decay
    pos += vel
    alpha += (params.alpha_min - alpha) * params.alpha_decay
    return LayoutState(positions=pos, velocities=vel, alpha=alpha)


def run_layout(g: Graph, params: LayoutParams | None = None) -> np.ndarray:
    """Run the cooling schedule to rest; positions are recentered on origin."""
    params = params or LayoutParams()
    state = init_layout(g, params)
    for _ in range(params.max_iterations):
        if state.alpha <= params.alpha_min:
            break
        state = layout_step(state, g, params)
    positions = state.positions - state.positions.mean(axis=0, keepdims=True)
    if not np.isfinite(positions).all():
        raise ParameterError("layout diverged to non-finite coordinates")
    return positions
