"""Scale-free graph generation and topology queries.

Graphs are immutable: dense integer node ids 0..n-1, an edge set of
(min, max)-ordered pairs, one unique label per node, and sorted adjacency
lists. All randomness goes through NumPy's seedable PCG64 generator so the
same seed reproduces the same graph on any platform.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .errors import (
    DisconnectedError,
    LabelCapacityError,
    ParameterError,
    UnknownNodeError,
)

# Label pattern [A-Z]{2}[0-9]{1,2} with the numeric part in 1..99.
_LABEL_LETTERS = 26 * 26
_LABEL_DIGITS = 99
LABEL_SPACE = _LABEL_LETTERS * _LABEL_DIGITS


@dataclass(frozen=True)
class GeneratorParams:
    """Parameters of the preferential-attachment generator."""

    n: int
    m: int
    seed: int

    def validate(self) -> None:
        if not (self.n > self.m >= 1):
            raise ParameterError(
                f"generator requires n > m >= 1, got n={self.n}, m={self.m}"
            )


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with labels and precomputed adjacency."""

    n: int
    edges: tuple[tuple[int, int], ...]
    labels: tuple[str, ...]
    adjacency: tuple[tuple[int, ...], ...]

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: list[tuple[int, int]] | tuple[tuple[int, int], ...],
        labels: list[str] | tuple[str, ...] | None = None,
    ) -> "Graph":
        """Build a graph, normalizing edge order and validating invariants.

        Connectivity is deliberately not required here; generated graphs are
        checked at the generator and at file load.
        """
        norm = set()
        for u, v in edges:
            if u == v:
                raise ParameterError(f"self-loop on node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u}, {v}) outside node range 0..{n - 1}")
            key = (u, v) if u < v else (v, u)
            if key in norm:
                raise ParameterError(f"duplicate edge {key}")
            norm.add(key)
        if labels is None:
            labels = tuple(str(i) for i in range(n))
        else:
            labels = tuple(labels)
            if len(labels) != n:
                raise ParameterError(f"{len(labels)} labels for {n} nodes")
            if len(set(labels)) != n:
                raise ParameterError("labels are not unique")
        adj: list[list[int]] = [[] for _ in range(n)]
        for u, v in norm:
            adj[u].append(v)
            adj[v].append(u)
        return cls(
            n=n,
            edges=tuple(sorted(norm)),
            labels=labels,
            adjacency=tuple(tuple(sorted(a)) for a in adj),
        )

    @property
    def nodes(self) -> range:
        return range(self.n)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def check_node(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise UnknownNodeError(v)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        return len(geodesic_distances(self, 0)) == self.n


def _sample_distinct(pool: list[int], m: int, rng: np.random.Generator) -> list[int]:
    # Rejection sampling from the degree-weighted endpoint multiset.
    chosen: set[int] = set()
    while len(chosen) < m:
        chosen.add(pool[int(rng.integers(len(pool)))])
    return sorted(chosen)


def generate_ba(params: GeneratorParams) -> Graph:
    """Grow a preferential-attachment graph with exactly m*(n-m) edges.

    Starts from m isolated seed nodes; the first newcomer attaches to all of
    them, every later one to m distinct nodes drawn with probability
    proportional to current degree. The result is connected and reproducible
    per seed.
    """
    params.validate()
    n, m = params.n, params.m
    rng = np.random.default_rng(np.random.PCG64(params.seed))
    edges: list[tuple[int, int]] = []
    repeated: list[int] = []  # endpoint multiset; multiplicity == degree
    targets = list(range(m))
    for source in range(m, n):
        edges.extend((t, source) for t in targets)
        repeated.extend(targets)
        repeated.extend([source] * m)
        if source + 1 < n:
            targets = _sample_distinct(repeated, m, rng)
    g = Graph.from_edges(n, edges)
    assert g.edge_count == m * (n - m)
    return g


def _label_from_index(idx: int) -> str:
    letters, digit = divmod(idx, _LABEL_DIGITS)
    first, second = divmod(letters, 26)
    return f"{chr(65 + first)}{chr(65 + second)}{digit + 1}"


def assign_labels(g: Graph, seed: int) -> Graph:
    """Give every node a unique label like 'UI46', deterministically per seed."""
    if g.n > LABEL_SPACE:
        raise LabelCapacityError(
            f"{g.n} nodes exceed the {LABEL_SPACE}-label space"
        )
    rng = np.random.default_rng(np.random.PCG64(seed))
    picks = rng.choice(LABEL_SPACE, size=g.n, replace=False)
    labels = tuple(_label_from_index(int(i)) for i in picks)
    return Graph(n=g.n, edges=g.edges, labels=labels, adjacency=g.adjacency)


def neighbors(g: Graph, v: int) -> set[int]:
    """Adjacent nodes of v."""
    g.check_node(v)
    return set(g.adjacency[v])


def degree(g: Graph, v: int) -> int:
    g.check_node(v)
    return len(g.adjacency[v])


def common_neighbors(g: Graph, u: int, v: int) -> set[int]:
    """Nodes adjacent to both u and v, excluding u and v themselves."""
    if u == v:
        raise ParameterError("common_neighbors needs two distinct nodes")
    g.check_node(u)
    g.check_node(v)
    return (set(g.adjacency[u]) & set(g.adjacency[v])) - {u, v}


def geodesic_distances(g: Graph, source: int) -> dict[int, int]:
    """Hop distance from source to every reachable node (source itself: 0)."""
    g.check_node(source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in g.adjacency[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def shortest_path(g: Graph, u: int, v: int) -> list[int]:
    """A shortest u-v path, canonical among ties.

    BFS expands neighbors in ascending node id with first-discovery parents,
    which yields the lexicographically smallest node-id sequence among all
    shortest paths.
    """
    g.check_node(u)
    g.check_node(v)
    if u == v:
        return [u]
    parent = {u: -1}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for w in g.adjacency[x]:  # adjacency is sorted ascending
            if w not in parent:
                parent[w] = x
                if w == v:
                    queue.clear()
                    break
                queue.append(w)
    if v not in parent:
        raise DisconnectedError(f"no path between {u} and {v}")
    path = [v]
    while path[-1] != u:
        path.append(parent[path[-1]])
    path.reverse()
    return path


def diameter(g: Graph) -> int:
    """Longest shortest path, by all-pairs BFS."""
    best = 0
    for s in g.nodes:
        dist = geodesic_distances(g, s)
        if len(dist) != g.n:
            raise DisconnectedError("diameter requires a connected graph")
        best = max(best, max(dist.values()))
    return best


def graph_to_dict(g: Graph, params: GeneratorParams) -> dict:
    """Graph JSON object: generator metadata plus (min,max)-ordered sorted edges."""
    return {
        "n": g.n,
        "m": params.m,
        "seed": params.seed,
        "labels": list(g.labels),
        "edges": [list(e) for e in g.edges],
    }


def graph_from_dict(obj: dict) -> tuple[Graph, GeneratorParams]:
    for key in ("n", "m", "seed", "labels", "edges"):
        if key not in obj:
            raise ParameterError(f"graph JSON missing '{key}'")
    g = Graph.from_edges(
        int(obj["n"]),
        [(int(u), int(v)) for u, v in obj["edges"]],
        [str(s) for s in obj["labels"]],
    )
    if not g.is_connected():
        raise ParameterError("graph file does not describe a connected graph")
    return g, GeneratorParams(n=g.n, m=int(obj["m"]), seed=int(obj["seed"]))
