import re

import numpy as np
import pytest

from egograph.errors import (
    LabelCapacityError,
    ParameterError,
    UnknownNodeError,
)
from egograph.graphs import (
    GeneratorParams,
    Graph,
    assign_labels,
    common_neighbors,
    degree,
    diameter,
    generate_ba,
    geodesic_distances,
    graph_from_dict,
    graph_to_dict,
    neighbors,
    shortest_path,
)

from oracles import common_neighbors_bruteforce, degree_exponent_fit, floyd_warshall


def random_graph(n: int, p: float, seed: int) -> Graph:
    """Connected Erdos-Renyi-ish helper independent of the BA generator."""
    rng = np.random.default_rng(seed)
    edges = [(i - 1, i) for i in range(1, n)]  # spanning path keeps it connected
    for u in range(n):
        for v in range(u + 1, n):
            if v != u + 1 and rng.random() < p:
                edges.append((u, v))
    return Graph.from_edges(n, edges)


class TestGenerateBA:
    def test_paper_sizes_exact(self):
        small = generate_ba(GeneratorParams(n=165, m=2, seed=7))
        large = generate_ba(GeneratorParams(n=415, m=2, seed=7))
        assert small.n == 165 and small.edge_count == 326
        assert large.n == 415 and large.edge_count == 826

    def test_edge_count_formula(self):
        for n, m, seed in [(10, 1, 0), (50, 3, 1), (120, 5, 2)]:
            g = generate_ba(GeneratorParams(n=n, m=m, seed=seed))
            assert g.edge_count == m * (n - m)

    def test_three_nodes_forced(self):
        g = generate_ba(GeneratorParams(n=3, m=2, seed=123))
        assert g.edges == ((0, 2), (1, 2))

    def test_deterministic(self):
        a = generate_ba(GeneratorParams(n=80, m=2, seed=42))
        b = generate_ba(GeneratorParams(n=80, m=2, seed=42))
        assert a == b
        c = generate_ba(GeneratorParams(n=80, m=2, seed=43))
        assert a != c

    def test_connected(self):
        for seed in range(5):
            g = generate_ba(GeneratorParams(n=60, m=2, seed=seed))
            assert g.is_connected()

    def test_invalid_params(self):
        with pytest.raises(ParameterError):
            generate_ba(GeneratorParams(n=2, m=2, seed=0))
        with pytest.raises(ParameterError):
            generate_ba(GeneratorParams(n=5, m=0, seed=0))

    def test_degree_exponent_in_band(self):
        g = generate_ba(GeneratorParams(n=10000, m=2, seed=11))
        gamma = degree_exponent_fit([degree(g, v) for v in g.nodes])
        assert 2.5 <= gamma <= 3.5

    def test_linear_density_approaches_m(self):
        g = generate_ba(GeneratorParams(n=415, m=2, seed=3))
        assert g.edge_count / g.n == pytest.approx(826 / 415)

    def test_hub_availability(self):
        # FiN needs hubs with >= 14 neighbors; confirm over many seeds.
        for seed in range(100):
            g = generate_ba(GeneratorParams(n=165, m=2, seed=seed))
            assert max(degree(g, v) for v in g.nodes) >= 14


class TestLabels:
    def test_pattern(self):
        g = assign_labels(generate_ba(GeneratorParams(n=3, m=2, seed=0)), seed=5)
        for lab in g.labels:
            assert re.fullmatch(r"[A-Z]{2}[0-9]{1,2}", lab)

    def test_single_node_pattern(self):
        g = assign_labels(Graph.from_edges(1, []), seed=9)
        assert re.fullmatch(r"[A-Z]{2}[0-9]{1,2}", g.labels[0])

    def test_deterministic(self):
        g = generate_ba(GeneratorParams(n=40, m=2, seed=1))
        assert assign_labels(g, seed=77).labels == assign_labels(g, seed=77).labels
        assert assign_labels(g, seed=77).labels != assign_labels(g, seed=78).labels

    def test_unique_at_study_size(self):
        g = assign_labels(generate_ba(GeneratorParams(n=415, m=2, seed=2)), seed=2)
        assert len(set(g.labels)) == 415

    def test_capacity_error(self):
        g = Graph.from_edges(26 * 26 * 99 + 1, [])
        with pytest.raises(LabelCapacityError):
            assign_labels(g, seed=0)


class TestQueries:
    def test_path_graph_neighbors(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        assert neighbors(g, 1) == {0, 2}
        assert degree(g, 1) == 2

    def test_handshake_lemma(self):
        g = generate_ba(GeneratorParams(n=100, m=3, seed=5))
        assert sum(degree(g, v) for v in g.nodes) == 2 * g.edge_count

    def test_unknown_node(self):
        g = Graph.from_edges(2, [(0, 1)])
        with pytest.raises(UnknownNodeError):
            neighbors(g, 5)
        with pytest.raises(UnknownNodeError):
            degree(g, -1)

    def test_common_neighbors_triangle_plus(self):
        g = Graph.from_edges(4, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3)])
        assert common_neighbors(g, 0, 1) == {2, 3}

    def test_common_neighbors_disjoint(self):
        g = Graph.from_edges(6, [(0, 1), (0, 2), (3, 4), (3, 5), (2, 3)])
        assert common_neighbors(g, 1, 4) == set()

    def test_common_neighbors_vs_bruteforce(self):
        g = random_graph(50, 0.08, seed=17)
        for u in range(0, 50, 7):
            for v in range(1, 50, 11):
                if u == v:
                    continue
                assert common_neighbors(g, u, v) == common_neighbors_bruteforce(
                    g.n, g.edges, u, v
                )

    def test_symmetry_property(self):
        g = random_graph(40, 0.1, seed=23)
        for u in g.nodes:
            for v in neighbors(g, u):
                assert u in neighbors(g, v)

    def test_geodesic_trivial(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        d = geodesic_distances(g, 0)
        assert d[0] == 0 and d[1] == 1 and d[2] == 2

    def test_geodesic_vs_floyd_warshall(self):
        g = random_graph(50, 0.07, seed=31)
        ref = floyd_warshall(g.n, g.edges)
        for s in g.nodes:
            d = geodesic_distances(g, s)
            for v in g.nodes:
                assert d[v] == ref[s, v]

    def test_shortest_path_endpoints(self):
        g = Graph.from_edges(3, [(0, 1), (1, 2)])
        assert shortest_path(g, 1, 1) == [1]
        assert shortest_path(g, 0, 1) == [0, 1]

    def test_shortest_path_length_matches_bfs(self):
        g = random_graph(50, 0.07, seed=41)
        for u in range(0, 50, 5):
            d = geodesic_distances(g, u)
            for v in g.nodes:
                path = shortest_path(g, u, v)
                assert len(path) == d[v] + 1
                assert path[0] == u and path[-1] == v
                eset = set(g.edges)
                for a, b in zip(path, path[1:]):
                    assert (min(a, b), max(a, b)) in eset

    def test_shortest_path_lexicographic_tiebreak(self):
        # two equal-length routes 0-1-3 and 0-2-3; the 1-route is smaller
        g = Graph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)])
        assert shortest_path(g, 0, 3) == [0, 1, 3]

    def test_diameter_trivial(self):
        assert diameter(Graph.from_edges(2, [(0, 1)])) == 1
        assert diameter(Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)])) == 4

    def test_diameter_small_relative_to_n(self):
        # scale-free graphs stay compact; recorded bound, not an equality
        g = generate_ba(GeneratorParams(n=415, m=2, seed=9))
        assert diameter(g) <= 12


class TestGraphJson:
    def test_roundtrip(self):
        params = GeneratorParams(n=60, m=2, seed=99)
        g = assign_labels(generate_ba(params), seed=99)
        obj = graph_to_dict(g, params)
        g2, p2 = graph_from_dict(obj)
        assert g2 == g and p2 == params

    def test_edges_sorted_min_max(self):
        params = GeneratorParams(n=30, m=2, seed=1)
        obj = graph_to_dict(generate_ba(params), params)
        edges = [tuple(e) for e in obj["edges"]]
        assert all(u < v for u, v in edges)
        assert edges == sorted(edges)

    def test_missing_key_rejected(self):
        with pytest.raises(ParameterError):
            graph_from_dict({"n": 2, "m": 1, "seed": 0, "labels": ["a", "b"]})


class TestGraphInvariants:
    def test_no_self_loops(self):
        with pytest.raises(ParameterError):
            Graph.from_edges(3, [(1, 1)])

    def test_no_duplicate_edges(self):
        with pytest.raises(ParameterError):
            Graph.from_edges(3, [(0, 1), (1, 0)])

    def test_duplicate_labels_rejected(self):
        with pytest.raises(ParameterError):
            Graph.from_edges(2, [(0, 1)], labels=["X", "X"])
