import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from arealaw import graph as gr
from arealaw.errors import GraphError


def minplus_distances(adj):
    """All-pairs hop distances by repeated (min, +) squaring."""
    n = adj.shape[0]
    d = np.where(adj > 0, 1.0, np.inf)
    np.fill_diagonal(d, 0.0)
    steps = 1
    while steps < n:
        d = np.min(d[:, :, None] + d[None, :, :], axis=1)
        steps *= 2
    return d


def test_path3():
    g = gr.path(3)
    assert g.n_vertices == 3 and len(g.edges) == 2
    assert g.dist[0, 2] == 2
    assert g.family == "path"


def test_box_2x3():
    g = gr.box(2, 3)
    assert g.n_vertices == 9 and len(g.edges) == 12
    assert g.max_degree == 4


def test_bethe_regular_root_counts():
    g = gr.bethe(2, 2, regular_root=True)
    assert g.n_vertices == 1 + 3 + 6
    assert g.degrees[0] == 3


def test_bethe_default_root_has_branching_children():
    g = gr.bethe(2, 2)
    assert g.n_vertices == 1 + 2 + 4
    assert g.degrees[0] == 2
    assert g.max_degree == 3


def test_box_row_major():
    g = gr.box(2, 3)
    assert {tuple(e) for e in g.edges.tolist()} >= {(0, 1), (0, 3), (4, 5), (4, 7)}


@pytest.mark.parametrize("g", [gr.path(7), gr.box(2, 4), gr.box(3, 3), gr.bethe(2, 3), gr.bethe(3, 2, regular_root=True)])
def test_bfs_matches_minplus(g):
    assert g.n_vertices <= 30
    np.testing.assert_array_equal(g.dist, minplus_distances(g.adjacency()))


@given(st.integers(2, 25), st.integers(0, 10**6))
def test_random_tree_distances_and_metric(n, seed):
    rng = np.random.default_rng(seed)
    edges = [(i, int(rng.integers(0, i))) for i in range(1, n)]
    extra = rng.integers(0, n, size=(n // 3, 2))
    edges += [tuple(map(int, e)) for e in extra if e[0] != e[1]]
    edges = list({tuple(sorted(e)) for e in edges})
    g = gr.from_edges(edges, n)
    d = g.dist
    np.testing.assert_array_equal(d, minplus_distances(g.adjacency()))
    assert np.all(np.diag(d) == 0)
    np.testing.assert_array_equal(d, d.T)
    for y in range(n):
        assert np.all(d <= d[:, [y]] + d[[y], :])


def test_rejects_disconnected_and_bad_edges(tmp_path):
    with pytest.raises(GraphError):
        gr.from_edges([(0, 1), (2, 3)], 4)
    with pytest.raises(GraphError):
        gr.from_edges([(0, 0), (0, 1)])
    with pytest.raises(GraphError):
        gr.from_edges([(0, 1), (1, 0)])
    with pytest.raises(GraphError):
        gr.box(2, 100)
    with pytest.raises(GraphError):
        gr.box(4, 2)


def test_edge_list_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# square\n0 1\n1 2\n2 3\n3 0\n")
    g = gr.load_edge_list(p)
    assert g.n_vertices == 4 and g.family == "custom"
    assert g.dist[0, 2] == 2
    assert gr.build_graph({"family": "custom", "edge_file": str(p)}).n_vertices == 4


def test_build_graph_dispatch():
    assert gr.build_graph({"family": "path", "n": 5}).n_vertices == 5
    assert gr.build_graph({"family": "box", "dimension": 2, "side": 3}).n_vertices == 9
    assert gr.build_graph({"family": "bethe", "branching": 2, "depth": 2, "regular_root": True}).n_vertices == 10
    with pytest.raises(GraphError):
        gr.build_graph({"family": "torus"})
    with pytest.raises(GraphError):
        gr.build_graph({"family": "box", "side": 3})


def test_boundary_examples():
    g = gr.path(10)
    assert gr.boundary(g, gr.region(g, [3, 4, 5])).members == (3, 5)
    assert len(gr.boundary(g, gr.region(g, range(10)))) == 0
    b = gr.box(2, 5)
    assert len(gr.boundary(b, gr.centered_region(b, 1))) == 8


def test_c_mu_examples():
    assert gr.c_mu(gr.path(1), 1.0) == 1.0
    assert gr.c_mu(gr.path(3), 1.0) == pytest.approx(1 + 2 * math.exp(-1), rel=1e-15)
    for mu in (0.5, 1.0, 2.0):
        g = gr.path(21)
        assert gr.c_mu(g, mu) <= (1 + math.exp(-mu)) / (1 - math.exp(-mu))


def test_boundary_sum_examples():
    g = gr.path(2)
    assert gr.boundary_sum(g, gr.region(g, [0]), 1.0) == pytest.approx(math.exp(-1), rel=1e-15)
    g = gr.path(10)
    direct = sum(math.exp(-abs(x - y)) for x in range(5) for y in range(5, 10))
    assert gr.boundary_sum(g, gr.region(g, range(5)), 1.0) == pytest.approx(direct, rel=1e-13)
    assert gr.boundary_sum(g, gr.region(g, range(10)), 1.0) == 0.0


@pytest.mark.parametrize("g", [gr.path(9), gr.box(2, 4), gr.bethe(2, 3), gr.bethe(2, 2, regular_root=True)])
def test_degree_and_cmu_bounds(g):
    for mu in (0.5, 1.0, 2.0):
        c = gr.c_mu(g, mu)
        assert c <= g.n_vertices
        assert g.max_degree <= c * math.exp(mu)


@given(st.integers(0, 2**31), st.sampled_from([0.5, 1.0, 2.0]))
def test_boundary_sum_bound_random_regions(seed, mu):
    rng = np.random.default_rng(seed)
    g = [gr.path(11), gr.box(2, 4), gr.bethe(2, 3)][seed % 3]
    mask = rng.random(g.n_vertices) < 0.5
    if mask.all() or not mask.any():
        return
    reg = gr.region(g, np.flatnonzero(mask))
    assert gr.boundary_sum(g, reg, mu) <= gr.c_mu(g, mu) ** 2 * len(gr.boundary(g, reg))


def test_centered_region_and_site_keys_nest():
    small, big = gr.path(5), gr.path(9)
    assert gr.centered_region(small, 1).members == (1, 2, 3)
    assert gr.centered_region(big, 1).members == (3, 4, 5)
    # same physical site, same key
    assert small.site_keys[2] == big.site_keys[4]
    b1, b2 = gr.box(2, 3), gr.box(2, 5)
    assert set(b1.site_keys.tolist()) <= set(b2.site_keys.tolist())
    t1, t2 = gr.bethe(2, 2), gr.bethe(2, 3)
    np.testing.assert_array_equal(t1.site_keys, t2.site_keys[: t1.n_vertices])


def test_region_validation():
    g = gr.path(4)
    with pytest.raises(ValueError):
        gr.region(g, [4])
    r = gr.region(g, [2, 0, 2])
    assert r.members == (0, 2) and r.complement().members == (1, 3)
