import math
from itertools import combinations

import numpy as np
import pytest

import netresample.kernels as kernels
from netresample.errors import DataError
from netresample.graphlets import (SignedGraph, brute_force_oracle,
                                   gdv_similarity, gdvm_signed, gdvm_unsigned,
                                   random_signed_graph, read_graph_tsv)
from netresample.graphlets.core import (ORBIT_GRAPHLET_SIZES, SIGN_COLLAPSE,
                                        SIGNED_COLUMNS)


def triangle():
    return SignedGraph.from_edges([(0, 1), (1, 2), (0, 2)])


def path3():
    return SignedGraph.from_edges([(0, 1), (1, 2)])


def k4():
    return SignedGraph.from_edges([(i, j) for i in range(4)
                                   for j in range(i + 1, 4)])


# ------------------------------------------------------------------ unsigned

def test_triangle_counts():
    counts = gdvm_unsigned(triangle())
    for v in range(3):
        expect = np.zeros(15, dtype=np.int64)
        expect[0], expect[3] = 2, 1
        assert np.array_equal(counts[v], expect)


def test_path_counts():
    counts = gdvm_unsigned(path3())
    assert counts[0, 0] == 1 and counts[0, 1] == 1
    assert counts[1, 0] == 2 and counts[1, 2] == 1
    assert counts[:, 4:].sum() == 0


def test_k4_counts():
    counts = gdvm_unsigned(k4())
    for v in range(4):
        assert counts[v, 0] == 3
        assert counts[v, 3] == 3
        assert counts[v, 14] == 1
        assert counts[v, 9:14].sum() == 0  # no induced paw/diamond inside K4


def test_oracle_on_k4_and_empty():
    assert np.array_equal(brute_force_oracle(k4(), 4, False),
                          gdvm_unsigned(k4()))
    empty = SignedGraph.from_edges([], n_nodes=5)
    assert brute_force_oracle(empty, 4, False).sum() == 0


def test_er30_matches_oracle():
    g = random_signed_graph(30, density=0.2, seed=77)
    assert np.array_equal(gdvm_unsigned(g), brute_force_oracle(g, 4, False))


def structured_cases():
    star = [(0, i) for i in range(1, 11)]
    kb33 = [(i, 3 + j) for i in range(3) for j in range(3)]
    lolli = list(combinations(range(5), 2)) + [(4, 5), (5, 6), (6, 7)]
    tri2 = [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, 5 + i) for i in range(5)]
    wheel = [(0, i) for i in range(1, 7)] + [(i, i % 6 + 1) for i in range(1, 7)]
    grid = []
    for r in range(3):
        for c in range(4):
            v = r * 4 + c
            if c < 3:
                grid.append((v, v + 1))
            if r < 2:
                grid.append((v, v + 4))
    return {
        "star": (star, [(-1) ** i for i in range(10)], None),
        "k33": (kb33, [1, -1] * 4 + [1], None),
        "lollipop": (lolli, [(-1) ** k for k in range(len(lolli))], None),
        "two_triangles_isolate": (tri2, [1, 1, 1, -1, -1, -1], 7),
        "petersen": (outer + inner + spokes, [1, -1] * 7 + [1], None),
        "wheel": (wheel, [-1] * 12, None),
        "grid": (grid, None, None),
    }


@pytest.mark.parametrize("name", sorted(structured_cases()))
def test_structured_graphs_match_oracle(name):
    edges, signs, n = structured_cases()[name]
    g = SignedGraph.from_edges(edges, signs, n_nodes=n)
    assert np.array_equal(gdvm_unsigned(g), brute_force_oracle(g, 4, False))
    assert np.array_equal(gdvm_signed(g), brute_force_oracle(g, 3, True))


def test_column_sum_identities():
    for seed in (1, 2, 3):
        g = random_signed_graph(18, density=0.3, seed=seed)
        counts = gdvm_unsigned(g)
        m = g.n_edges
        # direct counters independent of the orbit machinery
        a = np.zeros((18, 18), dtype=np.int64)
        for u, v, _ in g.edge_list():
            a[u, v] = a[v, u] = 1
        deg = a.sum(1)
        n_tri = np.trace(np.linalg.matrix_power(a, 3)) // 6
        n_p3_induced = int((deg * (deg - 1) // 2).sum() - 3 * n_tri)
        n_k4 = 0
        from itertools import combinations
        for quad in combinations(range(18), 4):
            if all(a[x, y] for x, y in combinations(quad, 2)):
                n_k4 += 1
        assert counts[:, 0].sum() == 2 * m
        assert counts[:, 3].sum() == 3 * n_tri
        assert counts[:, 1].sum() == 2 * n_p3_induced
        assert counts[:, 14].sum() == 4 * n_k4


# -------------------------------------------------------------------- signed

def test_single_positive_edge():
    g = SignedGraph.from_edges([(0, 1)], [1])
    s = gdvm_signed(g)
    assert s[0, 0] == 1 and s[1, 0] == 1
    assert s.sum() == 2


def test_signed_triangle_example():
    # edges (ab, bc, ca) signed (+, +, -)
    g = SignedGraph.from_edges([(0, 1), (1, 2), (2, 0)], [1, 1, -1])
    s = gdvm_signed(g)
    cols = {name: k for k, name in enumerate(SIGNED_COLUMNS)}
    assert s[1, cols["o3_pp_m"]] == 1      # b: incident {+,+}, opposite -
    assert s[0, cols["o3_pm_p"]] == 1      # a: incident {+,-}, opposite +
    assert s[2, cols["o3_pm_p"]] == 1


def test_signed_path_example():
    g = SignedGraph.from_edges([(0, 1), (1, 2)], [1, -1])
    s = gdvm_signed(g)
    cols = {name: k for k, name in enumerate(SIGNED_COLUMNS)}
    assert s[0, cols["o1_pm"]] == 1
    assert s[2, cols["o1_mp"]] == 1
    assert s[1, cols["o2_pm"]] == 1


def test_er25_signed_matches_oracle_and_collapses():
    g = random_signed_graph(25, density=0.25, seed=55)
    signed = gdvm_signed(g)
    assert np.array_equal(signed, brute_force_oracle(g, 3, True))
    unsigned = gdvm_unsigned(g)
    for orbit, cols in SIGN_COLLAPSE:
        assert np.array_equal(signed[:, list(cols)].sum(axis=1),
                              unsigned[:, orbit])


def test_oracle_collapse_identity():
    g = random_signed_graph(15, density=0.3, seed=4)
    signed = brute_force_oracle(g, 3, True)
    unsigned = brute_force_oracle(g, 3, False)
    for orbit, cols in SIGN_COLLAPSE:
        assert np.array_equal(signed[:, list(cols)].sum(axis=1),
                              unsigned[:, orbit])


def test_oracle_guard():
    g = random_signed_graph(70, density=0.05, seed=1)
    with pytest.raises(DataError, match="guarded"):
        brute_force_oracle(g, 4, False)


# ------------------------------------------------------------------ backends

def test_backends_agree():
    impls = kernels.backends()
    if len(impls) < 2:
        pytest.skip("only one backend available")
    for seed in range(6):
        g = random_signed_graph(20, density=0.1 + 0.06 * seed, seed=seed)
        results_u, results_s = [], []
        for impl in impls.values():
            cu = np.zeros((20, 15), dtype=np.int64)
            impl.unsigned_orbit_counts(
                g.indptr, g.indices, cu,
                np.zeros(len(g.indices), dtype=np.int64),
                np.zeros(20, dtype=np.int64), np.zeros(20, dtype=np.int64))
            cs = np.zeros((20, 15), dtype=np.int64)
            impl.signed_orbit_counts(g.indptr, g.indices, g.signs, cs)
            results_u.append(cu)
            results_s.append(cs)
        assert np.array_equal(results_u[0], results_u[1])
        assert np.array_equal(results_s[0], results_s[1])


# ---------------------------------------------------------------- similarity

def test_similarity_identity_and_zeros():
    a = np.array([2, 0, 0, 1] + [0] * 11)
    assert gdv_similarity(a, a) == pytest.approx(1.0)
    z = np.zeros(15)
    assert gdv_similarity(z, z) == pytest.approx(1.0)


def test_similarity_k3_vs_path_end():
    a = np.zeros(15)
    a[0], a[3] = 2, 1            # triangle corner
    b = np.zeros(15)
    b[0], b[1] = 1, 1            # path end
    w = [1.0 - math.log(o) / math.log(15.0) for o in ORBIT_GRAPHLET_SIZES]
    num = (w[0] * abs(math.log(3) - math.log(2))
           + w[1] * abs(math.log(1) - math.log(2))
           + w[3] * abs(math.log(2) - math.log(1)))
    den = (w[0] * math.log(4) + w[1] * math.log(3) + w[3] * math.log(3)
           + sum(w[k] * math.log(2) for k in range(15) if k not in (0, 1, 3)))
    expect = 1.0 - num / den
    got = gdv_similarity(a, b)
    assert got == pytest.approx(expect)
    assert 0.0 < got < 1.0
    assert gdv_similarity(b, a) == pytest.approx(got)


def test_similarity_bounds_random():
    rng = np.random.default_rng(8)
    for _ in range(50):
        a = rng.integers(0, 40, size=15)
        b = rng.integers(0, 40, size=15)
        v = gdv_similarity(a, b)
        assert 0.0 <= v <= 1.0


# --------------------------------------------------------------------- files

def test_graph_tsv_roundtrip(tmp_path):
    path = tmp_path / "graph.tsv"
    path.write_text("source\ttarget\tsign\nA\tB\t+1\nB\tC\t-1\n")
    g = read_graph_tsv(path)
    assert g.n_nodes == 3 and g.n_edges == 2
    assert g.names == ("A", "B", "C")
    assert g.sign(0, 1) == 1 and g.sign(1, 2) == -1


def test_graph_tsv_defaults_positive(tmp_path):
    path = tmp_path / "graph.tsv"
    path.write_text("source\ttarget\nA\tB\n")
    g = read_graph_tsv(path)
    assert g.sign(0, 1) == 1


def test_graph_validation():
    with pytest.raises(DataError, match="self loop"):
        SignedGraph.from_edges([(1, 1)])
    with pytest.raises(DataError, match="duplicate"):
        SignedGraph.from_edges([(0, 1), (1, 0)])
    with pytest.raises(DataError, match="sign"):
        SignedGraph.from_edges([(0, 1)], [2])
