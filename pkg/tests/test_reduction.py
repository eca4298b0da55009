import math

import numpy as np

from chromasig.complexes import FilteredComplex
from chromasig.geometry import cech_filtration, chromatic_delcech
from chromasig.reduction import boundary_matrix, diagrams, reduce

from conftest import betti_numbers, diagram_multiset, random_cloud
from chromasig.complexes import LabelledPointCloud


def naive_reduce_pairs(M):
    """Textbook left-to-right reduction, no optimizations, dense columns."""
    n = len(M.columns)
    cols = [set(c) for c in M.columns]
    low_of = {}
    partner = {}
    for j in range(n):
        col = cols[j]
        while col:
            low = max(col)
            if low not in low_of:
                break
            col ^= cols[low_of[low]]
        if col:
            low = max(col)
            low_of[low] = j
            cols[j] = col
            partner[low] = j
    pairs = tuple(sorted((i, j) for i, j in partner.items()))
    paired = set(partner) | set(partner.values())
    essential = tuple(i for i in range(n) if i not in paired)
    return pairs, essential


def random_complex(rng, n_points, max_dim=2):
    return cech_filtration(random_cloud(rng, n_points, 2), max_dim)


class TestBoundaryMatrix:
    def test_single_edge(self):
        K = FilteredComplex([((0,), 0.0), ((1,), 0.0), ((0, 1), 1.0)], [0, 0])
        M = boundary_matrix(K)
        assert M.columns == ((), (), (0, 1))

    def test_triangle_column(self):
        K = cech_filtration(LabelledPointCloud([[0., 0.], [1., 0.], [0., 1.]], [0] * 3), 2)
        M = boundary_matrix(K)
        assert len(M.columns) == 7
        tri = K.index((0, 1, 2))
        assert M.columns[tri] == tuple(sorted(K.index(e) for e in [(0, 1), (0, 2), (1, 2)]))

    def test_boundary_squared_zero(self, rng):
        K = random_complex(rng, 8)
        M = boundary_matrix(K)
        n = len(M.columns)
        D = np.zeros((n, n), dtype=np.uint8)
        for j, col in enumerate(M.columns):
            for r in col:
                D[r, j] ^= 1
        assert not ((D @ D) % 2).any()
        for j, col in enumerate(M.columns):
            assert all(col[i] < col[i + 1] for i in range(len(col) - 1))
            assert all(r < j for r in col)


class TestReduce:
    def test_path(self):
        K = FilteredComplex([((0,), 0.0), ((1,), 0.0), ((2,), 0.0),
                             ((0, 1), 1.0), ((1, 2), 2.0)], [0] * 3)
        p = reduce(boundary_matrix(K))
        assert len(p.pairs) == 2
        assert len(p.essential) == 1
        assert K.dims[p.essential[0]] == 0

    def test_hollow_triangle(self):
        K = FilteredComplex([((0,), 0.0), ((1,), 0.0), ((2,), 0.0),
                             ((0, 1), 1.0), ((0, 2), 1.0), ((1, 2), 1.0)], [0] * 3)
        p = reduce(boundary_matrix(K))
        assert len(p.pairs) == 2
        dims = sorted(int(K.dims[i]) for i in p.essential)
        assert dims == [0, 1]

    def test_matches_naive_oracle(self, rng):
        for _ in range(10):
            K = random_complex(rng, 6)
            M = boundary_matrix(K)
            got = reduce(M, use_clearing=True)
            want_pairs, want_ess = naive_reduce_pairs(M)
            assert tuple(sorted(got.pairs)) == want_pairs
            assert tuple(sorted(got.essential)) == tuple(sorted(want_ess))

    def test_clearing_identical(self, rng):
        for _ in range(20):
            K = random_complex(rng, int(rng.integers(4, 9)))
            M = boundary_matrix(K)
            a = reduce(M, use_clearing=True)
            b = reduce(M, use_clearing=False)
            assert a.pairs == b.pairs and a.essential == b.essential


class TestDiagrams:
    def test_isolated_points(self, rng):
        cloud = random_cloud(rng, 6, 1)
        K = cech_filtration(cloud, 1)
        dgms = diagrams(K, 0)
        d0 = dgms[0]
        assert len(d0.points) == 6
        assert sum(1 for b, d in d0.points if d == math.inf) == 1
        assert all(b == 0.0 for b, _ in d0.points)

    def test_circle_death_is_circumradius(self):
        ang = 2 * np.pi * np.arange(20) / 20
        pts = np.c_[np.cos(ang), np.sin(ang)]
        cloud = LabelledPointCloud(pts, np.zeros(20, dtype=int))
        dgms = diagrams(chromatic_delcech(cloud, 2), 1)
        long_lived = [(b, d) for b, d in dgms[1].points if d - b > 0.5]
        assert len(long_lived) == 1
        assert abs(long_lived[0][1] - 1.0) < 1e-6

    def test_degree_two_empty_for_planar_clouds(self, rng):
        cloud = random_cloud(rng, 10, 2)
        dgms = diagrams(chromatic_delcech(cloud, 3), 2)
        assert len(dgms[2].points) == 0

    def test_fundamental_lemma(self, rng):
        for _ in range(5):
            K = random_complex(rng, 7)
            dgms = diagrams(K, 1)
            crit = sorted(set(K.values.tolist()))
            samples = crit + [0.5 * (a + b) for a, b in zip(crit, crit[1:])]
            for t in samples:
                want = betti_numbers(K, t, 1)
                assert [dgms[0].alive(t), dgms[1].alive(t)] == want

    def test_multiset_invariant_under_tie_permutation(self, rng):
        cloud = random_cloud(rng, 7, 2)
        K = cech_filtration(cloud, 2)
        entries = list(zip(K.simplices, K.values.tolist()))
        rng.shuffle(entries)
        K2 = FilteredComplex(entries, K.vertex_labels, species_count=K.species_count)
        a, b = diagrams(K, 1), diagrams(K2, 1)
        for da, db in zip(a, b):
            assert diagram_multiset(da) == diagram_multiset(db)

    def test_emitted_deaths_exceed_births(self, rng):
        K = random_complex(rng, 8)
        for dgm in diagrams(K, 1):
            for b, d in dgm.points:
                assert d > b

    def test_truncation_flag(self, rng):
        K = cech_filtration(random_cloud(rng, 6, 1), 1)  # no triangles
        dgms = diagrams(K, 2)
        assert not dgms[0].truncated
        assert dgms[1].truncated and dgms[2].truncated
