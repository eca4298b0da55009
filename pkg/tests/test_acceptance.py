"""Acceptance gate: one test per criterion, each printing a PASS line.

Run with ``pytest tests/test_acceptance.py -v -s`` to see the per-criterion
lines and timings.
"""

import math
import time

import numpy as np
import pytest

from chromasig.cli import RunConfig, cmd_signature, cmd_synth
from chromasig.complexes import LabelledPointCloud
from chromasig.geometry import cech_filtration, chromatic_delcech
from chromasig.reduction import boundary_matrix, diagrams, reduce
from chromasig.signatures import (
    PACK_LEN,
    SINGLE_LEN,
    assemble_feature_vector,
    signature_for_combination,
)
from chromasig.sixpack import k_chromatic_gluing_map, rank_oracle, six_pack
from chromasig import synth

from conftest import assert_diagrams_equal, betti_numbers, random_cloud


def long_lived(dgm, thr):
    return sum(1 for b, d in dgm.points if (math.inf if d == math.inf else d - b) > thr)


def test_criterion_1_filtration_oracle_equivalence():
    """Chromatic Delaunay-Cech diagrams equal the brute-force Cech diagrams."""
    rng = np.random.default_rng(101)
    t0 = time.time()
    for trial in range(50):
        n = int(rng.integers(4, 13))
        colors = int(rng.integers(2, 4))
        cloud = random_cloud(rng, n, colors)
        got = diagrams(chromatic_delcech(cloud, 2), 1)
        want = diagrams(cech_filtration(cloud, 2), 1)
        assert_diagrams_equal(got, want, tol=1e-9)
    dt = time.time() - t0
    assert dt < 30.0, f"took {dt:.1f}s"
    print(f"\nACCEPTANCE 1: PASS - 50/50 clouds, delcech == cech within 1e-9 ({dt:.1f}s)")


def test_criterion_2_and_3_sixpack_rank_oracle_and_additivity():
    """Diagram-derived alive/persisting counts match the dense rank oracle at
    every critical value and midpoint; additivity holds exactly."""
    rng = np.random.default_rng(202)
    t0 = time.time()
    n_maps = 0
    for trial in range(30):
        colors = 2 if trial % 2 == 0 else 3
        n = int(rng.integers(colors * 2, 11))
        cloud = random_cloud(rng, n, colors)
        for k in range(1, colors):
            f = k_chromatic_gluing_map(cloud, k, 2)
            pack = six_pack(f, 1)
            pack.check_additivity()  # criterion 3, exact integer equality
            scales = pack.sample_scales()
            for deg in (0, 1):
                for t in scales:
                    want = rank_oracle(f, t, t, deg)
                    got = (pack.kernel[deg].alive(t), pack.image[deg].alive(t),
                           pack.cokernel[deg].alive(t))
                    assert got == want, (trial, k, deg, t)
                for a, b in zip(scales, scales[1:]):
                    want = rank_oracle(f, a, b, deg)
                    got = (pack.kernel[deg].persisting(a, b),
                           pack.image[deg].persisting(a, b),
                           pack.cokernel[deg].persisting(a, b))
                    assert got == want, (trial, k, deg, a, b)
            n_maps += 1
    dt = time.time() - t0
    assert dt < 60.0, f"took {dt:.1f}s"
    print(f"\nACCEPTANCE 2: PASS - {n_maps} gluing maps match the rank oracle ({dt:.1f}s)")
    print("ACCEPTANCE 3: PASS - pointwise additivity exact on all test maps")


def test_criterion_4_trivial_cokernel_and_empty_degree2():
    rng = np.random.default_rng(303)
    for trial in range(8):
        colors = int(rng.integers(2, 4))
        cloud = random_cloud(rng, int(rng.integers(6, 11)), colors)
        for k in range(1, colors):
            pack = six_pack(k_chromatic_gluing_map(cloud, k, 3), 2)
            assert len(pack.cokernel[0].points) == 0
            for group in (pack.kernel, pack.image, pack.cokernel,
                          pack.domain, pack.codomain):
                assert len(group[2].points) == 0
    print("\nACCEPTANCE 4: PASS - cokernel deg 0 empty; degree-2 diagrams empty "
          "for planar clouds")


def test_criterion_5_figure_motifs_20_seeds():
    thr = 0.3  # times the generator radius 1
    t0 = time.time()
    for seed in range(20):
        pts, labs = synth.filled_circle(n=40, fill_n=60, loops=3, seed=seed)
        pack = six_pack(k_chromatic_gluing_map(LabelledPointCloud(pts, labs), 1, 2), 1)
        got = (long_lived(pack.kernel[1], thr), long_lived(pack.image[1], thr),
               long_lived(pack.domain[1], thr), long_lived(pack.cokernel[1], thr))
        assert got == (1, 2, 3, 0), ("filled_circle", seed, got)

        pts, labs = synth.dichromatic_arcs(n=40, seed=seed)
        pack = six_pack(k_chromatic_gluing_map(LabelledPointCloud(pts, labs), 1, 2), 1)
        assert long_lived(pack.cokernel[1], thr) == 1, ("dichromatic_arcs", seed)

        pts, labs = synth.trichromatic_arcs(n=40, seed=seed)
        pack = six_pack(k_chromatic_gluing_map(LabelledPointCloud(pts, labs), 2, 2), 1)
        assert long_lived(pack.cokernel[1], thr) == 1, ("trichromatic_arcs", seed)
        assert long_lived(pack.image[1], thr) == 0, ("trichromatic_arcs", seed)

        pts, labs = synth.colocated_circles(n=60, colors=3, striped=True, seed=seed)
        pack = six_pack(k_chromatic_gluing_map(LabelledPointCloud(pts, labs), 2, 2), 1)
        assert long_lived(pack.kernel[1], thr) == 2, ("striped", seed)
        assert long_lived(pack.image[1], thr) == 1, ("striped", seed)
    dt = time.time() - t0
    print(f"\nACCEPTANCE 5: PASS - 20/20 seeds, 4 figure motifs, exact counts ({dt:.1f}s)")


def test_criterion_6_vector_dimensions():
    rng = np.random.default_rng(606)
    cloud = random_cloud(rng, 12, 3)
    assert len(signature_for_combination(cloud, (0,)).values) == SINGLE_LEN == 44
    assert len(signature_for_combination(cloud, (0, 1)).values) == PACK_LEN == 146
    assert len(signature_for_combination(cloud, (0, 1, 2)).values) == PACK_LEN == 146
    vec5, man5 = assemble_feature_vector(cloud, range(5), 3)
    assert len(vec5) == len(man5) == 3140
    vec10, man10 = assemble_feature_vector(cloud, range(10), 3)
    assert len(vec10) == len(man10) == 24530
    print("\nACCEPTANCE 6: PASS - signature lengths 44/146/146; assembled 3140 and 24530")


def test_criterion_7_reduction_correctness():
    rng = np.random.default_rng(707)
    t0 = time.time()
    for trial in range(100):
        n = int(rng.integers(5, 10))
        colors = int(rng.integers(1, 3))
        if trial % 2 == 0:
            K = cech_filtration(random_cloud(rng, n, colors), 2)
        else:
            K = chromatic_delcech(random_cloud(rng, n + 4, colors), 2)
        assert len(K) <= 150 or trial % 2 == 1
        M = boundary_matrix(K)
        a = reduce(M, use_clearing=True)
        b = reduce(M, use_clearing=False)
        assert a.pairs == b.pairs and a.essential == b.essential
        dgms = diagrams(K, 1)
        crit = sorted(set(K.values.tolist()))
        samples = crit[:: max(1, len(crit) // 6)] + [crit[-1]]
        for t in samples:
            assert [dgms[0].alive(t), dgms[1].alive(t)] == betti_numbers(K, t, 1)
    dt = time.time() - t0
    print(f"\nACCEPTANCE 7: PASS - 100 complexes, clearing identical, Betti exact ({dt:.1f}s)")


def test_criterion_8_isometry_and_worker_determinism(tmp_path):
    rng = np.random.default_rng(808)
    cloud = random_cloud(rng, 12, 3)
    theta = 0.83
    R = np.array([[math.cos(theta), -math.sin(theta)],
                  [math.sin(theta), math.cos(theta)]])
    moved = LabelledPointCloud(cloud.points @ R.T + np.array([-2.0, 5.0]),
                               cloud.labels, cloud.species_count)
    for k in (1, 2):
        pa = six_pack(k_chromatic_gluing_map(cloud, k, 2), 1)
        pb = six_pack(k_chromatic_gluing_map(moved, k, 2), 1)
        for name in ("kernel", "image", "cokernel", "domain", "codomain"):
            assert_diagrams_equal(getattr(pa, name), getattr(pb, name), tol=1e-6)

    files = []
    for s in range(3):
        p = tmp_path / f"c{s}.csv"
        cmd_synth("uniform_noise", p, dict(n=24, colors=3, seed=s))
        files.append(p)
    outs = []
    for wc in (1, 4, 8):
        mat = tmp_path / f"m{wc}.csv"
        rc = cmd_signature(files, mat, None, RunConfig(worker_count=wc))
        assert rc == 0
        outs.append(mat.read_bytes())
    assert outs[0] == outs[1] == outs[2]
    print("\nACCEPTANCE 8: PASS - isometry invariance within 1e-6; "
          "byte-identical outputs for 1/4/8 workers")


@pytest.mark.slow
def test_criterion_9_desk_scale_performance(tmp_path):
    rng = np.random.default_rng(909)
    pts = rng.uniform(0, 4, (500, 2))
    labs = rng.integers(0, 3, 500)
    labs[:3] = np.arange(3)
    cloud = LabelledPointCloud(pts, labs)
    t0 = time.time()
    vec, _ = assemble_feature_vector(cloud, [0, 1, 2], 3)
    single = time.time() - t0
    assert len(vec) == 3 * SINGLE_LEN + 4 * PACK_LEN
    assert single < 10.0, f"single cloud took {single:.1f}s"

    files = []
    for s in range(100):
        p = tmp_path / f"b{s:03d}.csv"
        cmd_synth("uniform_noise", p, dict(n=500, colors=3, extent=4.0, seed=s))
        files.append(p)
    mat = tmp_path / "batch.csv"
    t0 = time.time()
    rc = cmd_signature(files, mat, None, RunConfig(worker_count=8))
    batch = time.time() - t0
    assert rc == 0
    assert len(mat.read_text().strip().splitlines()) == 101
    assert batch < 300.0, f"batch took {batch:.1f}s"
    print(f"\nACCEPTANCE 9: PASS - 500-pt signature {single:.1f}s (< 10s); "
          f"100-cloud batch at 8 workers {batch:.1f}s (< 300s)")
