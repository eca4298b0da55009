"""Shared helpers: random clouds, dense homology oracle, diagram comparison."""

import math

import numpy as np
import pytest

from chromasig import gf2
from chromasig.complexes import FilteredComplex, LabelledPointCloud


def random_cloud(rng, n, colors, spread=2.0, d=2):
    pts = rng.random((n, d)) * spread
    labs = rng.integers(0, colors, n)
    labs[:colors] = np.arange(colors)  # every color present
    return LabelledPointCloud(pts, labs)


def betti_numbers(K: FilteredComplex, t: float, max_degree: int) -> list[int]:
    """Z/2 Betti numbers of the sublevel complex at t by dense elimination."""
    alive = {d: [g for g in K.of_dim(d) if K.values[g] <= t]
             for d in range(max(K.dim, max_degree) + 2)}
    out = []
    for d in range(max_degree + 1):
        cols = alive.get(d, [])
        if not cols:
            out.append(0)
            continue
        col_of = {g: i for i, g in enumerate(cols)}
        if d == 0:
            z = len(cols)
        else:
            faces = alive.get(d - 1, [])
            face_of = {g: i for i, g in enumerate(faces)}
            D = np.zeros((len(faces), len(cols)), dtype=np.uint8)
            for g in cols:
                s = K.simplices[g]
                for i in range(len(s)):
                    D[face_of[K.index(s[:i] + s[i + 1:])], col_of[g]] ^= 1
            z = len(cols) - gf2.rank(D)
        up = alive.get(d + 1, [])
        if up:
            D2 = np.zeros((len(cols), len(up)), dtype=np.uint8)
            for j, g in enumerate(up):
                s = K.simplices[g]
                for i in range(len(s)):
                    D2[col_of[K.index(s[:i] + s[i + 1:])], j] ^= 1
            b = gf2.rank(D2)
        else:
            b = 0
        out.append(z - b)
    return out


def diagram_multiset(dgm, ndigits=9):
    return sorted((round(b, ndigits), math.inf if d == math.inf else round(d, ndigits))
                  for b, d in dgm.points)


def assert_diagrams_equal(dgms_a, dgms_b, tol=1e-9):
    assert len(dgms_a) == len(dgms_b)
    for da, db in zip(dgms_a, dgms_b):
        pa, pb = sorted(da.points), sorted(db.points)
        assert len(pa) == len(pb), (da.degree, pa, pb)
        for (b1, d1), (b2, d2) in zip(pa, pb):
            assert abs(b1 - b2) <= tol, (da.degree, pa, pb)
            if math.inf in (d1, d2):
                assert d1 == d2, (da.degree, pa, pb)
            else:
                assert abs(d1 - d2) <= tol, (da.degree, pa, pb)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
