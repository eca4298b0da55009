"""Seeded generators for the synthetic benchmark configurations.

Each generator returns (points, labels) for a labelled cloud realizing one of
the toy spatial motifs: loops of one or more colors, filled loops, co-located
loops, and loops that only exist when several colors are combined.
"""

from __future__ import annotations

import math

import numpy as np

from .complexes import InputError

FIXTURES = ("circle", "filled_circle", "colocated_circles",
            "dichromatic_arcs", "trichromatic_arcs", "uniform_noise")


def _ring(n: int, radius: float, center, rng, noise: float, phase: float = 0.0):
    ang = 2 * np.pi * np.arange(n) / n + phase
    pts = np.c_[np.cos(ang), np.sin(ang)] * radius + np.asarray(center)
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, pts.shape)
    return pts


def _sunflower_disk(n: int, radius: float, center, rng, noise: float):
    """Quasi-uniform disk fill (golden-angle spiral), jittered by the rng."""
    i = np.arange(1, n + 1)
    r = radius * np.sqrt((i - 0.5) / n)
    theta = i * math.pi * (3.0 - math.sqrt(5.0))
    pts = np.c_[r * np.cos(theta), r * np.sin(theta)] + np.asarray(center)
    if noise > 0:
        pts = pts + rng.normal(0.0, noise, pts.shape)
    return pts


def circle(n: int = 40, radius: float = 1.0, noise: float = 0.02, seed: int = 0,
           colors: int = 1):
    """One noisy circle; with colors > 1 the labels cycle around the ring."""
    rng = np.random.default_rng(seed)
    pts = _ring(n, radius, (0.0, 0.0), rng, noise)
    labels = np.arange(n) % colors
    return pts, labels


def filled_circle(n: int = 40, radius: float = 1.0, noise: float = 0.02, seed: int = 0,
                  fill_n: int = 60, loops: int = 1, spacing: float | None = None):
    """Circles of color 0, the first filled by a disk of color-1 points.

    ``loops`` extra unfilled circles are placed along the x axis, so with
    loops=3 this realizes the three-loops-one-filled motif.
    """
    rng = np.random.default_rng(seed)
    if spacing is None:
        spacing = 3.0 * radius
    pts = []
    labels = []
    for i in range(loops):
        center = (spacing * i, 0.0)
        pts.append(_ring(n, radius, center, rng, noise))
        labels.extend([0] * n)
    pts.append(_sunflower_disk(fill_n, 0.95 * radius, (0.0, 0.0), rng, noise))
    labels.extend([1] * fill_n)
    return np.vstack(pts), np.array(labels)


def colocated_circles(n: int = 40, radius: float = 1.0, noise: float = 0.02, seed: int = 0,
                      colors: int = 2, striped: bool = False):
    """Co-located loops sharing one center.

    Default: one full circle per color, rotated fractions of the point spacing
    apart (each color alone forms the loop).  ``striped``: a single circle of
    n points whose labels cycle through the colors, so no single color forms
    the loop but every pair of colors does (use colors=3 for the motif where
    three co-located two-color loops merge into one three-color loop).
    """
    rng = np.random.default_rng(seed)
    if striped:
        pts = _ring(n, radius, (0.0, 0.0), rng, noise)
        labels = np.arange(n) % colors
        return pts, labels
    pts = []
    labels = []
    for c in range(colors):
        phase = 2 * np.pi / n * (c / colors)
        pts.append(_ring(n, radius, (0.0, 0.0), rng, noise, phase=phase))
        labels.extend([c] * n)
    return np.vstack(pts), np.array(labels)


def dichromatic_arcs(n: int = 40, radius: float = 1.0, noise: float = 0.02, seed: int = 0):
    """One circle split into two half-arcs of different colors: the loop only
    exists when both colors are considered together."""
    rng = np.random.default_rng(seed)
    pts = _ring(n, radius, (0.0, 0.0), rng, noise)
    labels = (np.arange(n) >= n // 2).astype(int)
    return pts, labels


def trichromatic_arcs(n: int = 40, radius: float = 1.0, noise: float = 0.02, seed: int = 0):
    """One circle split into three arc thirds: the loop is not present in any
    pair of colors, only in all three together."""
    rng = np.random.default_rng(seed)
    pts = _ring(n, radius, (0.0, 0.0), rng, noise)
    labels = (3 * np.arange(n)) // n
    return pts, labels


def uniform_noise(n: int = 60, extent: float = 2.0, seed: int = 0, colors: int = 2,
                  noise: float = 0.0, radius: float = 0.0):
    """Uniform points in a square with cyclic labels (noise/radius unused)."""
    rng = np.random.default_rng(seed)
    pts = rng.uniform(0.0, extent, (n, 2))
    labels = rng.integers(0, colors, n)
    labels[:colors] = np.arange(colors)
    return pts, labels


GENERATORS = {
    "circle": circle,
    "filled_circle": filled_circle,
    "colocated_circles": colocated_circles,
    "dichromatic_arcs": dichromatic_arcs,
    "trichromatic_arcs": trichromatic_arcs,
    "uniform_noise": uniform_noise,
}


def generate(fixture: str, **params):
    gen = GENERATORS.get(fixture)
    if gen is None:
        raise InputError(f"unknown fixture {fixture!r}; choose from {', '.join(FIXTURES)}")
    return gen(**params)
