"""Seeded test-function families used by the verifiers and the harness."""

from __future__ import annotations

import math

import numpy as np

from vexlp.grid import Grid, SampledFunction
from vexlp.operators import bandlimit_project

__all__ = [
    "CORPUS_FAMILIES",
    "indicator",
    "gaussian",
    "clipped_power_law",
    "noise",
    "make_corpus",
    "bandlimited_corpus",
]

CORPUS_FAMILIES = ("indicator", "gaussian", "power_law", "noise")


def indicator(grid: Grid, lo, hi) -> SampledFunction:
    """``chi`` of the half-open box ``[lo, hi)`` (per axis)."""
    lo = np.broadcast_to(np.asarray(lo, dtype=float), (grid.dimension,))
    hi = np.broadcast_to(np.asarray(hi, dtype=float), (grid.dimension,))
    mask = np.ones(grid.shape, dtype=bool)
    for c, a, b in zip(grid.coords(), lo, hi):
        mask &= (c >= a) & (c < b)
    return SampledFunction(grid, mask.astype(float))


def gaussian(grid: Grid, center=0.0, width: float = 1.0, amplitude: float = 1.0) -> SampledFunction:
    center = np.broadcast_to(np.asarray(center, dtype=float), (grid.dimension,))
    r2 = sum((c - a) ** 2 for c, a in zip(grid.coords(), center))
    return SampledFunction(grid, amplitude * np.exp(-r2 / (2.0 * width**2)))


def clipped_power_law(
    grid: Grid, alpha: float = 0.25, clip: float = math.inf, support: float = 1.0
) -> SampledFunction:
    """``min(x^-alpha, clip) * chi_(0, support)`` along the first axis.

    In two dimensions the profile is extended as ``|x|^-alpha`` on the
    punctured ball of radius ``support``.  The singular point itself is 0.
    """
    if grid.dimension == 1:
        x = grid.coords()[0]
        inside = (x > 0) & (x < support)
        base = np.where(inside, x, 1.0)
    else:
        r = grid.radius()
        inside = (r > 0) & (r < support)
        base = np.where(inside, r, 1.0)
    vals = np.where(inside, np.minimum(base**-alpha, clip), 0.0)
    return SampledFunction(grid, vals)


def noise(grid: Grid, seed: int, v: int) -> SampledFunction:
    """White noise projected to band level ``v``, normalised to unit sup."""
    rng = np.random.default_rng([seed, v, 0x5EED])
    raw = SampledFunction(grid, rng.standard_normal(grid.shape))
    proj = bandlimit_project(raw, v)
    return proj * (1.0 / proj.sup_norm())


def make_corpus(
    grid: Grid, count: int, seed: int, families=CORPUS_FAMILIES, noise_level: int = 2
) -> list[tuple[str, SampledFunction]]:
    """``count`` functions cycling through ``families`` with seeded parameters."""
    rng = np.random.default_rng(seed)
    L = grid.half_width
    out = []
    for i in range(count):
        fam = families[i % len(families)]
        if fam == "indicator":
            a = rng.uniform(-0.6 * L, 0.2 * L)
            b = a + rng.uniform(0.1 * L, 0.5 * L)
            f = indicator(grid, a, b) * rng.uniform(0.5, 3.0)
        elif fam == "gaussian":
            f = gaussian(grid, rng.uniform(-0.3 * L, 0.3 * L), rng.uniform(0.05, 0.25) * L, rng.uniform(0.5, 3.0))
        elif fam == "power_law":
            f = clipped_power_law(grid, rng.uniform(0.1, 0.4), rng.uniform(2.0, 20.0), min(1.0, 0.5 * L))
        elif fam == "noise":
            f = noise(grid, int(rng.integers(2**31)), noise_level)
        else:
            raise ValueError(f"unknown corpus family {fam!r}")
        out.append((f"{fam}{i}", f))
    return out


def bandlimited_corpus(grid: Grid, v: int, count: int, seed: int) -> list[tuple[str, SampledFunction]]:
    """Functions band-limited at level ``v`` whose shapes scale like ``2^-v``.

    Alternates projected noise, dilated Gaussians and modulated Gaussians so
    that the family at level ``v`` is (up to periodisation) a dilation of the
    family at level 0.
    """
    rng = np.random.default_rng(seed)
    scale = 2.0**-v
    out = []
    for i in range(count):
        kind = i % 3
        if kind == 0:
            f = noise(grid, int(rng.integers(2**31)), v)
            name = f"noise{i}"
        elif kind == 1:
            c = rng.uniform(-2.0, 2.0) * scale
            f = bandlimit_project(gaussian(grid, c, rng.uniform(0.5, 1.5) * scale), v)
            name = f"gauss{i}"
        else:
            c = rng.uniform(-2.0, 2.0) * scale
            w = rng.uniform(1.0, 2.0) * scale
            freq = rng.uniform(0.3, 1.0) / scale
            base = gaussian(grid, c, w).values * np.cos(freq * (grid.coords()[0] - c))
            f = bandlimit_project(SampledFunction(grid, base), v)
            name = f"wave{i}"
        out.append((name, f))
    return out
