"""Exponent fields ``p(.)`` and log-Hölder constant estimation.

A function ``g`` is locally log-Hölder continuous with constant ``c`` when
``|g(x) - g(y)| <= c / ln(e + 1/|x - y|)`` and satisfies the decay condition
towards ``g_inf`` when ``|g(x) - g_inf| <= c / ln(e + |x|)``.  On a grid both
constants are estimated as maxima over sampled pairs / points, so they are
lower bounds of the continuum constants and exact grid suprema when all pairs
are examined.

Distances are Euclidean distances between grid coordinates inside the box
(no periodic wrap).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from vexlp.grid import Grid, SampledFunction

__all__ = [
    "ExponentField",
    "LogHolderReport",
    "FAMILIES",
    "build_exponent",
    "exponent_from_samples",
    "estimate_clog_local",
    "estimate_clog_decay",
    "check_plog",
    "EXHAUSTIVE_POINT_LIMIT",
]

P_FLOOR = 0.1
P_CEILING = 64.0
# All pairs are examined at or below this many grid points.
EXHAUSTIVE_POINT_LIMIT = 256
_BLOCK = 1024

FAMILIES = ("constant", "smooth_bump", "log_borderline", "step")


@dataclass(frozen=True, eq=False)
class ExponentField:
    """Sampled exponent with cached essential bounds.

    ``p_infinity`` is ``None`` when the exponent has no limit at infinity
    (the step family).  ``plog_family`` is ``False`` for families that are not
    in the log-Hölder class even though every finite grid sample is.
    """

    samples: SampledFunction
    p_minus: float
    p_plus: float
    p_infinity: float | None
    family: str = "samples"
    plog_family: bool = True

    @property
    def grid(self) -> Grid:
        return self.samples.grid

    @property
    def values(self) -> np.ndarray:
        return self.samples.values

    @property
    def is_constant(self) -> bool:
        return self.p_minus == self.p_plus

    @property
    def in_class_p(self) -> bool:
        """Range in ``[1, inf)``; otherwise only the quasi-norm class."""
        return self.p_minus >= 1.0

    def reciprocal(self) -> SampledFunction:
        return SampledFunction(self.grid, 1.0 / self.values)


def exponent_from_samples(
    samples: SampledFunction | np.ndarray,
    grid: Grid | None = None,
    *,
    p_infinity: float | None = None,
    family: str = "samples",
    plog_family: bool = True,
) -> ExponentField:
    if not isinstance(samples, SampledFunction):
        if grid is None:
            raise ValueError("grid is required when passing raw samples")
        samples = SampledFunction(grid, np.asarray(samples, dtype=float))
    vals = samples.values
    if samples.is_complex:
        raise ValueError("exponent samples must be real")
    lo, hi = float(vals.min()), float(vals.max())
    if lo < P_FLOOR or hi > P_CEILING:
        raise ValueError(f"exponent range [{lo}, {hi}] outside [{P_FLOOR}, {P_CEILING}]")
    return ExponentField(samples, lo, hi, p_infinity, family, plog_family)


def build_exponent(family: str, params: dict, grid: Grid) -> ExponentField:
    """Build an exponent from a named family.

    Families
    --------
    constant        ``p0``
    smooth_bump     ``p0 + amplitude * exp(-|x|^2 / width^2)``, limit ``p0``
    log_borderline  ``p0 + a / ln(e + 1/|x|)`` (``p0`` at the origin), limit ``p0 + a``
    step            ``p_left`` on ``x_1 < 0``, ``p_right`` on ``x_1 >= 0``; no limit
    """
    r = grid.radius()
    if family == "constant":
        p0 = float(params["p0"])
        vals = np.full(grid.shape, p0)
        p_inf: float | None = p0
    elif family == "smooth_bump":
        p0, amp, width = float(params["p0"]), float(params["amplitude"]), float(params["width"])
        if width <= 0:
            raise ValueError("smooth_bump width must be positive")
        vals = p0 + amp * np.exp(-((r / width) ** 2))
        p_inf = p0
    elif family == "log_borderline":
        p0, a = float(params["p0"]), float(params["a"])
        with np.errstate(divide="ignore"):
            bump = np.where(r > 0, a / np.log(math.e + 1.0 / np.where(r > 0, r, 1.0)), 0.0)
        vals = p0 + bump
        p_inf = p0 + a
    elif family == "step":
        left, right = float(params["p_left"]), float(params["p_right"])
        x1 = grid.coords()[0]
        vals = np.where(x1 < 0, left, right)
        p_inf = None
    else:
        raise ValueError(f"unknown exponent family {family!r}; expected one of {FAMILIES}")
    return exponent_from_samples(
        SampledFunction(grid, vals),
        p_infinity=p_inf,
        family=family,
        plog_family=family != "step",
    )


# ---------------------------------------------------------------------------
# local log-Hölder constant
# ---------------------------------------------------------------------------


def _displacements(grid: Grid) -> Iterator[tuple[int, ...]]:
    """Half of all nonzero displacement vectors (one of each +/- pair)."""
    n = grid.points_per_axis
    if grid.dimension == 1:
        for d in range(1, n):
            yield (d,)
    else:
        for dx in range(0, n):
            for dy in range(-(n - 1), n):
                if dx == 0 and dy <= 0:
                    continue
                yield (dx, dy)


def _overlap(d: int) -> tuple[slice, slice]:
    # Index ranges a, b with b = a + d, both inside [0, n).
    if d >= 0:
        return slice(0, None if d == 0 else -d), slice(d, None)
    return slice(-d, None), slice(0, d)


def _exhaustive_local(vals: np.ndarray, grid: Grid) -> float:
    best = 0.0
    dx = grid.spacing
    for disp in _displacements(grid):
        dist = dx * math.sqrt(sum(k * k for k in disp))
        weight = math.log(math.e + 1.0 / dist)
        if grid.dimension == 1:
            a, b = _overlap(disp[0])
            diff = vals[a] - vals[b]
        else:
            (a0, b0), (a1, b1) = _overlap(disp[0]), _overlap(disp[1])
            diff = vals[a0, a1] - vals[b0, b1]
        if diff.size:
            best = max(best, float(np.max(np.abs(diff))) * weight)
    return best


def _band_count(grid: Grid) -> int:
    n = grid.points_per_axis
    max_dist = (n - 1) * math.sqrt(grid.dimension)
    return int(math.floor(math.log2(max_dist))) + 1


def _band_block(grid: Grid, seed: int, band: int, block: int) -> tuple[np.ndarray, np.ndarray]:
    """One block of random pairs with cell distance in ``[2^band, 2^(band+1))``.

    Returns index arrays ``(first, second)`` of shape ``(_BLOCK, dim)``.
    """
    rng = np.random.default_rng([seed, band, block])
    n = grid.points_per_axis
    lo, hi = 2.0**band, 2.0 ** (band + 1)
    if grid.dimension == 1:
        mag = rng.integers(int(lo), int(hi), size=_BLOCK)
        mag = np.minimum(mag, n - 1)
        sign = np.where(rng.random(_BLOCK) < 0.5, -1, 1)
        disp = (mag * sign)[:, None]
    else:
        rad = lo + (hi - lo) * rng.random(_BLOCK)
        ang = 2.0 * math.pi * rng.random(_BLOCK)
        disp = np.stack([np.rint(rad * np.cos(ang)), np.rint(rad * np.sin(ang))], axis=1).astype(int)
        disp = np.clip(disp, -(n - 1), n - 1)
        zero = np.all(disp == 0, axis=1)
        disp[zero, 0] = 1
    u = rng.random(disp.shape)
    start_lo = np.maximum(0, -disp)
    start_hi = n - np.maximum(0, disp)
    first = start_lo + np.floor(u * (start_hi - start_lo)).astype(int)
    return first, first + disp


def _sampled_pairs(grid: Grid, budget: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic stratified pairs; the set for budget ``b`` is a prefix of
    the set for any larger budget.

    Pair ``i`` of the global sequence comes from dyadic band ``i mod B``
    (smallest distances first), so short-range pairs are over-represented
    relative to their share of all pairs.
    """
    bands = _band_count(grid)
    firsts, seconds = [], []
    for band in range(bands):
        count = (budget - band + bands - 1) // bands if budget > band else 0
        if count == 0:
            continue
        blocks = (count + _BLOCK - 1) // _BLOCK
        fa, sa = zip(*(_band_block(grid, seed, band, b) for b in range(blocks)))
        firsts.append(np.concatenate(fa)[:count])
        seconds.append(np.concatenate(sa)[:count])
    return np.concatenate(firsts), np.concatenate(seconds)


def estimate_clog_local(
    g: SampledFunction,
    pair_budget: int = 20000,
    *,
    seed: int = 0,
    exhaustive: bool | None = None,
) -> float:
    """Max of ``|g(x) - g(y)| * ln(e + 1/|x - y|)`` over pairs of grid points.

    All pairs are used when the grid has at most ``EXHAUSTIVE_POINT_LIMIT``
    points or when ``exhaustive=True``; otherwise ``pair_budget`` pairs are
    drawn by :func:`_sampled_pairs`.
    """
    if pair_budget < 1:
        raise ValueError("pair_budget must be >= 1")
    grid = g.grid
    vals = np.asarray(g.values)
    if exhaustive is None:
        exhaustive = grid.size <= EXHAUSTIVE_POINT_LIMIT
    if exhaustive:
        return _exhaustive_local(vals, grid)
    first, second = _sampled_pairs(grid, pair_budget, seed)
    dist = grid.spacing * np.sqrt(np.sum((first - second) ** 2, axis=1))
    idx_a = tuple(first.T)
    idx_b = tuple(second.T)
    diff = np.abs(vals[idx_a] - vals[idx_b])
    return float(np.max(diff * np.log(math.e + 1.0 / dist)))


def estimate_clog_decay(g: SampledFunction, g_infinity: float) -> float:
    """Max over grid points of ``|g(x) - g_inf| * ln(e + |x|)``."""
    r = g.grid.radius()
    return float(np.max(np.abs(g.values - g_infinity) * np.log(math.e + r)))


# ---------------------------------------------------------------------------
# P^log membership
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogHolderReport:
    """Estimated log-Hölder constants of ``p`` and ``1/p``.

    ``clog_decay`` is the decay constant of ``1/p`` (towards ``1/p_inf``);
    ``clog_decay_p`` the one of ``p`` itself.  Both are ``None`` when the
    exponent has no limit at infinity.
    """

    clog_local_p: float
    clog_local_recip: float
    clog_decay: float | None
    clog_decay_p: float | None
    is_plog: bool
    pair_budget: int
    exhaustive: bool
    reason: str = ""

    @property
    def clog_recip(self) -> float:
        """``max(local, decay)`` for ``1/p``: the constant entering ``gamma``."""
        return max(self.clog_local_recip, self.clog_decay or 0.0)

    @property
    def clog_p(self) -> float:
        return max(self.clog_local_p, self.clog_decay_p or 0.0)


def check_plog(
    p: ExponentField,
    threshold: float = 10.0,
    *,
    pair_budget: int = 20000,
    seed: int = 0,
    exhaustive: bool | None = None,
) -> LogHolderReport:
    if exhaustive is None:
        exhaustive = p.grid.size <= EXHAUSTIVE_POINT_LIMIT
    recip = p.reciprocal()
    local_p = estimate_clog_local(p.samples, pair_budget, seed=seed, exhaustive=exhaustive)
    local_r = estimate_clog_local(recip, pair_budget, seed=seed, exhaustive=exhaustive)
    if p.p_infinity is None:
        decay_r = decay_p = None
    else:
        decay_r = estimate_clog_decay(recip, 1.0 / p.p_infinity)
        decay_p = estimate_clog_decay(p.samples, p.p_infinity)

    reasons = []
    if not p.plog_family:
        reasons.append(f"{p.family} family is not log-Hölder")
    if p.p_infinity is None:
        reasons.append("no limit at infinity")
    if local_r > threshold:
        reasons.append(f"local constant of 1/p {local_r:.6g} > {threshold}")
    if decay_r is not None and decay_r > threshold:
        reasons.append(f"decay constant of 1/p {decay_r:.6g} > {threshold}")
    return LogHolderReport(
        clog_local_p=local_p,
        clog_local_recip=local_r,
        clog_decay=decay_r,
        clog_decay_p=decay_p,
        is_plog=not reasons,
        pair_budget=pair_budget,
        exhaustive=bool(exhaustive),
        reason="; ".join(reasons),
    )
