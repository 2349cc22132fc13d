"""Translation, ball averages, the discrete maximal operator, the dyadic
mollifier ``eta_{v,m}``, periodic convolution and band-limit projection.

Balls are discrete: ``B(c, r)`` is the set of grid points whose periodic
distance to ``c`` is strictly less than ``r``, and ``|B|`` is the counted cell
volume.  The centre cell always belongs to the ball.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate as quad_integrate

from vexlp.grid import Grid, SampledFunction, SpectralFunction, dft, idft

__all__ = [
    "NotCellAlignedError",
    "NyquistError",
    "EtaKernel",
    "RadiiSet",
    "RTrickResult",
    "translate",
    "ball_offsets",
    "ball_sum_field",
    "ball_average",
    "ball_average_field",
    "hl_maximal",
    "eta_kernel",
    "eta_total_mass",
    "eta_tail_mass",
    "convolve",
    "band_cutoff",
    "is_bandlimited",
    "bandlimit_project",
    "r_trick_ratio",
]


class NotCellAlignedError(ValueError):
    pass


class NyquistError(ValueError):
    pass


# ---------------------------------------------------------------------------
# translation
# ---------------------------------------------------------------------------


def band_cutoff(v: int) -> float:
    """Frequency radius ``2^(v+1)`` of band level ``v``."""
    return 2.0 ** (v + 1)


def _check_nyquist(grid: Grid, v: int) -> None:
    if v < 0:
        raise NyquistError(f"band level must be >= 0, got {v}")
    if not band_cutoff(v) < grid.nyquist:
        raise NyquistError(
            f"band level {v} needs 2^(v+1) = {band_cutoff(v):g} < Nyquist {grid.nyquist:g}"
        )


def is_bandlimited(f: SampledFunction, v: int, rtol: float = 1e-10) -> bool:
    coeffs = dft(f).coefficients
    outside = f.grid.frequency_radius() > band_cutoff(v)
    total = np.linalg.norm(coeffs)
    return total == 0 or float(np.linalg.norm(coeffs[outside])) <= rtol * total


def translate(f: SampledFunction, h, *, level: int | None = None) -> SampledFunction:
    """``(tau_h f)(y) = f(y + h)`` on the periodic grid.

    Cell-aligned offsets permute the samples exactly.  Other offsets are only
    accepted for band-limited input (``level`` given and verified), where the
    shift is the spectral phase ``e^{i h.xi}``.
    """
    grid = f.grid
    try:
        cells = grid.cells(h)
    except ValueError:
        cells = None
    if cells is not None:
        return SampledFunction(grid, shift_cells(f.values, cells))
    if level is None or not is_bandlimited(f, level):
        raise NotCellAlignedError(
            f"offset {h!r} is not cell-aligned and f is not declared band-limited"
        )
    h_vec = np.broadcast_to(np.asarray(h, dtype=float), (grid.dimension,))
    phase = np.exp(1j * sum(hk * xi for hk, xi in zip(h_vec, grid.frequencies())))
    shifted = idft(SpectralFunction(grid, dft(f).coefficients * phase), real=not f.is_complex)
    return shifted


def shift_cells(values: np.ndarray, cells: tuple[int, ...]) -> np.ndarray:
    """Sample array of ``y -> f(y + cells*dx)``."""
    return np.roll(values, tuple(-k for k in cells), axis=tuple(range(values.ndim)))


# ---------------------------------------------------------------------------
# balls and the maximal operator
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RadiiSet:
    radii: tuple[float, ...]

    def __post_init__(self) -> None:
        r = self.radii
        if not r or any(b <= a for a, b in zip(r, r[1:])) or r[0] <= 0:
            raise ValueError("radii must be positive and strictly increasing")

    @classmethod
    def dyadic(cls, grid: Grid) -> "RadiiSet":
        """``{dx * 2^k : k = 0 .. log2(N/2)}``; the largest radius is ``L``."""
        top = int(math.log2(grid.points_per_axis // 2))
        return cls(tuple(grid.spacing * 2.0**k for k in range(top + 1)))

    def validate(self, grid: Grid) -> None:
        eps = 1e-12 * grid.spacing
        if self.radii[0] < grid.spacing - eps or self.radii[-1] > grid.half_width + eps:
            raise ValueError(f"radii must lie in [{grid.spacing}, {grid.half_width}]")


@lru_cache(maxsize=256)
def _offsets_cached(dimension: int, radius_cells: float) -> tuple[tuple[int, ...], ...]:
    reach = int(math.ceil(radius_cells))
    r2 = radius_cells * radius_cells * (1.0 - 1e-12)
    rng = range(-reach, reach + 1)
    if dimension == 1:
        pts = [(k,) for k in rng if k * k < r2]
    else:
        pts = [(a, b) for a in rng for b in rng if a * a + b * b < r2]
    # Sort by distance so nested radii share a prefix.
    pts.sort(key=lambda k: (sum(c * c for c in k), k))
    return tuple(pts)


def ball_offsets(grid: Grid, r: float) -> tuple[tuple[int, ...], ...]:
    """Cell offsets of the open discrete ball of radius ``r`` around 0."""
    if not (grid.spacing * (1 - 1e-12) <= r <= grid.half_width * (1 + 1e-12)):
        raise ValueError(f"radius {r} outside [{grid.spacing}, {grid.half_width}]")
    return _offsets_cached(grid.dimension, r / grid.spacing)


def ball_sum_field(values: np.ndarray, offsets) -> np.ndarray:
    """``S(x) = sum_{k in offsets} values(x + k)``.

    Summation order is fixed by ``offsets``, so the result commutes exactly
    with any cell shift of ``values``.
    """
    axes = tuple(range(values.ndim))
    out = np.zeros_like(values, dtype=float)
    for k in offsets:
        out += np.roll(values, tuple(-c for c in k), axis=axes)
    return out


def ball_average_field(f: SampledFunction, r: float, offset=None) -> SampledFunction:
    """``x -> M_{B(x+t, r)} f(x)`` for every grid point (``t`` cell-aligned)."""
    grid = f.grid
    offs = ball_offsets(grid, r)
    avg = ball_sum_field(np.abs(f.values), offs) / len(offs)
    if offset is not None:
        avg = shift_cells(avg, grid.cells(offset))
    return SampledFunction(grid, avg)


def ball_average(f: SampledFunction, center: tuple[int, ...] | int, r: float, offset=None) -> float:
    """Mean of ``|f|`` over the discrete ball ``B(x + t, r)``.

    ``center`` is the multi-index of ``x``; ``offset`` the physical shift ``t``.
    """
    grid = f.grid
    idx = np.atleast_1d(np.asarray(center, dtype=int))
    if offset is not None:
        idx = idx + np.asarray(grid.cells(offset))
    offs = np.asarray(ball_offsets(grid, r))
    pts = (idx[None, :] + offs) % grid.points_per_axis
    vals = np.abs(f.values[tuple(pts.T)])
    # Sequential sum in offset order, matching hl_maximal bit for bit.
    return float(np.cumsum(vals)[-1] / len(vals))


def hl_maximal(f: SampledFunction, radii: RadiiSet | None = None) -> SampledFunction:
    """Discrete maximal function: max over ``radii`` of centred ball averages."""
    grid = f.grid
    radii = radii or RadiiSet.dyadic(grid)
    radii.validate(grid)
    absf = np.abs(f.values)
    out = np.zeros(grid.shape)
    # Nested balls: accumulate shells instead of re-summing each ball.
    running = np.zeros(grid.shape)
    used = 0
    axes = tuple(range(grid.dimension))
    for r in radii.radii:
        offs = ball_offsets(grid, r)
        for k in offs[used:]:
            running += np.roll(absf, tuple(-c for c in k), axis=axes)
        used = len(offs)
        np.maximum(out, running / used, out=out)
    return SampledFunction(grid, out)


# ---------------------------------------------------------------------------
# eta_{v,m}
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class EtaKernel:
    v: int
    m: float
    samples: SampledFunction
    mass: float

    @property
    def tail_mass(self) -> float:
        """Analytic mass outside the box."""
        return eta_tail_mass(self.samples.grid, self.v, self.m)

    @property
    def corrected_mass(self) -> float:
        return self.mass + self.tail_mass


def eta_profile(r: np.ndarray, n: int, v: int, m: float) -> np.ndarray:
    """``eta_{v,m}(x) = 2^{nv} (1 + 2^v |x|)^{-m}`` as a function of ``|x|``."""
    return 2.0 ** (n * v) * (1.0 + 2.0**v * r) ** (-m)


def eta_kernel(grid: Grid, v: int, m: float) -> EtaKernel:
    n = grid.dimension
    if m <= n:
        raise ValueError(f"eta_(v,m) is not integrable for m = {m} <= n = {n}")
    if v < 0 or 2.0**v > grid.points_per_axis / (2.0 * grid.half_width):
        raise ValueError(f"level v = {v} is not resolved: need 2^v <= N/(2L)")
    samples = SampledFunction(grid, eta_profile(grid.radius(), n, v, m))
    mass = grid.cell_volume * float(np.sum(samples.values))
    return EtaKernel(v, m, samples, mass)


def eta_total_mass(n: int, m: float) -> float:
    """``||eta_{v,m}||_1`` on ``R^n``; independent of ``v``."""
    if n == 1:
        return 2.0 / (m - 1.0)
    if n == 2:
        return 2.0 * math.pi / ((m - 1.0) * (m - 2.0))
    raise ValueError("only n in {1, 2} supported")


def _radial_tail(R: float, v: int, m: float, n: int) -> float:
    # \int_R^inf eta(r) r^{n-1} dr with u = 1 + 2^v r.
    u = 1.0 + 2.0**v * R
    if n == 1:
        return u ** (1.0 - m) / (m - 1.0)
    return u ** (2.0 - m) / (m - 2.0) - u ** (1.0 - m) / (m - 1.0)


def eta_tail_mass(grid: Grid, v: int, m: float) -> float:
    """Mass of ``eta_{v,m}`` outside the box ``[-L, L]^n``.

    Closed form for ``n = 1``; for ``n = 2`` the radial tail is closed form and
    the angle is integrated numerically.
    """
    L = grid.half_width
    if grid.dimension == 1:
        return 2.0 * _radial_tail(L, v, m, 1)

    def integrand(theta: float) -> float:
        R = L / max(abs(math.cos(theta)), abs(math.sin(theta)))
        return _radial_tail(R, v, m, 2)

    # Symmetric under the dihedral group: integrate over [0, pi/4] and scale.
    val, _ = quad_integrate.quad(integrand, 0.0, math.pi / 4.0, epsabs=1e-14, epsrel=1e-12)
    return 8.0 * val


# ---------------------------------------------------------------------------
# convolution and band limits
# ---------------------------------------------------------------------------


def convolve(f: SampledFunction, g: SampledFunction) -> SampledFunction:
    """Periodic ``(f*g)(x_i) = dx^n sum_j f(x_j) g(x_i - x_j)``.

    ``g`` is read relative to the origin sample, so a unit-mass spike at
    ``x = 0`` is the identity.
    """
    if f.grid != g.grid:
        raise ValueError("functions live on different grids")
    grid = f.grid
    g0 = np.fft.ifftshift(g.values)
    out = np.fft.ifftn(np.fft.fftn(f.values) * np.fft.fftn(g0)) * grid.cell_volume
    if not (f.is_complex or g.is_complex):
        out = out.real
    return SampledFunction(grid, out)


def bandlimit_project(f: SampledFunction, v: int) -> SampledFunction:
    """Zero every coefficient with ``|xi| > 2^(v+1)`` and invert."""
    grid = f.grid
    _check_nyquist(grid, v)
    coeffs = dft(f).coefficients.copy()
    coeffs[grid.frequency_radius() > band_cutoff(v)] = 0.0
    return idft(SpectralFunction(grid, coeffs), real=not f.is_complex)


@dataclass(frozen=True)
class RTrickResult:
    ratio: float
    skipped: int

    def __float__(self) -> float:
        return self.ratio


def r_trick_ratio(g: SampledFunction, r: float, m: float, v: int) -> RTrickResult:
    """Empirical constant ``sup |g| / (eta_{v,m} * |g|^r)^{1/r}``.

    Points where the smoothed denominator vanishes (numerically) are skipped
    and counted.
    """
    if r <= 0:
        raise ValueError("r must be positive")
    eta = eta_kernel(g.grid, v, m)
    absg = np.abs(g.values)
    smooth = convolve(SampledFunction(g.grid, absg**r), eta.samples).values
    floor = 1e-13 * max(float(smooth.max()), 0.0)
    ok = smooth > floor
    skipped = int(np.count_nonzero(~ok))
    if not np.any(ok):
        return RTrickResult(0.0, skipped)
    ratio = absg[ok] / smooth[ok] ** (1.0 / r)
    return RTrickResult(float(ratio.max()), skipped)
