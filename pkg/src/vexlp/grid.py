"""Periodic uniform grids, Riemann-sum quadrature and the scaled discrete
Fourier transform.

The continuum ``R^n`` is replaced by the periodic box ``[-L, L)^n`` sampled at
``x_j = -L + j*dx`` with ``dx = 2L/N``.  Frequencies live on ``xi_k = pi*k/L``
for ``k in [-N/2, N/2)``; the Nyquist bound is ``pi*N/(2L)``.

The transform is normalised as ``(2 pi)^{-n/2} \\int e^{-i x.xi} f(x) dx`` and
realised by the FFT with quadrature weight ``dx^n`` and the phase factor coming
from the left endpoint ``-L`` of the box.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Grid",
    "SampledFunction",
    "SpectralFunction",
    "make_grid",
    "integrate",
    "dft",
    "idft",
]


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic uniform grid on ``[-L, L)^n``."""

    dimension: int
    half_width: float
    points_per_axis: int

    def __post_init__(self) -> None:
        if self.dimension not in (1, 2):
            raise ValueError(f"dimension must be 1 or 2, got {self.dimension}")
        if not (self.half_width > 0 and math.isfinite(self.half_width)):
            raise ValueError(f"half_width must be positive, got {self.half_width}")
        n = self.points_per_axis
        if not isinstance(n, (int, np.integer)) or n < 8 or not _is_power_of_two(int(n)):
            raise ValueError(f"points_per_axis must be a power of two >= 8, got {n}")

    @property
    def spacing(self) -> float:
        return 2.0 * self.half_width / self.points_per_axis

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.points_per_axis,) * self.dimension

    @property
    def size(self) -> int:
        return self.points_per_axis**self.dimension

    @property
    def cell_volume(self) -> float:
        return self.spacing**self.dimension

    @property
    def nyquist(self) -> float:
        """Largest representable frequency ``pi*N/(2L)``."""
        return math.pi * self.points_per_axis / (2.0 * self.half_width)

    @property
    def origin_index(self) -> tuple[int, ...]:
        """Multi-index of the grid point ``x = 0``."""
        return (self.points_per_axis // 2,) * self.dimension

    def axis(self) -> np.ndarray:
        return -self.half_width + self.spacing * np.arange(self.points_per_axis)

    def coords(self) -> tuple[np.ndarray, ...]:
        ax = self.axis()
        return tuple(np.meshgrid(*([ax] * self.dimension), indexing="ij"))

    def radius(self) -> np.ndarray:
        """``|x_j|`` at every grid point."""
        return np.sqrt(sum(c * c for c in self.coords()))

    def frequencies(self) -> tuple[np.ndarray, ...]:
        """Frequency coordinates ``xi_k = pi*k/L`` in centred (fftshift) order."""
        n = self.points_per_axis
        k = np.arange(-n // 2, n // 2)
        xi = math.pi * k / self.half_width
        return tuple(np.meshgrid(*([xi] * self.dimension), indexing="ij"))

    def frequency_radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.frequencies()))

    def cells(self, h) -> tuple[int, ...]:
        """Convert a physical offset into whole cells per axis.

        Raises ``ValueError`` if any component is not an integer multiple of
        the spacing.
        """
        h_arr = np.atleast_1d(np.asarray(h, dtype=float))
        if h_arr.size == 1 and self.dimension > 1:
            h_arr = np.repeat(h_arr, self.dimension)
        if h_arr.size != self.dimension:
            raise ValueError(f"offset has {h_arr.size} components, grid has {self.dimension}")
        ratio = h_arr / self.spacing
        rounded = np.rint(ratio)
        if not np.allclose(ratio, rounded, rtol=0.0, atol=1e-9):
            raise ValueError(f"offset {h_arr.tolist()} is not a multiple of spacing {self.spacing}")
        return tuple(int(k) for k in rounded)

    def sample(self, fn: Callable[..., np.ndarray]) -> "SampledFunction":
        """Evaluate ``fn(*coords)`` on the grid."""
        return SampledFunction(self, np.asarray(fn(*self.coords())))


def make_grid(dimension: int, half_width: float, points_per_axis: int) -> Grid:
    return Grid(int(dimension), float(half_width), int(points_per_axis))


@dataclass(frozen=True, eq=False)
class SampledFunction:
    """Samples of a function on a grid; real or complex, always finite."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        vals = np.asarray(self.values)
        if vals.dtype.kind not in "fc":
            vals = vals.astype(float)
        if vals.size == self.grid.size and vals.shape != self.grid.shape:
            vals = vals.reshape(self.grid.shape)
        if vals.shape != self.grid.shape:
            raise ValueError(f"values shape {vals.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(vals)):
            raise ValueError("sampled values must be finite")
        vals = np.array(vals, copy=True)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def is_complex(self) -> bool:
        return self.values.dtype.kind == "c"

    def abs(self) -> "SampledFunction":
        return SampledFunction(self.grid, np.abs(self.values))

    def with_values(self, values: np.ndarray) -> "SampledFunction":
        return SampledFunction(self.grid, values)

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.values)))

    def __mul__(self, scalar: float) -> "SampledFunction":
        return SampledFunction(self.grid, self.values * scalar)

    __rmul__ = __mul__

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        _same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values)


@dataclass(frozen=True, eq=False)
class SpectralFunction:
    """Fourier coefficients at ``xi_k`` in centred order (``k = -N/2 .. N/2-1``)."""

    grid: Grid
    coefficients: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        coeffs = np.array(self.coefficients, dtype=complex, copy=True)
        if coeffs.shape != self.grid.shape:
            raise ValueError(f"coefficient shape {coeffs.shape} does not match grid {self.grid.shape}")
        coeffs.setflags(write=False)
        object.__setattr__(self, "coefficients", coeffs)


def _same_grid(f: SampledFunction, g: SampledFunction) -> None:
    if f.grid != g.grid:
        raise ValueError("functions live on different grids")


def integrate(f: SampledFunction) -> float | complex:
    """Riemann sum ``dx^n * sum_j f(x_j)``."""
    total = f.grid.cell_volume * np.sum(f.values)
    return complex(total) if f.is_complex else float(total)


def _phase(grid: Grid) -> np.ndarray:
    # e^{i L xi_k} = (-1)^k for every axis, k in centred order.
    n = grid.points_per_axis
    sign = np.where(np.arange(-n // 2, n // 2) % 2 == 0, 1.0, -1.0)
    out = sign
    for _ in range(grid.dimension - 1):
        out = np.multiply.outer(out, sign)
    return out


def _scale(grid: Grid) -> float:
    return grid.cell_volume * (2.0 * math.pi) ** (-grid.dimension / 2.0)


def dft(f: SampledFunction) -> SpectralFunction:
    """Approximate ``(2 pi)^{-n/2} \\int e^{-i x.xi} f(x) dx`` at ``xi_k``."""
    grid = f.grid
    raw = np.fft.fftshift(np.fft.fftn(f.values))
    return SpectralFunction(grid, _scale(grid) * _phase(grid) * raw)


def idft(F: SpectralFunction, *, real: bool = False) -> SampledFunction:
    """Exact inverse of :func:`dft`.  ``real=True`` drops the imaginary part."""
    grid = F.grid
    raw = F.coefficients * _phase(grid) / _scale(grid)
    vals = np.fft.ifftn(np.fft.ifftshift(raw))
    return SampledFunction(grid, vals.real if real else vals)
