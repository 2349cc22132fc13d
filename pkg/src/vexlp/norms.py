"""Modular, Luxemburg (quasi-)norm and the unit-ball property."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from vexlp.exponents import ExponentField
from vexlp.grid import SampledFunction

__all__ = [
    "ModularOverflowError",
    "NormConvergenceError",
    "NormResult",
    "UnitBallReport",
    "modular",
    "luxemburg_norm",
    "unit_ball_check",
]

OVERFLOW_LIMIT = 1e300
_LOG_OVERFLOW = math.log(OVERFLOW_LIMIT)
MAX_ITERATIONS = 200


class ModularOverflowError(ArithmeticError):
    """Some term ``|f(x)|^p(x)`` exceeds ``OVERFLOW_LIMIT``."""


class NormConvergenceError(RuntimeError):
    pass


def _check_pair(f: SampledFunction, p: ExponentField) -> None:
    if f.grid != p.grid:
        raise ValueError("function and exponent live on different grids")


def _log_terms(absf: np.ndarray, p: np.ndarray, scale: float) -> np.ndarray:
    # p(x) * log(|f(x)|/scale) on the support of f; -inf elsewhere (0^p = 0).
    out = np.full(absf.shape, -np.inf)
    nz = absf > 0
    out[nz] = p[nz] * (np.log(absf[nz]) - math.log(scale))
    return out


def _modular_scaled(absf: np.ndarray, p: np.ndarray, mu: float, cell: float) -> float:
    """``rho(f/mu)``; ``inf`` when a term overflows."""
    logs = _log_terms(absf, p, mu)
    if logs.max() > _LOG_OVERFLOW:
        return math.inf
    return float(cell * np.sum(np.exp(logs)))


def modular(f: SampledFunction, p: ExponentField) -> float:
    """``rho(f) = dx^n * sum_j |f(x_j)|^p(x_j)`` with ``0^p = 0``."""
    _check_pair(f, p)
    value = _modular_scaled(np.abs(f.values), p.values, 1.0, f.grid.cell_volume)
    if math.isinf(value):
        raise ModularOverflowError(f"|f|^p exceeds {OVERFLOW_LIMIT:g}")
    return value


@dataclass(frozen=True)
class NormResult:
    value: float
    modular_at_value: float
    bisection_iterations: int
    bracket: tuple[float, float]

    def __float__(self) -> float:
        return self.value


def luxemburg_norm(f: SampledFunction, p: ExponentField, tol: float = 1e-10) -> NormResult:
    """``inf{mu > 0 : rho(f/mu) <= 1}`` by bracketing bisection.

    The bracket is shrunk until its relative width is below ``tol/100``,
    which keeps the modular residual at the returned value well inside
    ``tol`` for exponents up to 64.  The returned value is the upper end of
    the bracket, so ``rho(f/value) <= 1`` always holds.
    """
    _check_pair(f, p)
    if not (0 < tol <= 1e-4):
        raise ValueError(f"tol must lie in (0, 1e-4], got {tol}")
    absf = np.abs(f.values)
    sup = float(absf.max())
    if sup == 0.0:
        return NormResult(0.0, 0.0, 0, (0.0, 0.0))

    pv = p.values
    cell = f.grid.cell_volume
    volume = cell * f.grid.size

    def rho(mu: float) -> float:
        return _modular_scaled(absf, pv, mu, cell)

    lo = sup / 1e6
    hi = sup * volume + 1.0
    iterations = 0
    while rho(lo) <= 1.0:
        lo /= 1e3
        iterations += 1
        if lo == 0.0 or iterations > MAX_ITERATIONS:
            raise NormConvergenceError("could not bracket the norm from below")
    while rho(hi) > 1.0:
        hi *= 1e3
        iterations += 1
        if math.isinf(hi) or iterations > MAX_ITERATIONS:
            raise NormConvergenceError("could not bracket the norm from above")

    width = 1e-2 * tol
    while hi - lo > width * hi:
        iterations += 1
        if iterations > MAX_ITERATIONS:
            raise NormConvergenceError(f"bisection did not converge in {MAX_ITERATIONS} iterations")
        # Geometric midpoint while the bracket spans decades, then arithmetic.
        mid = math.sqrt(lo * hi) if hi > 2.0 * lo else 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if rho(mid) <= 1.0:
            hi = mid
        else:
            lo = mid
    return NormResult(hi, rho(hi), iterations, (lo, hi))


@dataclass(frozen=True)
class UnitBallReport:
    modular: float
    norm: float
    modular_inside: bool
    norm_inside: bool
    agree: bool
    slack: float

    def __bool__(self) -> bool:
        return self.agree


def unit_ball_check(
    f: SampledFunction, p: ExponentField, tol: float = 1e-10, slack_tol: float = 1e-9
) -> UnitBallReport:
    """Compare ``rho(f) <= 1`` with ``||f|| <= 1``.

    Within ``slack_tol`` of the boundary on either side the two verdicts are
    treated as consistent.
    """
    try:
        rho = modular(f, p)
    except ModularOverflowError:
        rho = math.inf
    norm = luxemburg_norm(f, p, tol).value
    mod_in = rho <= 1.0
    norm_in = norm <= 1.0
    boundary = abs(rho - 1.0) <= slack_tol or abs(norm - 1.0) <= slack_tol
    return UnitBallReport(
        modular=rho,
        norm=norm,
        modular_inside=mod_in,
        norm_inside=norm_in,
        agree=(mod_in == norm_in) or boundary,
        slack=min(abs(rho - 1.0), abs(norm - 1.0)),
    )
