"""Numerical checks of the translation/averaging inequalities.

Every check returns a record carrying the left side, the right-side terms and
their difference (``slack``).  A negative slack is data, never an exception.

Conventions
-----------
* Cubes are axis-aligned unions of cells; ``|Q|`` is the exact discrete
  volume, so ``(1/|Q|) \\int_Q`` is a plain mean over the cube's grid points.
* Offsets ``h`` are whole cells; ``y + h`` wraps periodically.
* ``gamma`` uses ``max(local, decay)`` of the chosen log-Hölder constant.
* ``M = exp((2 + |h|/|Q|) * c_log(p) / p_minus)`` when ``|Q| < min(|h|, 1)``,
  else 1, with ``c_log(p)`` the local constant of ``p``.  ``M`` saturates at
  ``ENVELOPE_CAP``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from vexlp.corpus import clipped_power_law
from vexlp.exponents import ExponentField, LogHolderReport, check_plog
from vexlp.grid import Grid, SampledFunction
from vexlp.norms import luxemburg_norm
from vexlp.operators import convolve, hl_maximal, shift_cells, translate

__all__ = [
    "Cube",
    "Theorem2Problem",
    "Theorem2Config",
    "VerificationRecord",
    "DecompRecord",
    "RejectedConfigError",
    "prepare_problem",
    "theorem2_constants",
    "theorem2_check",
    "theorem2_strengthened_check",
    "appendix_decomposition",
    "translation_ratio",
    "theorem3_envelope",
    "TranslationSweep",
    "sweep_translation_bound",
    "convolution_corollary_check",
    "CounterexampleRow",
    "counterexample_growth",
    "power_law_cell_values",
    "maximal_lp_ratio",
    "ENVELOPE_CAP",
]

ENVELOPE_CAP = 1e300
GAMMA_VARIANTS = ("recip", "p")


class RejectedConfigError(ValueError):
    pass


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cube:
    start: tuple[int, ...]
    side_cells: int

    def __post_init__(self) -> None:
        if self.side_cells < 1:
            raise ValueError("cube side must be at least one cell")

    def volume(self, grid: Grid) -> float:
        return (self.side_cells * grid.spacing) ** grid.dimension

    def contains(self, index: tuple[int, ...], grid: Grid) -> bool:
        n = grid.points_per_axis
        return all((i - s) % n < self.side_cells for i, s in zip(index, self.start))

    def indices(self, grid: Grid) -> tuple[np.ndarray, ...]:
        """Flat index arrays of the cube's grid points (periodic)."""
        n = grid.points_per_axis
        axes = [(s + np.arange(self.side_cells)) % n for s in self.start]
        mesh = np.meshgrid(*axes, indexing="ij")
        return tuple(a.ravel() for a in mesh)


@dataclass(frozen=True, eq=False)
class Theorem2Problem:
    """An exponent and a test function normalised for the averaging estimate.

    ``normalization="sum"`` divides by ``||f||_p + ||f||_inf + tol`` (so
    ``|f| < 1``); ``"lp"`` divides by ``||f||_p + tol`` only, which keeps
    ``f`` in the unit ball of ``L^p + L^inf`` while allowing ``|f| > 1``.
    """

    exponent_id: str
    function_id: str
    p: ExponentField
    f: SampledFunction
    report: LogHolderReport
    normalization: str
    scale: float

    @property
    def grid(self) -> Grid:
        return self.p.grid


def prepare_problem(
    p: ExponentField,
    f: SampledFunction,
    *,
    exponent_id: str = "p",
    function_id: str = "f",
    normalization: str = "sum",
    tol: float = 1e-10,
    report: LogHolderReport | None = None,
) -> Theorem2Problem:
    if report is None:
        report = check_plog(p, exhaustive=p.grid.dimension == 1 or None)
    norm = luxemburg_norm(f, p, tol).value
    if normalization == "sum":
        scale = norm + f.sup_norm() + tol
    elif normalization == "lp":
        scale = norm + tol
    else:
        raise ValueError(f"unknown normalization {normalization!r}")
    fn = f * (1.0 / scale) if scale > tol else f
    return Theorem2Problem(exponent_id, function_id, p, fn, report, normalization, scale)


@dataclass(frozen=True, eq=False)
class Theorem2Config:
    problem: Theorem2Problem
    cube: Cube
    x: tuple[int, ...]
    h: tuple[int, ...]
    m: float
    gamma_variant: str = "recip"

    def __post_init__(self) -> None:
        grid = self.problem.grid
        if not self.cube.contains(self.x, grid):
            raise ValueError(f"x = {self.x} is not in the cube {self.cube}")
        if self.m <= 0:
            raise ValueError("m must be positive")
        if self.gamma_variant not in GAMMA_VARIANTS:
            raise ValueError(f"gamma_variant must be one of {GAMMA_VARIANTS}")

    def echo(self) -> dict:
        grid = self.problem.grid
        return {
            "exponent": self.problem.exponent_id,
            "function": self.problem.function_id,
            "cube_start": " ".join(map(str, self.cube.start)),
            "cube_side": self.cube.side_cells,
            "cube_volume": self.cube.volume(grid),
            "x": " ".join(map(str, self.x)),
            "h": " ".join(map(str, self.h)),
            "m": self.m,
            "gamma_variant": self.gamma_variant,
        }


@dataclass(frozen=True)
class VerificationRecord:
    """One inequality evaluation ``lhs <= rhs_m_term + rhs_decay_term``."""

    lhs: float
    rhs_terms: tuple[float, float]
    slack: float
    config: dict
    flags: tuple[str, ...] = ()
    extra: dict = field(default_factory=dict)

    @property
    def rhs(self) -> float:
        return self.rhs_terms[0] + self.rhs_terms[1]

    @property
    def hypothesis_violated(self) -> bool:
        return "hypothesis-violated" in self.flags


@dataclass(frozen=True)
class _Local:
    """Samples of one configuration restricted to the cube."""

    fy: np.ndarray  # f(y + h), signed
    py: np.ndarray  # p(y + h)
    px: float
    rx: float  # |x|
    ryh: np.ndarray  # |y + h|
    volume: float
    h_norm: float
    p_minus_q: float  # ess-inf of p over Q
    p_minus_qh: float  # ess-inf of p over Q + h


def _localize(cfg: Theorem2Config) -> _Local:
    prob = cfg.problem
    grid = prob.grid
    n = grid.points_per_axis
    idx = cfg.cube.indices(grid)
    idx_h = tuple((a + k) % n for a, k in zip(idx, cfg.h))
    radius = grid.radius()
    pv = prob.p.values
    return _Local(
        fy=np.asarray(prob.f.values[idx_h]),
        py=pv[idx_h],
        px=float(pv[cfg.x]),
        rx=float(radius[cfg.x]),
        ryh=radius[idx_h],
        volume=cfg.cube.volume(grid),
        h_norm=grid.spacing * math.sqrt(sum(k * k for k in cfg.h)),
        p_minus_q=float(pv[idx].min()),
        p_minus_qh=float(pv[idx_h].min()),
    )


def _pow(base: np.ndarray, expo) -> np.ndarray:
    # |base|^expo with 0^p = 0.
    base = np.abs(base)
    out = np.zeros(np.broadcast(base, expo).shape)
    nz = np.broadcast_to(base > 0, out.shape)
    out[nz] = np.broadcast_to(base, out.shape)[nz] ** np.broadcast_to(expo, out.shape)[nz]
    return out


@dataclass(frozen=True)
class Theorem2Constants:
    gamma: float
    M: float
    theta: float
    N: int
    clog_gamma: float
    clog_p: float


def theorem2_constants(cfg: Theorem2Config, *, strengthened: bool = False) -> Theorem2Constants:
    rep = cfg.problem.report
    grid = cfg.problem.grid
    vol = cfg.cube.volume(grid)
    h_norm = grid.spacing * math.sqrt(sum(k * k for k in cfg.h))
    clog_gamma = rep.clog_recip if cfg.gamma_variant == "recip" else rep.clog_p
    clog_p = rep.clog_local_p
    factor = 1.0 if strengthened else 4.0
    gamma = math.exp(-factor * cfg.m * clog_gamma)
    theta = 2.0 + h_norm / vol
    if strengthened or not vol < min(h_norm, 1.0):
        M = 1.0
    else:
        # Saturate like the translation envelope; only non-P^log exponents get here.
        M = math.exp(min(theta * clog_p / cfg.problem.p.p_minus, math.log(ENVELOPE_CAP)))
    N = int(math.floor(h_norm / vol)) + 1 if h_norm > vol else 1
    return Theorem2Constants(gamma, M, theta, N, clog_gamma, clog_p)


def _flags(cfg: Theorem2Config) -> tuple[str, ...]:
    flags = []
    prob = cfg.problem
    if not prob.report.is_plog or not prob.p.in_class_p:
        flags.append("hypothesis-violated")
    return tuple(flags)


def _decay_term(loc: _Local, m: float, theta: float) -> float:
    small = min(1.0, loc.volume ** (m / theta))
    return small * ((math.e + loc.rx) ** -m + float(np.mean((math.e + loc.ryh) ** -m)))


def _averaging_check(cfg: Theorem2Config, strengthened: bool) -> VerificationRecord:
    const = theorem2_constants(cfg, strengthened=strengthened)
    loc = _localize(cfg)
    lhs = (const.gamma * float(np.mean(np.abs(loc.fy)))) ** loc.px
    m_term = const.M * float(np.mean(_pow(loc.fy, loc.py)))
    decay = _decay_term(loc, cfg.m, const.theta)
    echo = cfg.echo()
    echo.update(gamma=const.gamma, M=const.M, theta=const.theta)
    return VerificationRecord(
        lhs=lhs,
        rhs_terms=(m_term, decay),
        slack=m_term + decay - lhs,
        config=echo,
        flags=_flags(cfg),
    )


def theorem2_check(cfg: Theorem2Config) -> VerificationRecord:
    """``(gamma * mean_Q |f(y+h)|)^p(x) <= M mean_Q |f(y+h)|^p(y+h) + decay``.

    ``decay = min(1, |Q|^{m/theta}) ((e+|x|)^-m + mean_Q (e+|y+h|)^-m)``,
    ``gamma = exp(-4 m c_log)``.
    """
    return _averaging_check(cfg, strengthened=False)


def theorem2_strengthened_check(cfg: Theorem2Config) -> VerificationRecord:
    """Same estimate with ``gamma = exp(-m c_log)`` and ``M = 1``."""
    return _averaging_check(cfg, strengthened=True)


# ---------------------------------------------------------------------------
# three-way split of f(y+h)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DecompRecord:
    """Terms of the three-way split and the slack of every link in the chain.

    ``links`` maps a link name to ``rhs - lhs`` of that inequality; a link
    holds when its slack is >= ``-tol * scale``.
    """

    I1: float
    I2: float
    I3: float
    case: int
    N: int
    lhs: float
    convexity_bound: float
    partition_exact: bool
    links: dict
    q_values: np.ndarray
    s_x: float | None
    s_values: np.ndarray | None
    notes: tuple[str, ...] = ()

    def failed_links(self, tol: float = 1e-12) -> list[str]:
        return [k for k, (slack, scale) in self.links.items() if slack < -tol * max(scale, 1.0)]


def _s_values(p: ExponentField, pvals: np.ndarray) -> np.ndarray | None:
    # 1/s = |1/p - 1/p_inf|; s = inf where p equals its limit.
    if p.p_infinity is None:
        return None
    inv = np.abs(1.0 / pvals - 1.0 / p.p_infinity)
    with np.errstate(divide="ignore"):
        return np.where(inv > 0, 1.0 / np.where(inv > 0, inv, 1.0), np.inf)


def appendix_decomposition(cfg: Theorem2Config) -> DecompRecord:
    const = theorem2_constants(cfg)
    loc = _localize(cfg)
    prob = cfg.problem
    gamma, px = const.gamma, loc.px
    f = loc.fy
    absf = np.abs(f)

    m1 = absf > 1.0
    m2 = ~m1 & (loc.py <= px)
    m3 = ~m1 & (loc.py > px)
    zero = np.zeros_like(f)
    f1, f2, f3 = np.where(m1, f, zero), np.where(m2, f, zero), np.where(m3, f, zero)
    disjoint = not np.any((m1 & m2) | (m1 & m3) | (m2 & m3))
    covering = bool(np.all(m1 | m2 | m3))
    partition_exact = disjoint and covering and np.array_equal(f1 + f2 + f3, f)

    I = [(gamma * float(np.mean(np.abs(fi)))) ** px for fi in (f1, f2, f3)]
    lhs = (gamma * float(np.mean(absf))) ** px
    p_plus = prob.p.p_plus
    convexity = 3.0 ** (p_plus - 1.0) * sum(I)

    links: dict[str, tuple[float, float]] = {}

    def link(name: str, small: float, big: float) -> None:
        links[name] = (big - small, max(abs(small), abs(big)))

    link("convexity", lhs, convexity)

    # I1
    A = float(np.mean(_pow(f, loc.py)))
    inv_vol = 1.0 / loc.volume
    if px <= loc.p_minus_qh:
        case = 1
        jensen = gamma**px * float(np.mean(_pow(f1, px)))
        link("I1_jensen", I[0], jensen)
        link("I1_case1", jensen, float(np.mean(_pow(f1, loc.py))))
    else:
        case = 2 if loc.p_minus_qh >= loc.p_minus_q else 3
        low = loc.p_minus_q if case == 2 else loc.p_minus_qh
        expo = px / low - 1.0
        jensen = (gamma * float(np.mean(_pow(f1, low)))) ** (px / low)
        link(f"I1_jensen_case{case}", I[0], jensen)
        if case == 2:
            link("I1_power_case2", jensen, gamma * A * inv_vol**expo)
            bound = max(1.0, math.exp(const.clog_p / prob.p.p_minus))
            link("I1_constant_case2", inv_vol**expo, bound)
        else:
            link("I1_power_case3", jensen, A * inv_vol**expo)
            bound = max(1.0, math.exp((const.N + 2) * const.clog_p / prob.p.p_minus))
            link("I1_telescoping", inv_vol**expo, bound)

    # I2
    j2 = gamma**px * float(np.mean(_pow(f2, px)))
    link("I2_jensen", I[1], j2)
    link("I2_bound", j2, float(np.mean(_pow(f2, loc.py))))

    # I3 and the exponent q
    inv_q = np.maximum(1.0 / px - 1.0 / loc.py, 0.0)
    with np.errstate(divide="ignore"):
        q = np.where(inv_q > 0, 1.0 / np.where(inv_q > 0, inv_q, 1.0), np.inf)
    gamma_q = np.where(np.isfinite(q), gamma ** np.where(np.isfinite(q), q, 0.0), 0.0)
    j3 = float(np.mean(_pow(gamma * f3, px)))
    link("I3_jensen", I[2], j3)
    young_pointwise = np.where(m3, _pow(f, loc.py) + gamma_q, 0.0) - _pow(gamma * f3, px)
    links["I3_young_pointwise"] = (float(young_pointwise.min()), 1.0)
    link("I3_young", j3, float(np.mean(np.where(m3, _pow(f, loc.py) + gamma_q, 0.0))))

    notes = []
    s_x = s_vals = None
    s_all = _s_values(prob.p, np.array([px]))
    if s_all is None:
        notes.append("p_infinity undefined: s-split skipped")
    else:
        s_x = float(s_all[0])
        s_vals = _s_values(prob.p, loc.py)
        with np.errstate(divide="ignore"):
            bound = 1.0 / s_x + 1.0 / s_vals
        links["q_s_split"] = (float(np.min(bound - inv_q)), 1.0)
        small = min(1.0, loc.volume ** (cfg.m / const.theta))
        envelope = small * ((math.e + loc.rx) ** -cfg.m + (math.e + loc.ryh) ** -cfg.m)
        links["gamma_q_envelope"] = (float(np.min(envelope - gamma_q)), 1.0)

    return DecompRecord(
        I1=I[0],
        I2=I[1],
        I3=I[2],
        case=case,
        N=const.N,
        lhs=lhs,
        convexity_bound=convexity,
        partition_exact=bool(partition_exact),
        links=links,
        q_values=q,
        s_x=s_x,
        s_values=s_vals,
        notes=tuple(notes),
    )


# ---------------------------------------------------------------------------
# translation
# ---------------------------------------------------------------------------


def translation_ratio(f: SampledFunction, p: ExponentField, h, tol: float = 1e-10) -> float:
    """``||tau_h f||_p / ||f||_p`` for a cell-aligned ``h``; exponent fixed."""
    base = luxemburg_norm(f, p, tol).value
    if base == 0.0:
        raise ValueError("translation ratio undefined for f = 0")
    if not np.any(np.asarray(h)):
        return 1.0
    return luxemburg_norm(translate(f, h), p, tol).value / base


def theorem3_envelope(v: int, h_norm: float, clog_p: float, n: int = 1) -> float:
    """``exp((2 + 2^{vn} |h|) c_log(p))``, saturated at ``ENVELOPE_CAP``."""
    if v < 0:
        raise ValueError("v must be >= 0")
    expo = (2.0 + 2.0 ** (v * n) * abs(h_norm)) * clog_p
    if expo >= math.log(ENVELOPE_CAP):
        return ENVELOPE_CAP
    return math.exp(expo)


@dataclass(frozen=True)
class TranslationSweep:
    """Per-cell maxima and fitted constants of a translation sweep.

    ``rows`` holds ``(exponent, v, h_cells, h_norm, max_ratio, envelope,
    ratio/envelope)``.  ``fitted_c[e]`` is the max of ``ratio/envelope`` over
    all cells of exponent ``e``; ``stability[e]`` the largest spread (max/min)
    of the per-level and per-offset fitted constants.
    """

    rows: list
    fitted_c: dict
    stability: dict
    clog: dict


def _spread(values: Iterable[float]) -> float:
    vals = list(values)
    return max(vals) / min(vals)


def sweep_translation_bound(
    exponents: Sequence[tuple[str, ExponentField]],
    levels: Sequence[int],
    h_cells: Sequence[int],
    corpus: Callable[[int], list[tuple[str, SampledFunction]]],
    *,
    tol: float = 1e-10,
    reports: dict | None = None,
) -> TranslationSweep:
    """Max ratio ``||tau_h f|| / ||f||`` over a band-limited corpus per ``(v, h)``.

    ``corpus(v)`` returns the functions at level ``v``.  Offsets are along the
    first axis.
    """
    rows = []
    fitted, stability, clogs = {}, {}, {}
    corpora = {v: corpus(v) for v in levels}
    for name, p in exponents:
        grid = p.grid
        rep = (reports or {}).get(name) or check_plog(p, exhaustive=grid.dimension == 1 or None)
        clog = rep.clog_local_p
        clogs[name] = clog
        per_v: dict[int, float] = {}
        per_h: dict[int, float] = {}
        for v in levels:
            funcs = corpora[v]
            base = [luxemburg_norm(f, p, tol).value for _, f in funcs]
            for k in h_cells:
                h = (k,) + (0,) * (grid.dimension - 1)
                h_norm = abs(k) * grid.spacing
                if k == 0:
                    ratio = 1.0
                else:
                    ratio = max(
                        luxemburg_norm(translate(f, np.asarray(h) * grid.spacing), p, tol).value / b
                        for (_, f), b in zip(funcs, base)
                    )
                env = theorem3_envelope(v, h_norm, clog, grid.dimension)
                c = ratio / env
                rows.append((name, v, k, h_norm, ratio, env, c))
                per_v[v] = max(per_v.get(v, 0.0), c)
                per_h[k] = max(per_h.get(k, 0.0), c)
        fitted[name] = max(per_v.values())
        stability[name] = max(_spread(per_v.values()), _spread(per_h.values()))
    return TranslationSweep(rows, fitted, stability, clogs)


def convolution_corollary_check(
    f: SampledFunction,
    g: SampledFunction,
    p: ExponentField,
    v: int,
    *,
    clog_p: float | None = None,
    tol: float = 1e-10,
) -> VerificationRecord:
    """``||f*g||_p <= ||exp((2 + 2^{vn}|.|) c_log(p)) g||_1 ||f||_p`` with ``c = 1``.

    ``extra["fitted_c"]`` is the smallest constant that would make it hold.
    """
    grid = f.grid
    if clog_p is None:
        clog_p = check_plog(p, exhaustive=grid.dimension == 1 or None).clog_local_p
    expo = (2.0 + 2.0 ** (v * grid.dimension) * grid.radius()) * clog_p
    absg = np.abs(g.values)
    support = absg > 0
    if np.any(expo[support] > math.log(ENVELOPE_CAP)):
        raise RejectedConfigError("weighted L1 norm of g overflows")
    weight = grid.cell_volume * float(np.sum(absg[support] * np.exp(expo[support])))
    lhs = luxemburg_norm(convolve(f, g), p, tol).value
    norm_f = luxemburg_norm(f, p, tol).value
    rhs = weight * norm_f
    return VerificationRecord(
        lhs=lhs,
        rhs_terms=(rhs, 0.0),
        slack=rhs - lhs,
        config={"v": v, "clog_p": clog_p, "weighted_l1": weight},
        extra={"fitted_c": lhs / rhs if rhs > 0 else 0.0, "norm_f": norm_f},
    )


# ---------------------------------------------------------------------------
# non-constant exponent counterexample
# ---------------------------------------------------------------------------


def _clipped_power_integral(a: np.ndarray, b: np.ndarray, alpha: float, k: float, p: np.ndarray) -> np.ndarray:
    """``\\int_a^b min(t^-alpha, k)^p dt`` for ``0 <= a <= b`` (elementwise).

    An unclipped tail reaching 0 is finite only when ``alpha * p < 1``;
    otherwise the result is ``inf``.
    """
    c = k ** (-1.0 / alpha)  # clip point: t^-alpha = k
    width = np.clip(np.minimum(b, c) - np.minimum(a, c), 0.0, None)
    # An infinite clip has no flat part (c = 0); avoid inf * 0.
    flat = np.zeros_like(width)
    nz = width > 0
    flat[nz] = k ** p[nz] * width[nz]
    lo = np.maximum(a, c)
    has_tail = b > lo
    e = 1.0 - alpha * p
    out = flat.copy()
    lo_t, b_t, e_t = lo[has_tail], b[has_tail], e[has_tail]
    at_zero = lo_t == 0.0
    power = np.empty_like(b_t)
    # From 0 the antiderivative is b^e / e.
    power[at_zero] = np.where(e_t[at_zero] > 0, b_t[at_zero] ** e_t[at_zero] / np.abs(e_t[at_zero]), np.inf)
    pos = ~at_zero
    lo_p, b_p, e_p = lo_t[pos], b_t[pos], e_t[pos]
    log_ratio = np.log1p((b_p - lo_p) / lo_p)
    # b^e - lo^e = lo^e * expm1(e log(b/lo)), divided by e (log for e = 0).
    small = np.abs(e_p) <= 1e-12
    safe_e = np.where(small, 1.0, e_p)
    power[pos] = np.where(small, log_ratio, lo_p**e_p * np.expm1(e_p * log_ratio) / safe_e)
    out[has_tail] += power
    return out


def power_law_cell_values(
    grid: Grid, p: ExponentField, clip: float, shift_cells_: int = 0, alpha: float = 0.25, support: float = 1.0
) -> SampledFunction:
    """Cell values ``F_j`` of ``tau_h min(t^-alpha, clip) chi_(0,support)``
    with ``dx * F_j^{p_j}`` equal to the exact integral of ``|f|^{p_j}`` over
    cell ``j``.

    With ``p`` constant on each cell this makes the grid modular the exact
    continuum modular.  One-dimensional grids only.
    """
    if grid.dimension != 1:
        raise ValueError("cell-exact power law is one-dimensional")
    L, dx = grid.half_width, grid.spacing
    left = grid.axis() + shift_cells_ * dx
    left = (left + L) % (2 * L) - L
    a = np.clip(left, 0.0, support)
    b = np.clip(left + dx, 0.0, support)
    pv = p.values
    integral = np.zeros(grid.shape)
    live = b > a
    integral[live] = _clipped_power_integral(a[live], b[live], alpha, clip, pv[live])
    return SampledFunction(grid, (integral / dx) ** (1.0 / pv))


@dataclass(frozen=True)
class CounterexampleRow:
    k: float
    norm_f: float
    norm_shifted: float
    ratio: float
    flagged: bool


def counterexample_growth(
    p: ExponentField,
    h: float,
    clip_levels: Sequence[float],
    *,
    quadrature: str = "cell",
    alpha: float = 0.25,
    tol: float = 1e-10,
) -> list[CounterexampleRow]:
    """Ratios ``||tau_h f_k|| / ||f_k||`` for ``f_k = min(x^-alpha, k) chi_(0,1)``.

    ``quadrature="cell"`` integrates ``|f_k|^p`` exactly over each cell, so any
    clip level is resolved.  ``quadrature="sample"`` uses point samples and
    flags clip levels above the largest sample ``dx^-alpha``.
    """
    grid = p.grid
    k_cells = grid.cells(h)[0]
    resolved = grid.spacing**-alpha
    rows = []
    for k in clip_levels:
        if quadrature == "cell":
            f = power_law_cell_values(grid, p, k, 0, alpha)
            fh = power_law_cell_values(grid, p, k, k_cells, alpha)
            flagged = False
        elif quadrature == "sample":
            f = clipped_power_law(grid, alpha, k)
            fh = SampledFunction(grid, shift_cells(f.values, (k_cells,)))
            flagged = k > resolved
        else:
            raise ValueError(f"unknown quadrature {quadrature!r}")
        nf = luxemburg_norm(f, p, tol).value
        nh = luxemburg_norm(fh, p, tol).value
        rows.append(CounterexampleRow(float(k), nf, nh, nh / nf, flagged))
    return rows


def maximal_lp_ratio(f: SampledFunction, p: ExponentField, tol: float = 1e-10) -> float:
    """``||M f||_p / ||f||_p`` for the discrete maximal operator."""
    return luxemburg_norm(hl_maximal(f), p, tol).value / luxemburg_norm(f, p, tol).value
