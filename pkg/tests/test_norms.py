import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexlp import SampledFunction, build_exponent, exponent_from_samples, luxemburg_norm, make_grid, modular
from vexlp.corpus import clipped_power_law, indicator
from vexlp.norms import ModularOverflowError, unit_ball_check
from vexlp.operators import shift_cells

TOL = 1e-10


def const(grid, p):
    return build_exponent("constant", {"p0": p}, grid)


def test_modular_zero(grid1, bump):
    assert modular(SampledFunction(grid1, np.zeros(512)), bump) == 0.0


def test_modular_zero_power_convention(grid1):
    # 0^p = 0 even where p is small.
    f = indicator(grid1, 0.0, 1.0)
    p = exponent_from_samples(np.full(512, 0.1), grid1)
    assert modular(f, p) == pytest.approx(1.0)


def test_modular_indicator_any_p(grid1, bump):
    f = indicator(grid1, -1.0, 1.0)
    assert abs(modular(f, bump) - 2.0) <= grid1.spacing


@pytest.mark.parametrize("N,oracle", [(512, 1.80963301402797), (4096, 1.93448411754709)])
def test_modular_power_law(N, oracle):
    # sqrt(Delta) * (zeta(1/2) - zeta(1/2, 1/Delta)), from mpmath.
    g = make_grid(1, 4.0, N)
    f = clipped_power_law(g, alpha=0.25)
    rho = modular(f, const(g, 2.0))
    assert rho == pytest.approx(oracle, rel=1e-12)
    assert abs(rho - 2.0) < 2.0 * math.sqrt(g.spacing) + g.spacing


def test_modular_overflow():
    g = make_grid(1, 1.0, 8)
    f = SampledFunction(g, np.full(8, 1e10))
    with pytest.raises(ModularOverflowError):
        modular(f, const(g, 40.0))


def test_norm_zero(grid1, bump):
    res = luxemburg_norm(SampledFunction(grid1, np.zeros(512)), bump)
    assert res.value == 0.0


def test_norm_indicator_p2(grid1):
    f = indicator(grid1, 0.0, 1.0)
    assert luxemburg_norm(f, const(grid1, 2.0), TOL).value == pytest.approx(1.0, abs=TOL)


@pytest.mark.parametrize("p", [1.0, 1.5, 2.0, 4.0, 7.0])
def test_norm_constant_closed_form(grid1, p):
    f = grid1.sample(lambda x: np.exp(-x * x) * (1 + np.sin(3 * x)))
    closed = (grid1.spacing * np.sum(np.abs(f.values) ** p)) ** (1 / p)
    assert luxemburg_norm(f, const(grid1, p), TOL).value == pytest.approx(closed, rel=1e-9)


def test_norm_piecewise_exponent():
    # p = 2 on [0, 1/2), 4 on [1/2, 1), f = 2 chi: t/2 + t^2/2 = 1 with t = (2/mu)^2.
    g = make_grid(1, 4.0, 512)
    x = g.axis()
    p = exponent_from_samples(np.where(x < 0.5, 2.0, 4.0), g)
    f = indicator(g, 0.0, 1.0) * 2.0
    res = luxemburg_norm(f, p, TOL)
    assert res.value == pytest.approx(2.0, abs=2 * TOL)
    assert res.modular_at_value <= 1.0


def test_norm_bad_tol(grid1, bump):
    with pytest.raises(ValueError):
        luxemburg_norm(indicator(grid1, 0, 1), bump, tol=1e-2)


@pytest.mark.parametrize("lam", [0.1, 3.0, 17.0, -2.0])
def test_homogeneity(grid1, bump, lam):
    f = grid1.sample(lambda x: np.exp(-x * x))
    a = luxemburg_norm(f, bump, TOL).value
    b = luxemburg_norm(f * lam, bump, TOL).value
    assert abs(b - abs(lam) * a) <= 2 * TOL * abs(lam) * a


def test_quasi_norm_homogeneity(grid1):
    p = exponent_from_samples(0.5 + 0.5 * np.exp(-grid1.axis() ** 2), grid1)
    assert p.p_minus == pytest.approx(0.5, abs=1e-6)
    f = grid1.sample(lambda x: 1.0 / (1 + x * x))
    a = luxemburg_norm(f, p, TOL).value
    for lam in (0.1, 3.0, 17.0):
        assert abs(luxemburg_norm(f * lam, p, TOL).value - lam * a) <= 2 * TOL * lam * a


def test_monotone_in_abs(grid1, bump):
    f = grid1.sample(lambda x: np.exp(-x * x))
    g = grid1.sample(lambda x: np.exp(-x * x) + 0.1 * np.exp(-((x - 1) ** 2)))
    assert luxemburg_norm(f, bump).value <= luxemburg_norm(g, bump).value


def test_unit_ball_boundary(grid1):
    # rho(f) = 1 exactly: f = 1 on a set of measure 1.
    f = indicator(grid1, -0.5, 0.5)
    p = build_exponent("smooth_bump", {"p0": 2.0, "amplitude": 1.0, "width": 1.0}, grid1)
    assert modular(f, p) == pytest.approx(1.0, abs=1e-12)
    rep = unit_ball_check(f, p)
    assert rep.agree
    assert rep.norm == pytest.approx(1.0, abs=TOL)


def test_unit_ball_half(grid1, bump):
    f = grid1.sample(lambda x: np.exp(-x * x))
    lo, hi = 1e-6, 1e6
    for _ in range(200):
        mid = math.sqrt(lo * hi)
        lo, hi = (mid, hi) if modular(f * mid, bump) < 0.5 else (lo, mid)
    g = f * lo
    assert modular(g, bump) == pytest.approx(0.5, rel=1e-9)
    rep = unit_ball_check(g, bump)
    assert rep.agree and rep.norm <= 1.0


def test_translation_invariance_with_shifted_exponent(grid1, bump):
    # Shifting f and p together permutes the samples of |f|^p.
    f = grid1.sample(lambda x: np.exp(-((x - 0.3) ** 2)) * (2 + np.cos(5 * x)))
    k = (37,)
    fs = SampledFunction(grid1, shift_cells(f.values, k))
    ps = exponent_from_samples(shift_cells(bump.values, k), grid1)
    a = luxemburg_norm(f, bump, TOL).value
    b = luxemburg_norm(fs, ps, TOL).value
    assert b == pytest.approx(a, rel=2 * TOL)


def test_norm_2d():
    g = make_grid(2, 2.0, 32)
    f = indicator(g, (0, 0), (1, 1))
    assert luxemburg_norm(f, const(g, 3.0), TOL).value == pytest.approx(1.0, abs=TOL)


@settings(max_examples=40, deadline=None)
@given(
    st.integers(0, 2**31 - 1),
    st.floats(0.5, 8.0),
    st.floats(0.0, 4.0),
    st.floats(0.01, 100.0),
)
def test_property_unit_ball_and_homogeneity(seed, p0, amp, scale):
    g = make_grid(1, 2.0, 64)
    rng = np.random.default_rng(seed)
    f = SampledFunction(g, scale * rng.standard_normal(64))
    p = exponent_from_samples(p0 + amp * rng.random(64), g)
    assert unit_ball_check(f, p).agree
    n1 = luxemburg_norm(f, p, TOL).value
    n2 = luxemburg_norm(f * 3.0, p, TOL).value
    assert abs(n2 - 3 * n1) <= 2 * TOL * 3 * n1
    res = luxemburg_norm(f, p, TOL)
    assert res.modular_at_value <= 1.0
    assert res.bracket[1] - res.bracket[0] <= TOL * res.value
