import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from vexlp import (
    SampledFunction,
    build_exponent,
    check_plog,
    estimate_clog_decay,
    estimate_clog_local,
    exponent_from_samples,
    make_grid,
)
from vexlp.exponents import FAMILIES


def test_constant_family():
    g = make_grid(1, 4.0, 64)
    p = build_exponent("constant", {"p0": 2.0}, g)
    assert p.p_minus == p.p_plus == p.p_infinity == 2.0
    assert p.is_constant and p.in_class_p


def test_step_family():
    g = make_grid(1, 4.0, 512)
    p = build_exponent("step", {"p_left": 2.0, "p_right": 8.0}, g)
    assert (p.p_minus, p.p_plus) == (2.0, 8.0)
    assert p.p_infinity is None


def test_smooth_bump_range():
    g = make_grid(2, 3.0, 64)
    p = build_exponent("smooth_bump", {"p0": 2.0, "amplitude": 1.0, "width": 1.0}, g)
    assert 2.0 <= p.p_minus and p.p_plus <= 3.0
    assert p.values[g.origin_index] == 3.0


def test_log_borderline_values():
    g = make_grid(1, 1.0, 16)
    p = build_exponent("log_borderline", {"p0": 2.0, "a": 0.5}, g)
    assert p.values[g.origin_index] == 2.0
    assert p.p_infinity == 2.5
    x = g.axis()[0]
    assert p.values[0] == pytest.approx(2.0 + 0.5 / math.log(math.e + 1 / abs(x)))


def test_unknown_family():
    with pytest.raises(ValueError):
        build_exponent("wiggle", {}, make_grid(1, 1.0, 8))
    assert "wiggle" not in FAMILIES


@pytest.mark.parametrize("lo,hi", [(0.05, 2.0), (1.0, 70.0)])
def test_range_guard(lo, hi):
    g = make_grid(1, 1.0, 8)
    with pytest.raises(ValueError):
        exponent_from_samples(np.linspace(lo, hi, 8), g)


def test_quasi_norm_range_allowed():
    g = make_grid(1, 1.0, 8)
    p = exponent_from_samples(np.full(8, 0.5), g)
    assert not p.in_class_p


def test_clog_local_constant():
    g = make_grid(1, 4.0, 1024)
    assert estimate_clog_local(SampledFunction(g, np.full(1024, 3.0))) == 0.0


def test_clog_local_borderline_bracket():
    # Brute force over all pairs of grid(1, 1, 1024) gives exactly a (= 0.5).
    g = make_grid(1, 1.0, 1024)
    p = build_exponent("log_borderline", {"p0": 2.0, "a": 0.5}, g)
    c = estimate_clog_local(p.samples, exhaustive=True)
    assert 0.45 <= c <= 0.6
    assert c == pytest.approx(0.5, rel=1e-12)


def test_clog_local_matches_pairwise_oracle():
    g = make_grid(2, 1.0, 8)
    vals = np.random.default_rng(3).uniform(1, 3, g.shape)
    pts = np.stack([c.ravel() for c in g.coords()], axis=1)
    flat = vals.ravel()
    best = 0.0
    for i in range(len(flat)):
        d = np.linalg.norm(pts[i] - pts, axis=1)
        m = d > 0
        best = max(best, np.max(np.abs(flat[i] - flat[m]) * np.log(np.e + 1 / d[m])))
    assert estimate_clog_local(SampledFunction(g, vals)) == pytest.approx(best, rel=1e-13)


def test_clog_step_detection():
    g = make_grid(1, 4.0, 1024)
    step = SampledFunction(g, np.where(g.axis() < 0, 0.0, 1.0))
    target = math.log(math.e + 1 / g.spacing)
    assert estimate_clog_local(step, exhaustive=True) == pytest.approx(target)
    budgets = [16, 128, 1024, 8192, 65536]
    ests = [estimate_clog_local(step, b, seed=1) for b in budgets]
    assert all(a <= b for a, b in zip(ests, ests[1:]))
    assert ests[-1] >= 0.99 * target


def test_clog_budget_monotone_2d():
    g = make_grid(2, 2.0, 64)
    p = build_exponent("smooth_bump", {"p0": 2.0, "amplitude": 1.0, "width": 0.5}, g)
    ests = [estimate_clog_local(p.samples, b, seed=7) for b in (100, 1000, 10000)]
    assert ests[0] <= ests[1] <= ests[2]
    assert ests[2] <= estimate_clog_local(p.samples, exhaustive=True)


def test_clog_local_scaling():
    g = make_grid(1, 2.0, 128)
    vals = 2.0 + np.sin(g.axis())
    base = estimate_clog_local(SampledFunction(g, vals))
    assert estimate_clog_local(SampledFunction(g, 3.0 * vals)) == pytest.approx(3.0 * base)


def test_clog_decay_constant():
    g = make_grid(1, 4.0, 64)
    assert estimate_clog_decay(SampledFunction(g, np.full(64, 2.0)), 2.0) == 0.0


def test_clog_decay_identity():
    g = make_grid(2, 8.0, 64)
    vals = 2.0 + 1.0 / np.log(np.e + g.radius())
    assert estimate_clog_decay(SampledFunction(g, vals), 2.0) == pytest.approx(1.0, abs=1e-9)


def test_clog_decay_bump_oracle():
    g = make_grid(1, 4.0, 256)
    x = -4.0 + 8.0 / 256 * np.arange(256)
    scan = max(abs(2.0 + math.exp(-t * t) - 2.0) * math.log(math.e + abs(t)) for t in x)
    p = build_exponent("smooth_bump", {"p0": 2.0, "amplitude": 1.0, "width": 1.0}, g)
    c = estimate_clog_decay(p.samples, 2.0)
    assert c > 0 and c == pytest.approx(scan, rel=1e-14)


def test_check_plog_constant():
    rep = check_plog(build_exponent("constant", {"p0": 2.0}, make_grid(1, 4.0, 512)))
    assert rep.is_plog
    assert rep.clog_local_p == rep.clog_local_recip == rep.clog_decay == rep.clog_decay_p == 0.0


def test_check_plog_step():
    rep = check_plog(build_exponent("step", {"p_left": 2.0, "p_right": 8.0}, make_grid(1, 4.0, 512)))
    assert not rep.is_plog
    assert "step" in rep.reason


def test_check_plog_borderline_recip():
    g = make_grid(1, 1.0, 1024)
    rep = check_plog(build_exponent("log_borderline", {"p0": 2.0, "a": 0.5}, g), exhaustive=True)
    assert rep.is_plog
    ref = 0.5 / 4.0
    assert ref / 1.5 <= rep.clog_local_recip <= ref * 1.5


def test_check_plog_threshold():
    g = make_grid(1, 1.0, 64)
    p = build_exponent("smooth_bump", {"p0": 0.5, "amplitude": 20.0, "width": 0.1}, g)
    assert not check_plog(p, threshold=1.0).is_plog
    assert check_plog(p, threshold=1e6).is_plog


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(0.5, 8.0), min_size=16, max_size=16))
def test_clog_bounded_by_range(vals):
    # ln(e + 1/|x-y|) <= ln(e + 1/Delta) bounds any estimate by the oscillation.
    g = make_grid(1, 2.0, 16)
    arr = np.asarray(vals)
    c = estimate_clog_local(SampledFunction(g, arr))
    assert 0.0 <= c <= (arr.max() - arr.min()) * math.log(math.e + 1 / g.spacing) + 1e-12
