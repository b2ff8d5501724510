import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sige_srt import exchange
from sige_srt.exchange import ExchangeContext, exchange_rate, spacing_for_rate

GE = ExchangeContext(a_B=64.0, epsilon=16.0)


def test_rate_zero_at_origin():
    assert exchange_rate(0.0, GE) == 0.0


def test_rate_peak_at_five_quarters():
    a = GE.a_B
    r = np.linspace(0.5 * a, 3 * a, 200001)
    rate = exchange_rate(r, GE)
    assert r[np.argmax(rate)] == pytest.approx(1.25 * a, rel=1e-4)
    h = 1e-3 * a
    left = exchange_rate(1.25 * a, GE) - exchange_rate(1.25 * a - h, GE)
    right = exchange_rate(1.25 * a + h, GE) - exchange_rate(1.25 * a, GE)
    assert left > 0 > right


def test_prefactor_value():
    # 1.6 * q^2/(4 pi eps0 eps a) = 1.6 * 14399.6/(16*64) meV
    assert GE.coulomb_hz == pytest.approx(14399.6 / 1024 * 2.41799e11, rel=1e-5)


def fitted_slope(lo, hi, ctx=GE):
    r = np.linspace(lo * ctx.a_B, hi * ctx.a_B, 201)
    return np.polyfit(r, exchange.log_exchange_rate(r, ctx), 1)[0]


def test_log_rate_matches_rate():
    r = np.linspace(80, 3000, 50)
    np.testing.assert_allclose(exchange.log_exchange_rate(r, GE), np.log(exchange_rate(r, GE)), rtol=1e-12)


def test_tail_slope_far_tail():
    assert fitted_slope(100, 300) == pytest.approx(-2 / GE.a_B, rel=0.02)


def test_tail_slope_mid_range_offset_is_the_power_law():
    # over 10-30 radii the (r/a)^(5/2) factor adds ~2.5/r to the slope
    a = GE.a_B
    r = np.linspace(10 * a, 30 * a, 201)
    raw = np.polyfit(r, exchange.log_exchange_rate(r, GE), 1)[0]
    stripped = np.polyfit(r, exchange.log_exchange_rate(r, GE) - 2.5 * np.log(r / a), 1)[0]
    assert stripped == pytest.approx(-2 / a, rel=1e-10)
    assert raw - stripped == pytest.approx(np.polyfit(r, 2.5 * np.log(r), 1)[0], rel=1e-8)
    assert raw == pytest.approx(-2 / a, rel=0.07)


def test_strictly_decreasing_branch():
    r = np.linspace(1.2501, 60, 5000) * GE.a_B
    assert np.all(np.diff(exchange_rate(r, GE)) < 0)


@settings(max_examples=200)
@given(st.floats(1.26, 200.0), st.floats(5.0, 200.0), st.floats(4.0, 20.0))
def test_round_trip(x, a, eps):
    ctx = ExchangeContext(a, eps)
    target = exchange_rate(x * a, ctx)
    if target < 1e-300:
        return
    r = spacing_for_rate(target, ctx)
    assert exchange_rate(r, ctx) == pytest.approx(target, rel=1e-8)
    assert r == pytest.approx(x * a, rel=1e-8)


def test_larger_target_smaller_spacing():
    targets = np.logspace(-3, 11, 40)
    r = [spacing_for_rate(t, GE) for t in targets]
    assert np.all(np.diff(r) < 0)


def test_unreachable_target():
    with pytest.raises(ValueError, match="exceeds"):
        spacing_for_rate(1e13, GE)
    with pytest.raises(ValueError):
        spacing_for_rate(0.0, GE)


def brute_force_spacing(target, ctx):
    # dense scan of the decreasing branch, independent of the bisection
    r = np.linspace(1.25 * ctx.a_B, 40 * ctx.a_B, 2_000_001)
    rate = exchange_rate(r, ctx)
    return r[np.argmin(np.abs(np.log(rate) - np.log(target)))]


def test_ge_kilohertz_spacing():
    r = spacing_for_rate(1e3, GE)
    assert r == pytest.approx(brute_force_spacing(1e3, GE), abs=1e-3)
    assert r == pytest.approx(931.59, abs=0.01)
    # the quoted 2000 A / 29 radii off-state spacing is far beyond this root
    assert r / exchange.PUBLISHED_SPACING_A == pytest.approx(0.466, abs=1e-3)
    assert exchange_rate(29 * GE.a_B, GE) < 1e-8


@given(st.floats(0.1, 100.0), st.floats(1.5, 20.0))
def test_length_scaling(lam, x):
    r = x * GE.a_B
    scaled = ExchangeContext(lam * GE.a_B, GE.epsilon)
    assert exchange_rate(lam * r, scaled) == pytest.approx(exchange_rate(r, GE) / lam, rel=1e-10)


def test_on_off_ratio():
    assert exchange.on_off_ratio(500.0, GE, GE) == 1.0
    on = ExchangeContext(128.0, 16.0)
    r = 29 * GE.a_B
    assert exchange.on_off_ratio(r, GE, on) > 1e6
    # prefactor halves, (r/a)^2.5 drops by 2^2.5, exponent gains 29
    expected = 0.5 * 2**-2.5 * np.exp(29.0)
    assert exchange.on_off_ratio(r, GE, on) == pytest.approx(expected, rel=1e-9)
    with pytest.raises(ValueError):
        exchange.on_off_ratio(r, on, GE)
    with pytest.raises(ValueError):
        exchange.on_off_ratio(0.0, GE, on)


def test_on_off_ratio_monotone_in_on_radius():
    r = 20 * GE.a_B
    radii = np.linspace(64, 300, 60)
    ratios = [exchange.on_off_ratio(r, GE, ExchangeContext(a, 16.0)) for a in radii]
    assert np.all(np.diff(ratios) > 0)


def test_fault_tolerance_budget():
    rep = exchange.fault_tolerance_budget(GE)
    assert rep.ratio == pytest.approx(1e-6)
    assert rep.passed
    nuclear = exchange.fault_tolerance_budget(ExchangeContext(64, 16, clock_rate=75e3))
    assert nuclear.ratio == pytest.approx(1.33e-2, rel=1e-2)
    assert not nuclear.passed
    assert exchange.fault_tolerance_budget(ExchangeContext(64, 16, t2_linewidth=0.0)).passed


def test_context_validation():
    with pytest.raises(ValueError):
        ExchangeContext(0.0, 16.0)
    with pytest.raises(ValueError):
        ExchangeContext(64.0, 16.0, clock_rate=0)


def test_sweep_csv():
    text = exchange.sweep_csv([64.0, 80.0, 96.0], GE)
    assert text.splitlines()[0] == "r_A,fourJ_over_h_Hz"
    assert len(text.splitlines()) == 4
