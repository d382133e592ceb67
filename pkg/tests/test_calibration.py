import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cashless_cti.calibration import (
    CurveWidth,
    calibrate_country,
    curve_width,
    delta_t0,
    fit_transform,
    ols,
    raw_delta_t0,
    select_model,
)
from cashless_cti.dataio import CountrySeries
from cashless_cti.errors import DomainError, InsufficientDataError, NoRealRootError
from cashless_cti.reference import COUNTRY_PARAMS, QUADRATIC_CLASS
from cashless_cti.share import (
    LinearFit,
    QuadraticFit,
    eval_fit,
    quadratic_coefficients,
    share_at,
    share_from_log_odds,
)

LN2 = math.log(2.0)


def series_from_y(ys, start=2000, name="X"):
    return CountrySeries(name, tuple((start + k, share_from_log_odds(y)) for k, y in enumerate(ys)))


def test_exact_linear_recovery():
    s = series_from_y([-0.1 * t + 1.0 for t in range(21)])
    fit = fit_transform(s, "linear")
    assert isinstance(fit, LinearFit)
    assert fit.a2 == pytest.approx(0.1, rel=1e-12)
    assert fit.mu1 == pytest.approx(1.0, rel=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)
    assert fit.t_origin == 2000


def test_exact_quadratic_recovery():
    s = series_from_y([-0.0032 * t * t - 0.00644 * t + 1.388706 for t in range(21)])
    fit = fit_transform(s, "quadratic")
    assert isinstance(fit, QuadraticFit)
    assert (fit.b, fit.a20, fit.mu2) == pytest.approx((0.0064, 0.00644, 1.388706), rel=1e-9)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_noisy_recovery_within_three_standard_errors():
    sigma = 0.05
    t = np.arange(21.0)
    X = np.column_stack([np.ones_like(t), t])
    # known noise level -> exact normal sampling distribution
    se = sigma * np.sqrt(np.diag(np.linalg.inv(X.T @ X)))
    inside = 0
    checks = 0
    for seed in range(100):
        rng = np.random.default_rng(seed)
        y = -0.1 * t + 1.0 + rng.normal(0, sigma, t.size)
        fit = fit_transform(series_from_y(y), "linear")
        inside += abs(fit.mu1 - 1.0) <= 3 * se[0]
        inside += abs(fit.a2 - 0.1) <= 3 * se[1]
        checks += 2
    # P(|z| > 3) = 0.27%, so a handful of misses out of 200 is the most we expect
    assert inside / checks >= 0.98


def test_fit_errors():
    s = series_from_y([0.1, 0.0, -0.1])
    with pytest.raises(InsufficientDataError):
        fit_transform(s, "quadratic")
    with pytest.raises(InsufficientDataError):
        fit_transform(series_from_y([0.1, 0.0]), "linear")
    with pytest.raises(ValueError):
        fit_transform(s, "cubic")


def test_residuals_orthogonal_to_design():
    rng = np.random.default_rng(7)
    t = np.arange(15.0)
    y = 0.5 - 0.08 * t + 0.002 * t ** 2 + rng.normal(0, 0.1, t.size)
    for degree in (1, 2):
        _, resid, X = ols(t, y, degree)
        assert np.all(np.abs(X.T @ resid) < 1e-9)


shares_strategy = st.lists(st.floats(0.01, 0.99), min_size=5, max_size=25)


@settings(max_examples=100, deadline=None)
@given(shares_strategy)
def test_nested_models(shares):
    s = CountrySeries("X", tuple((2000 + k, p) for k, p in enumerate(shares)))
    lin = fit_transform(s, "linear")
    quad = fit_transform(s, "quadratic")
    assert quad.r_squared >= lin.r_squared - 1e-12
    assert 0.0 <= lin.r_squared <= 1.0
    assert 0.0 <= quad.r_squared <= 1.0


def test_select_model():
    assert select_model(LinearFit(0.1, 1, 0.99), QuadraticFit(0.01, 0.1, 1, 0.95)) == "linear"
    assert select_model(LinearFit(0.1, 1, 0.90), QuadraticFit(0.01, 0.1, 1, 0.99)) == "quadratic"
    assert select_model(LinearFit(0.1, 1, 0.97), QuadraticFit(0.01, 0.1, 1, 0.97)) == "linear"
    assert select_model(LinearFit(0.1, 1, 0.97), QuadraticFit(0.01, 0.1, 1, 0.97 + 1e-10)) == "linear"
    assert select_model(LinearFit(0.1, 1, 0.97), None) == "linear"


def test_width_linear():
    w = curve_width(LinearFit(0.1, 1.0), 4.0)
    assert w.t1_years == pytest.approx(10.0, rel=1e-12)
    assert w.t2_years == pytest.approx(10.0 + 10 * LN2, rel=1e-12)
    assert w.tau_years == pytest.approx(20 * LN2, rel=1e-12)
    assert w.t_half_years == w.t1_years


def test_width_quadratic_hungary_shape():
    fit = QuadraticFit(0.0064, 0.00644, 1.388706)
    w = curve_width(fit, 4.0)
    # mpmath quadratic formula, decreasing-branch roots
    assert w.t1_years == pytest.approx(13.77125554516956, rel=1e-10)
    assert w.t2_years == pytest.approx(19.85, rel=1e-10)
    assert w.tau_years == pytest.approx(12.15748890966088, rel=1e-9)
    assert w.t_half_years == w.t2_years


@pytest.mark.parametrize(
    "fit",
    [
        LinearFit(0.1, 1.0),
        LinearFit(0.05, -0.4),
        QuadraticFit(0.0064, 0.00644, 1.388706),
        QuadraticFit(0.01, -0.02, 1.0),
    ],
)
def test_width_hits_target_levels(fit):
    w = curve_width(fit, 4.0)
    if isinstance(fit, LinearFit):
        levels = (0.0, math.log(0.5))
    else:
        levels = (LN2, 0.0)
    assert eval_fit(fit, w.t1_years) == pytest.approx(levels[0], abs=1e-9)
    assert eval_fit(fit, w.t2_years) == pytest.approx(levels[1], abs=1e-9)
    assert w.tau_years == pytest.approx(2 * (w.t2_years - w.t1_years))


def test_width_other_z():
    # z = 6: p_c = 0.2, upper level ln(1/(1-0.2) - 1) = ln(0.25)
    w = curve_width(LinearFit(0.1, 1.0), 6.0)
    assert w.t2_years == pytest.approx((1.0 - math.log(0.25)) / 0.1, rel=1e-12)


def test_width_without_real_root():
    # y tops out below ln 2
    with pytest.raises(NoRealRootError):
        curve_width(QuadraticFit(0.01, 0.0, 0.5), 4.0)
    with pytest.raises(NoRealRootError):
        curve_width(LinearFit(-0.1, 1.0), 4.0)


def test_curve_width_invariant():
    with pytest.raises(DomainError):
        CurveWidth(tau_years=-2.0, t_half_years=0.0, t1_years=2.0, t2_years=1.0)


def test_delta_t0_rule():
    w = CurveWidth(20 * LN2, 10.0, 10.0, 10 + 10 * LN2)
    assert delta_t0(w) == pytest.approx(20 * LN2 - 10.0)
    w = CurveWidth(20 * LN2, -2.0, -2.0, -2 + 10 * LN2)
    assert delta_t0(w) == pytest.approx(2.0 + 20 * LN2)


def test_delta_t0_clamped(caplog):
    w = CurveWidth(12.16, 19.85, 13.77, 19.85)
    assert raw_delta_t0(w) < 0
    with caplog.at_level("WARNING"):
        assert delta_t0(w) == 0.0
    assert "clamped" in caplog.text


def test_calibrate_hungary_exact_quadratic():
    b, a20, mu2 = 0.0064, 0.00644, 1.388706
    s = series_from_y([-0.5 * b * t * t - a20 * t + mu2 for t in range(21)], name="Hungary")
    rep = calibrate_country(s)
    assert rep.selected == "quadratic"
    p = rep.params
    assert (p.alpha, p.beta, p.gamma) == pytest.approx((0.160, 3.498, 0.397), abs=1e-6)
    assert (p.T_years, p.delta_t0_years) == (50.0, 0.0)
    assert rep.country == "Hungary"
    assert rep.start_year == 2000


@pytest.mark.parametrize("name", QUADRATIC_CLASS)
def test_pipeline_round_trip_quadratic_rows(name):
    row = COUNTRY_PARAMS[name]
    b, a20, mu2 = quadratic_coefficients(row)
    s = series_from_y([-0.5 * b * t * t - a20 * t + mu2 for t in range(21)], name=name)
    p = calibrate_country(s).params
    assert (p.alpha, p.beta, p.gamma) == pytest.approx((row.alpha, row.beta, row.gamma), abs=1e-6)


def finland_late_series():
    row = COUNTRY_PARAMS["Finland"]
    return CountrySeries("Finland", tuple((2000 + t, share_at(float(t), row)) for t in range(15, 36)))


def test_calibrate_finland_late_linear():
    s = finland_late_series()
    rep = calibrate_country(s, gamma_assumed=0.3, model="linear")
    assert rep.selected == "linear"
    # linear slope over t in [15, 35] from numpy.polyfit on the same samples
    t = np.arange(15, 36.0)
    y = np.log(1 / np.array([share_at(v, COUNTRY_PARAMS["Finland"]) for v in t]) - 1)
    slope = -np.polyfit(t - 15, y, 1)[0]
    assert rep.params.alpha == pytest.approx(slope / 0.7, rel=1e-10)
    assert rep.params.gamma == 0.3
    # the width construction lands close to the published 15-year offset
    assert rep.params.delta_t0_years == pytest.approx(15.0, abs=1.5)


def test_auto_selection_on_curved_data_prefers_quadratic():
    rep = calibrate_country(finland_late_series())
    assert rep.quadratic.r_squared > rep.linear.r_squared
    assert rep.selected == "quadratic"


def test_calibrate_three_points_linear_only():
    s = series_from_y([0.5, 0.3, 0.1])
    rep = calibrate_country(s)
    assert rep.quadratic is None
    assert rep.selected == "linear"
    assert rep.warnings
    with pytest.raises(InsufficientDataError):
        calibrate_country(s, model="quadratic")


def test_calibrate_clamped_offset_leaves_no_positive_beta():
    # line crossing y = 0 at t = 30 with tau ~ 27.7: the raw offset is negative,
    # and with the offset clamped to 0 the intercept stays positive
    s = series_from_y([-0.05 * t + 1.5 for t in range(10)])
    w = curve_width(fit_transform(s, "linear"))
    assert raw_delta_t0(w) < 0
    with pytest.raises(DomainError, match="intercept"):
        calibrate_country(s, model="linear")


def test_calibrate_rejects_bad_inputs():
    s = series_from_y([0.5, 0.3, 0.1, 0.0])
    for kwargs in (dict(gamma_assumed=1.0), dict(gamma_assumed=0.0), dict(T=0.0)):
        with pytest.raises(DomainError):
            calibrate_country(s, **kwargs)
    with pytest.raises(ValueError):
        calibrate_country(s, model="spline")
