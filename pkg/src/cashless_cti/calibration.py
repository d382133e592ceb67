"""Least-squares calibration of share curves from country series."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from .ema import calibration_threshold
from .errors import DomainError, InsufficientDataError, NoRealRootError, SingularDesignError
from .share import (
    LinearFit,
    LogisticFit,
    QuadraticFit,
    ShareCurveParams,
    eval_fit,
    match_from_linear,
    match_from_quadratic,
)

log = logging.getLogger(__name__)

MODELS = ("linear", "quadratic")
R2_TIE = 1e-9
MIN_POINTS = {"linear": 3, "quadratic": 4}


@dataclass(frozen=True)
class CurveWidth:
    tau_years: float
    t_half_years: float
    t1_years: float
    t2_years: float

    def __post_init__(self):
        if not self.t2_years > self.t1_years:
            raise DomainError(
                f"curve width needs t2 > t1, got t1={self.t1_years!r}, t2={self.t2_years!r}"
            )


@dataclass(frozen=True)
class CalibrationReport:
    country: str
    linear: LinearFit
    quadratic: Optional[QuadraticFit]
    selected: str
    params: ShareCurveParams
    width: CurveWidth
    warnings: List[str] = field(default_factory=list)

    @property
    def start_year(self):
        """Calendar year at which model time t = 0 falls."""
        return self.linear.t_origin - self.params.delta_t0_years


def _design(t, degree):
    return np.vander(np.asarray(t, dtype=float), degree + 1, increasing=True)


def ols(t, y, degree):
    """Polynomial least squares; returns (coefficients, residuals, design)."""
    X = _design(t, degree)
    y = np.asarray(y, dtype=float)
    if len(np.unique(X[:, 1])) < degree + 1:
        raise SingularDesignError(
            f"design matrix is singular: need {degree + 1} distinct times"
        )
    coef, _, rank, _ = np.linalg.lstsq(X, y, rcond=None)
    if rank < degree + 1:
        raise SingularDesignError("design matrix is rank deficient")
    return coef, y - X @ coef, X


def r_squared(y, residuals):
    y = np.asarray(y, dtype=float)
    ss_res = float(np.dot(residuals, residuals))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        return 1.0 if ss_res <= 1e-30 else 0.0
    return min(max(1.0 - ss_res / ss_tot, 0.0), 1.0)


def fit_transform(series, model: str) -> LogisticFit:
    """Fit ln(1/p - 1) of a country series with a line or a parabola in time.

    Time is counted in years from the earliest observation.
    """
    if model not in MODELS:
        raise ValueError(f"model must be one of {MODELS}, got {model!r}")
    years = [yr for yr, _ in series.observations]
    shares = [p for _, p in series.observations]
    if len(years) < MIN_POINTS[model]:
        raise InsufficientDataError(
            f"{model} fit needs at least {MIN_POINTS[model]} observations, got {len(years)}"
        )
    for p in shares:
        if not 0.0 < p < 1.0:
            raise DomainError(f"share must be strictly inside (0,1), got {p!r}")
    if len(set(years)) != len(years):
        raise SingularDesignError("duplicate years in series")
    t = np.asarray(years, dtype=float) - series.t_origin
    y = np.log(1.0 / np.asarray(shares, dtype=float) - 1.0)
    degree = 1 if model == "linear" else 2
    coef, resid, _ = ols(t, y, degree)
    r2 = r_squared(y, resid)
    if model == "linear":
        return LinearFit(a2=-float(coef[1]), mu1=float(coef[0]), r_squared=r2, t_origin=series.t_origin)
    return QuadraticFit(
        b=-2.0 * float(coef[2]),
        a20=-float(coef[1]),
        mu2=float(coef[0]),
        r_squared=r2,
        t_origin=series.t_origin,
    )


def select_model(linear: LogisticFit, quadratic: Optional[LogisticFit]) -> str:
    """Pick the fit with the larger R^2; ties go to the linear model."""
    if quadratic is None:
        return "linear"
    if quadratic.r_squared - linear.r_squared > R2_TIE:
        return "quadratic"
    return "linear"


def _solve_level(fit: LogisticFit, level: float) -> float:
    """Time where the fitted transform equals ``level`` on its decreasing branch."""
    if isinstance(fit, LinearFit):
        if fit.a2 == 0:
            raise NoRealRootError("flat linear fit never reaches the target level")
        return (fit.mu1 - level) / fit.a2
    c0, c1, c2 = fit.polynomial()
    c0 = c0 - level
    if c2 == 0:
        if c1 == 0:
            raise NoRealRootError("constant fit never reaches the target level")
        roots = [-c0 / c1]
    else:
        disc = c1 * c1 - 4.0 * c2 * c0
        if disc < 0:
            raise NoRealRootError(
                f"fitted quadratic never attains level {level:.6g}"
            )
        sq = math.sqrt(disc)
        q = -0.5 * (c1 + math.copysign(sq, c1))
        roots = [q / c2, c0 / q] if q != 0 else [-c1 / (2.0 * c2)]
    falling = [r for r in roots if c1 + 2.0 * c2 * r < 0]
    if not falling:
        raise NoRealRootError(
            f"fitted quadratic does not cross level {level:.6g} while decreasing"
        )
    ahead = [r for r in falling if r >= 0]
    return min(ahead) if ahead else max(falling)


def curve_width(fit: LogisticFit, z: float = 4.0) -> CurveWidth:
    """Characteristic width tau of the share curve from a fitted transform.

    Quadratic fits measure from below (p_c up to 1/2); linear fits measure
    from above (1/2 up to 1 - p_c).
    """
    p_c = calibration_threshold(z)
    if isinstance(fit, LinearFit):
        t1 = _solve_level(fit, 0.0)
        t2 = _solve_level(fit, math.log(1.0 / (1.0 - p_c) - 1.0))
        t_half = t1
    else:
        t1 = _solve_level(fit, math.log(1.0 / p_c - 1.0))
        t2 = _solve_level(fit, 0.0)
        t_half = t2
    if not t2 > t1:
        raise NoRealRootError(
            f"fit is not decreasing between the width levels (t1={t1:.6g}, t2={t2:.6g})"
        )
    return CurveWidth(tau_years=2.0 * (t2 - t1), t_half_years=t_half, t1_years=t1, t2_years=t2)


def raw_delta_t0(width: CurveWidth) -> float:
    if width.t_half_years < 0:
        return abs(width.t_half_years) + width.tau_years
    return width.tau_years - width.t_half_years


def delta_t0(width: CurveWidth) -> float:
    """Lead time between the start of cashless activity and the first data year."""
    value = raw_delta_t0(width)
    if value < 0:
        log.warning("start offset %.6g years is negative; clamped to 0", value)
        return 0.0
    return value


def calibrate_country(
    series,
    gamma_assumed: float = 0.3,
    T: float = 50.0,
    model: str = "auto",
    z: float = 4.0,
) -> CalibrationReport:
    if model not in ("auto",) + MODELS:
        raise ValueError(f"model must be auto, linear or quadratic, got {model!r}")
    if not 0.0 < gamma_assumed < 1.0:
        raise DomainError(f"gamma must be in (0,1), got {gamma_assumed!r}")
    if not T > 0:
        raise DomainError(f"T must be positive, got {T!r}")
    notes = []
    linear = fit_transform(series, "linear")
    quadratic = None
    if len(series.observations) >= MIN_POINTS["quadratic"]:
        quadratic = fit_transform(series, "quadratic")
    elif model == "quadratic":
        raise InsufficientDataError("quadratic fit needs at least 4 observations")
    else:
        notes.append("too few observations for a quadratic fit; linear model used")

    selected = select_model(linear, quadratic) if model == "auto" else model

    if selected == "quadratic":
        width = curve_width(quadratic, z)
        alpha, beta, gamma = match_from_quadratic(quadratic.b, quadratic.a20, quadratic.mu2, T)
        if not 0.0 < gamma < 1.0:
            raise DomainError(f"recovered gamma {gamma:.6g} lies outside (0,1)")
        params = ShareCurveParams(alpha, beta, gamma, T, 0.0)
    else:
        width = curve_width(linear, z)
        raw = raw_delta_t0(width)
        if raw < 0:
            notes.append(f"start offset {raw:.6g} years is negative; clamped to 0")
        dt0 = max(raw, 0.0)
        alpha, beta = match_from_linear(linear.a2, linear.shifted_intercept(dt0), gamma_assumed, T)
        params = ShareCurveParams(alpha, beta, gamma_assumed, T, dt0)

    for msg in notes:
        log.warning("%s: %s", series.country, msg)
    return CalibrationReport(
        country=series.country,
        linear=linear,
        quadratic=quadratic,
        selected=selected,
        params=params,
        width=width,
        warnings=notes,
    )


def fitted_values(fit: LogisticFit, years):
    return [eval_fit(fit, yr - fit.t_origin) for yr in years]
