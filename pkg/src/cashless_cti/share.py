"""Cashless-share growth curves.

The share p is handled through its log-odds transform y = ln(1/p - 1).  Two
fitted regimes exist: y linear in time (constant growth rate) and y
quadratic in time (growth rate linear in time).  The trial function

    y(t) = (alpha*t + beta) * (gamma - tanh(t/T))

joins them: quadratic for t << T and linear for t >> T.  Time is measured
in years from the start of cashless activity in a country.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import DomainError

EXTREMUM_SEARCH_SPAN = 10.0  # in units of T
EXTREMUM_TOL = 1e-10


@dataclass(frozen=True)
class ShareCurveParams:
    alpha: float
    beta: float
    gamma: float
    T_years: float = 50.0
    delta_t0_years: float = 0.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise DomainError(f"alpha must be positive, got {self.alpha!r}")
        if not self.beta > 0:
            raise DomainError(f"beta must be positive, got {self.beta!r}")
        if not 0 < self.gamma < 1:
            raise DomainError(f"gamma must be in (0,1), got {self.gamma!r}")
        if not self.T_years > 0:
            raise DomainError(f"T_years must be positive, got {self.T_years!r}")
        if not self.delta_t0_years >= 0:
            raise DomainError(f"delta_t0_years must be >= 0, got {self.delta_t0_years!r}")


@dataclass(frozen=True)
class LinearFit:
    """y = -a2*t + mu1, with t in years after ``t_origin``."""

    a2: float
    mu1: float
    r_squared: float = 1.0
    t_origin: float = 0.0

    variant = "linear"

    @property
    def h1(self):
        return -self.a2

    @property
    def h2(self):
        return self.mu1

    def shifted_intercept(self, delta_t0):
        return self.mu1 - self.a2 * delta_t0

    def polynomial(self):
        """Coefficients in increasing powers of t."""
        return (self.mu1, -self.a2)


@dataclass(frozen=True)
class QuadraticFit:
    """y = -b/2*t**2 - a20*t + mu2, with t in years after ``t_origin``."""

    b: float
    a20: float
    mu2: float
    r_squared: float = 1.0
    t_origin: float = 0.0

    variant = "quadratic"

    @property
    def k1(self):
        return -self.b / 2.0

    @property
    def k2(self):
        return -self.a20

    @property
    def k3(self):
        return self.mu2

    def polynomial(self):
        return (self.mu2, -self.a20, -self.b / 2.0)


LogisticFit = Union[LinearFit, QuadraticFit]


def log_odds(p: float) -> float:
    if not 0.0 < p < 1.0:
        raise DomainError(f"log-odds transform needs 0 < p < 1, got {p!r}")
    return math.log(1.0 / p - 1.0)


def share_from_log_odds(y: float) -> float:
    # split on sign so exp never overflows
    if y >= 0:
        e = math.exp(-y)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(y))


def eval_fit(fit: LogisticFit, t: float) -> float:
    if isinstance(fit, LinearFit):
        return -fit.a2 * t + fit.mu1
    return -0.5 * fit.b * t * t - fit.a20 * t + fit.mu2


def y_trial(t: float, params: ShareCurveParams) -> float:
    return (params.alpha * t + params.beta) * (params.gamma - math.tanh(t / params.T_years))


def share_at(t: float, params: ShareCurveParams) -> float:
    return share_from_log_odds(y_trial(t, params))


def _sech2(x):
    c = math.cosh(x)
    return 0.0 if math.isinf(c) else 1.0 / (c * c)


def slope_a2(t: float, params: ShareCurveParams) -> float:
    """Growth rate a2(t) = -dy/dt of the trial function (1/year)."""
    a, b, g, T = params.alpha, params.beta, params.gamma, params.T_years
    return -a * (g - math.tanh(t / T)) + (a * t + b) * _sech2(t / T) / T


def y_extremum_time(params: ShareCurveParams) -> Optional[float]:
    """Time of the maximum of y, where the share growth rate turns positive.

    An extremum exists only when a2 starts negative.  Returns None otherwise.
    """
    if not slope_a2(0.0, params) < -EXTREMUM_TOL:
        return None
    T = params.T_years
    # a2 is monotone near its first zero for all realistic parameters; march
    # out to find a sign change, then bisect
    step = T / 1000.0
    lo = 0.0
    hi = step
    t_max = EXTREMUM_SEARCH_SPAN * T
    while slope_a2(hi, params) < 0:
        lo = hi
        hi += step
        if hi > t_max:
            return None
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        v = slope_a2(mid, params)
        if abs(v) < EXTREMUM_TOL:
            return mid
        if v < 0:
            lo = mid
        else:
            hi = mid
    return lo if abs(slope_a2(lo, params)) <= abs(slope_a2(hi, params)) else hi


def half_share_time(params_or_gamma, T_years: float | None = None) -> float:
    """Time at which p = 1/2, i.e. T*atanh(gamma).

    Accepts either a ShareCurveParams or ``(gamma, T_years)``.
    """
    if isinstance(params_or_gamma, ShareCurveParams):
        gamma, T = params_or_gamma.gamma, params_or_gamma.T_years
    else:
        gamma, T = params_or_gamma, T_years
        if T is None:
            raise TypeError("T_years is required when gamma is given directly")
    # gamma = 0 is allowed here: it is the boundary of the valid range
    if not 0.0 <= gamma < 1.0:
        raise DomainError(f"gamma must be in (0,1), got {gamma!r}")
    return T * math.atanh(gamma)


def asymptote_linear(params: ShareCurveParams, t: float) -> float:
    """Large-time form (gamma - 1)(alpha*t + beta)."""
    return (params.gamma - 1.0) * (params.alpha * t + params.beta)


def asymptote_quadratic(params: ShareCurveParams, t: float) -> float:
    """Small-time form from tanh(x) ~ x."""
    a, b, g, T = params.alpha, params.beta, params.gamma, params.T_years
    return -(a / T) * t * t + (a * g - b / T) * t + b * g


def modulation_factor(t: float, params: ShareCurveParams) -> float:
    return (params.gamma - math.tanh(t / params.T_years)) / (params.gamma - 1.0)


def quadratic_coefficients(params: ShareCurveParams):
    """Forward map (alpha, beta, gamma) -> (b, a20, mu2) of the small-time form."""
    a, b, g, T = params.alpha, params.beta, params.gamma, params.T_years
    return 2.0 * a / T, b / T - a * g, b * g


def linear_coefficients(params: ShareCurveParams):
    """Forward map (alpha, beta, gamma) -> (a2, mu1') of the large-time form."""
    return (1.0 - params.gamma) * params.alpha, (params.gamma - 1.0) * params.beta


def match_from_quadratic(b: float, a20: float, mu2: float, T: float = 50.0):
    """Recover (alpha, beta, gamma) from quadratic fit coefficients.

    alpha = b*T/2; beta is the positive root of beta**2/T - a20*beta - alpha*mu2;
    gamma = mu2/beta.
    """
    if not (b > 0 and T > 0 and mu2 > 0):
        raise DomainError("quadratic matching needs b > 0, T > 0 and mu2 > 0")
    alpha = b * T / 2.0
    disc = a20 * a20 + 4.0 * alpha * mu2 / T
    root = math.sqrt(disc)
    if a20 >= 0:
        beta = T * (a20 + root) / 2.0
    else:
        # product of roots is -alpha*mu2*T; avoids cancellation
        beta = 2.0 * alpha * mu2 / (root - a20)
    if not beta > 0:
        raise DomainError("no positive beta root")
    return alpha, beta, mu2 / beta


def match_from_linear(a2: float, mu1_shifted: float, gamma_assumed: float, T: float = 50.0):
    """Recover (alpha, beta) from a linear fit with gamma chosen freely."""
    if not 0.0 <= gamma_assumed < 1.0:
        raise DomainError(f"gamma must be in (0,1), got {gamma_assumed!r}")
    if not a2 > 0:
        raise DomainError(f"a2 must be positive for alpha > 0, got {a2!r}")
    if not mu1_shifted < 0:
        raise DomainError(f"shifted intercept must be negative for beta > 0, got {mu1_shifted!r}")
    return a2 / (1.0 - gamma_assumed), mu1_shifted / (gamma_assumed - 1.0)
