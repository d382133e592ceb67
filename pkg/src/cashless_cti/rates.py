"""Time derivatives of the effective conductivity and of the CTI."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, List

from .ema import DEFAULT_CONFIG, EmaConfig, discriminant, linear_coefficient, solve_two_phase
from .errors import DomainError
from .share import ShareCurveParams, share_at, slope_a2, y_trial


@dataclass(frozen=True)
class RateSample:
    t_years: float
    share: float
    sigma_e: float
    dsigma_dt: float
    dcti_dt: float

    COLUMNS = ("t", "p", "sigma_e", "dsigma_dt", "dcti_dt")

    def row(self):
        return (self.t_years, self.share, self.sigma_e, self.dsigma_dt, self.dcti_dt)


def share_variance(y: float) -> float:
    """p*(1-p) for p = 1/(1+exp(y)), computed without forming 1-p.

    Near saturation 1-p loses all its digits in double precision; the
    log-odds keep them.
    """
    e = math.exp(-abs(y))
    return e / (1.0 + e) ** 2


def _dsigma_dp(p, cfg):
    A = cfg.A
    dB_dp = -(A + 1.0) * cfg.delta_sigma
    B = linear_coefficient(p, cfg)
    return dB_dp * (B / math.sqrt(discriminant(p, cfg)) - 1.0) / (2.0 * A)


def dsigma_dp(p: float, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    """Derivative of the effective conductivity with respect to the share."""
    if not 0.0 < p < 1.0:
        raise DomainError(f"share must be in (0,1) for rates, got {p!r}")
    return _dsigma_dp(p, cfg)


def dsigma_dt_closed_form(t: float, params: ShareCurveParams, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    """Time derivative of sigma_e written in the shifted-share variable.

    Uses x = p - (sigma_cl - A*sigma_c)/((A+1)*dsigma) so that B = -(A+1)*dsigma*x.
    """
    y = y_trial(t, params)
    p = share_at(t, params)
    A, C, ds = cfg.A, cfg.C, cfg.delta_sigma
    x = p - (cfg.sigma_cashless - cfg.sigma_cash * A) / ((A + 1.0) * ds)
    radical = math.sqrt(x * x - 4.0 * A * C / ((1.0 + A) ** 2 * ds * ds))
    return (A + 1.0) * ds / (2.0 * A) * (x / radical + 1.0) * slope_a2(t, params) * share_variance(y)


def dsigma_dt(t: float, params: ShareCurveParams, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    y = y_trial(t, params)
    # dsigma/dp stays finite at p = 0 or 1, so a share rounded to an endpoint is fine here
    return _dsigma_dp(share_at(t, params), cfg) * slope_a2(t, params) * share_variance(y)


def dcti_dt(t: float, params: ShareCurveParams, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    """Rate of change of the CTI (index points per year)."""
    sigma_e = solve_two_phase(share_at(t, params), cfg)
    scale = 10.0 / math.log(cfg.sigma_cashless / cfg.sigma_cash)
    return scale * dsigma_dt(t, params, cfg) / sigma_e


def rate_profile(params: ShareCurveParams, cfg: EmaConfig, t_grid: Iterable[float]) -> List[RateSample]:
    out = []
    prev = None
    for t in t_grid:
        if prev is not None and t < prev:
            raise DomainError("time grid must be nondecreasing")
        prev = t
        p = share_at(t, params)
        ds = dsigma_dt(t, params, cfg)
        sigma_e = solve_two_phase(p, cfg)
        rate = 10.0 / math.log(cfg.sigma_cashless / cfg.sigma_cash) * ds / sigma_e
        out.append(RateSample(t, p, sigma_e, ds, rate))
    return out
