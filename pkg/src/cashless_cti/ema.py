"""Effective-medium solver for a cash/cashless transaction mixture.

Cash users act as the poorly conducting phase and cashless users as the
good conductor.  The effective conductivity of the mixture is mapped to a
logarithmic 0-10 index (CTI) and graded into four regions.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import ConvergenceError, DomainError

FRACTION_TOL = 1e-9
RESIDUAL_TOL = 1e-12
MAX_BISECTION_ITER = 400


@dataclass(frozen=True)
class EmaConfig:
    sigma_cash: float = 1.0
    sigma_cashless: float = 10.0
    z: float = 4.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.sigma_cash, self.sigma_cashless, self.z)):
            raise DomainError("EMA configuration values must be finite")
        if not self.sigma_cash > 0:
            raise DomainError("sigma_cash must be positive")
        if not self.sigma_cashless > self.sigma_cash:
            raise DomainError("sigma_cashless must exceed sigma_cash")
        if not self.z > 2:
            raise DomainError("coordination number z must be > 2")

    @property
    def A(self) -> float:
        return self.z / 2.0 - 1.0

    @property
    def C(self) -> float:
        return -self.sigma_cash * self.sigma_cashless

    @property
    def delta_sigma(self) -> float:
        return self.sigma_cashless - self.sigma_cash


DEFAULT_CONFIG = EmaConfig()


@dataclass(frozen=True)
class MixtureComponent:
    conductivity: float
    fraction: float


class Region(enum.IntEnum):
    Inception = 0
    Transitioning = 1
    TippingPoint = 2
    NearlyCashless = 3

    def __str__(self):
        return self.name


def _check_share(p):
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"share must be in [0,1], got {p!r}")


def _check_cti(cti):
    if not (0.0 <= cti <= 10.0):
        raise DomainError(f"CTI must be in [0,10], got {cti!r}")


def linear_coefficient(p: float, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    """B(p) of the quadratic A*s**2 + B*s + C = 0 for the two-phase mixture."""
    q = 1.0 - p
    A, sc, scl = cfg.A, cfg.sigma_cash, cfg.sigma_cashless
    return -(p * scl * A - p * sc + q * sc * A - q * scl)


def discriminant(p: float, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    B = linear_coefficient(p, cfg)
    return B * B - 4.0 * cfg.A * cfg.C


def solve_two_phase(p: float, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    """Effective conductivity for cashless share ``p``.

    Returns the positive root of the EMA quadratic.  With A > 0 and C < 0 the
    roots have opposite signs, so the positive one is unique.
    """
    _check_share(p)
    A, C = cfg.A, cfg.C
    B = linear_coefficient(p, cfg)
    root = math.sqrt(B * B - 4.0 * A * C)
    # pick the cancellation-free form for the sign of B
    if B <= 0:
        sigma = (-B + root) / (2.0 * A)
    else:
        sigma = -2.0 * C / (B + root)
    return min(max(sigma, cfg.sigma_cash), cfg.sigma_cashless)


def ema_residual(sigma_e: float, components: Sequence[MixtureComponent], z: float) -> float:
    A = z / 2.0 - 1.0
    return math.fsum(
        c.fraction * (c.conductivity - sigma_e) / (c.conductivity + A * sigma_e)
        for c in components
    )


def solve_general(components: Sequence[MixtureComponent], z: float = 4.0) -> float:
    """Effective conductivity of an arbitrary mixture by bisection.

    The residual is strictly decreasing in the effective conductivity, so the
    root is bracketed by the smallest and largest component conductivity.  A
    mixture whose conducting components lie below the percolation point has
    no positive root; 0.0 is returned in that case.
    """
    if not z > 2:
        raise DomainError("coordination number z must be > 2")
    components = list(components)
    if not components:
        raise DomainError("at least one mixture component is required")
    for c in components:
        if not (c.conductivity >= 0 and math.isfinite(c.conductivity)):
            raise DomainError(f"conductivity must be finite and nonnegative, got {c.conductivity!r}")
        if not (0.0 <= c.fraction <= 1.0):
            raise DomainError(f"fraction must be in [0,1], got {c.fraction!r}")
    total = math.fsum(c.fraction for c in components)
    if abs(total - 1.0) > FRACTION_TOL:
        raise DomainError(f"fractions must sum to 1, got {total!r}")
    active = [c for c in components if c.fraction > 0]
    hi = max(c.conductivity for c in active)
    if hi <= 0:
        raise DomainError("at least one component must have positive conductivity")
    lo = min(c.conductivity for c in active)
    if lo == hi:
        return hi
    if lo == 0:
        lo = hi * 1e-300
        if ema_residual(lo, active, z) < 0:
            return 0.0

    f_lo = ema_residual(lo, active, z)
    f_hi = ema_residual(hi, active, z)
    # bisect to floating-point resolution; the tolerance is checked at the end
    for _ in range(MAX_BISECTION_ITER):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = ema_residual(mid, active, z)
        if f_mid == 0:
            return mid
        if f_mid > 0:
            lo, f_lo = mid, f_mid
        else:
            hi, f_hi = mid, f_mid
    best, f_best = (lo, f_lo) if abs(f_lo) <= abs(f_hi) else (hi, f_hi)
    if abs(f_best) < RESIDUAL_TOL:
        return best
    raise ConvergenceError(
        f"bisection stalled at sigma_e={best!r} with residual {f_best!r}"
    )


def cti_from_sigma(sigma_e: float, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    return 10.0 * math.log10(sigma_e / cfg.sigma_cash) / math.log10(cfg.sigma_cashless / cfg.sigma_cash)


def cti_from_share(p: float, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    """Cashless transaction index in [0, 10] for share ``p``."""
    return cti_from_sigma(solve_two_phase(p, cfg), cfg)


def share_from_cti(cti: float, cfg: EmaConfig = DEFAULT_CONFIG) -> float:
    """Invert the index back to a cashless share.

    Recover the effective conductivity from the log scale, read B off the
    quadratic, then solve B(p), which is linear in p.
    """
    _check_cti(cti)
    sc, scl, A = cfg.sigma_cash, cfg.sigma_cashless, cfg.A
    sigma_e = sc * (scl / sc) ** (cti / 10.0)
    B = -(A * sigma_e * sigma_e + cfg.C) / sigma_e
    p = ((scl - sc * A) - B) / ((A + 1.0) * cfg.delta_sigma)
    return min(max(p, 0.0), 1.0)


def classify(cti: float) -> Region:
    _check_cti(cti)
    if cti < 2.5:
        return Region.Inception
    if cti < 5.0:
        return Region.Transitioning
    if cti < 7.5:
        return Region.TippingPoint
    return Region.NearlyCashless


def calibration_threshold(z: float) -> float:
    """Percolation share 1/(z-1) used when sizing the curve width."""
    if not z > 2:
        raise DomainError("coordination number z must be > 2")
    return 1.0 / (z - 1.0)


def ema_insulator_threshold(z: float) -> float:
    """Share 2/z where the two-phase solution leaves zero as sigma_cash -> 0."""
    if not z > 2:
        raise DomainError("coordination number z must be > 2")
    return 2.0 / z
