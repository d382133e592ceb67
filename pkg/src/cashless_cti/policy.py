"""Policy scenarios: arctan ramps added to the growth parameter alpha."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, List, Sequence, Tuple

from .ema import DEFAULT_CONFIG, EmaConfig, classify, cti_from_share
from .errors import DomainError, MixedBaselineError
from .share import ShareCurveParams, share_from_log_odds


@dataclass(frozen=True)
class PolicyEvent:
    epsilon: float
    t_i_years: float
    omega_years: float

    def __post_init__(self):
        if not self.omega_years > 0:
            raise DomainError(f"omega must be positive, got {self.omega_years!r}")
        if not self.epsilon >= 0:
            raise DomainError(
                f"epsilon must be >= 0 (only accelerating policies are modelled), got {self.epsilon!r}"
            )


@dataclass(frozen=True)
class Scenario:
    baseline: ShareCurveParams
    events: Tuple[PolicyEvent, ...] = field(default_factory=tuple)
    label: str = ""

    def __post_init__(self):
        events = tuple(sorted(self.events, key=lambda e: e.t_i_years))
        object.__setattr__(self, "events", events)


def alpha_prime(t: float, baseline_alpha: float, events: Sequence[PolicyEvent]) -> float:
    """alpha + sum eps_i * (1 + 2/pi * arctan((t - t_i)/omega_i))."""
    if not events:
        return baseline_alpha
    boost = math.fsum(
        e.epsilon * (1.0 + (2.0 / math.pi) * math.atan((t - e.t_i_years) / e.omega_years))
        for e in events
    )
    return baseline_alpha + boost


def project_policy(t: float, scenario: Scenario, cfg: EmaConfig = DEFAULT_CONFIG):
    """Return (y, p, cti) at time t with the time-varying alpha substituted."""
    base = scenario.baseline
    a = alpha_prime(t, base.alpha, scenario.events)
    y = (a * t + base.beta) * (base.gamma - math.tanh(t / base.T_years))
    p = share_from_log_odds(y)
    return y, p, cti_from_share(p, cfg)


SCENARIO_COLUMNS = ("scenario", "t", "y", "p", "cti", "region")


def compare_scenarios(
    scenarios: Sequence[Scenario], t_grid: Iterable[float], cfg: EmaConfig = DEFAULT_CONFIG
) -> List[tuple]:
    """Long-format table: one row per (scenario, time)."""
    if not scenarios:
        raise DomainError("at least one scenario is required")
    base = scenarios[0].baseline
    for s in scenarios[1:]:
        if s.baseline != base:
            raise MixedBaselineError(
                f"scenario {s.label!r} does not share the baseline of {scenarios[0].label!r}"
            )
    grid = list(t_grid)
    if any(b < a for a, b in zip(grid, grid[1:])):
        raise DomainError("time grid must be nondecreasing")
    rows = []
    for i, s in enumerate(scenarios):
        label = s.label or f"scenario{i}"
        for t in grid:
            y, p, cti = project_policy(t, s, cfg)
            rows.append((label, t, y, p, cti, classify(cti).name))
    return rows
