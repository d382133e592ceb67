"""Cashless transaction index from an effective-medium model of cash and
cashless payments, with share-growth calibration, rate and policy tools."""

from .calibration import CalibrationReport, CurveWidth, calibrate_country, curve_width, delta_t0, fit_transform, select_model
from .dataio import CountrySeries, RunConfig, load_params, load_series, save_params, write_table
from .ema import (
    EmaConfig,
    MixtureComponent,
    Region,
    calibration_threshold,
    classify,
    cti_from_share,
    ema_insulator_threshold,
    share_from_cti,
    solve_general,
    solve_two_phase,
)
from .errors import CTIError, ConvergenceError, DomainError, NoRealRootError, ParseError, SchemaError
from .policy import PolicyEvent, Scenario, alpha_prime, compare_scenarios, project_policy
from .rates import RateSample, dcti_dt, dsigma_dp, dsigma_dt, rate_profile
from .reference import COUNTRY_PARAMS, LINEAR_CLASS, QUADRATIC_CLASS
from .share import (
    LinearFit,
    QuadraticFit,
    ShareCurveParams,
    half_share_time,
    match_from_linear,
    match_from_quadratic,
    share_at,
    slope_a2,
    y_extremum_time,
    y_trial,
)

__version__ = "0.1.0"
