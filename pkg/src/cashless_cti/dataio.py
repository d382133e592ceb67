"""Reading country series and run configuration; writing tables and
parameter documents.

Parameter, report and scenario documents are JSON with unit-bearing key
names (``alpha_per_year``, ``T_years`` ...).  Floats are written with full
repr precision so documents round-trip exactly.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

from .calibration import CalibrationReport, CurveWidth
from .ema import EmaConfig
from .errors import CTIError, DomainError, ParseError, SchemaError
from .policy import PolicyEvent, Scenario
from .share import LinearFit, QuadraticFit, ShareCurveParams

SHARE_UNITS = ("fraction", "percent")
HEADER = ("country", "year", "share")


@dataclass(frozen=True)
class CountrySeries:
    country: str
    observations: Tuple[Tuple[int, float], ...]

    def __post_init__(self):
        obs = tuple((int(y), float(p)) for y, p in self.observations)
        if not obs:
            raise DomainError(f"{self.country}: series has no observations")
        years = [y for y, _ in obs]
        if any(b <= a for a, b in zip(years, years[1:])):
            raise DomainError(f"{self.country}: years must be strictly increasing")
        for y, p in obs:
            if not 0.0 < p < 1.0:
                raise DomainError(f"{self.country} {y}: share must be strictly inside (0,1)")
        object.__setattr__(self, "observations", obs)

    @property
    def t_origin(self) -> int:
        return self.observations[0][0]

    @property
    def years(self):
        return [y for y, _ in self.observations]

    @property
    def shares(self):
        return [p for _, p in self.observations]


@dataclass(frozen=True)
class RunConfig:
    sigma_cash: float = 1.0
    sigma_cashless: float = 10.0
    z: float = 4.0
    T_years: float = 50.0
    gamma_default: float = 0.3
    share_unit: str = "fraction"

    def __post_init__(self):
        self.ema  # validates the EMA invariants
        if not 0.0 < self.gamma_default < 1.0:
            raise DomainError(f"gamma_default must be in (0,1), got {self.gamma_default!r}")
        if not self.T_years > 0:
            raise DomainError(f"T_years must be positive, got {self.T_years!r}")
        if self.share_unit not in SHARE_UNITS:
            raise DomainError(f"share_unit must be one of {SHARE_UNITS}, got {self.share_unit!r}")

    @property
    def ema(self) -> EmaConfig:
        return EmaConfig(self.sigma_cash, self.sigma_cashless, self.z)


class SeriesError(CTIError):
    """Aggregated validation failure; ``issues`` holds (line, message) pairs."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(f"line {n}: {m}" for n, m in self.issues))


class SeriesParseError(SeriesError, ParseError):
    pass


class SeriesDomainError(SeriesError, DomainError):
    pass


def _read_text(source) -> str:
    if isinstance(source, (bytes, bytearray)):
        return bytes(source).decode("utf-8-sig")
    if isinstance(source, (str, os.PathLike)):
        return Path(source).read_bytes().decode("utf-8-sig")
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("utf-8-sig")
    return data.lstrip("﻿")


def load_series(source, unit: str = "fraction") -> List[CountrySeries]:
    """Parse a ``country,year,share`` CSV into validated series.

    ``source`` may be bytes, a path or an open file.  Every bad row is
    reported; nothing is returned unless the whole file is valid.
    """
    if unit not in SHARE_UNITS:
        raise ValueError(f"unit must be one of {SHARE_UNITS}, got {unit!r}")
    text = _read_text(source)
    reader = csv.reader(io.StringIO(text, newline=""))
    parse_issues, domain_issues = [], []
    rows = []
    header = next(reader, None)
    if header is None or tuple(h.strip().lower() for h in header) != HEADER:
        raise SeriesParseError([(1, "header must be 'country,year,share'")])
    for row in reader:
        line = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) != 3:
            parse_issues.append((line, f"expected 3 fields, got {len(row)}"))
            continue
        country, year_s, share_s = (c.strip() for c in row)
        if not country:
            parse_issues.append((line, "empty country name"))
            continue
        try:
            year = int(year_s)
        except ValueError:
            parse_issues.append((line, f"year {year_s!r} is not an integer"))
            continue
        try:
            share = float(share_s)
        except ValueError:
            parse_issues.append((line, f"share {share_s!r} is not a number"))
            continue
        if unit == "percent":
            share /= 100.0
        if not (math.isfinite(share) and 0.0 < share < 1.0):
            domain_issues.append((line, "share must be strictly inside (0,1)"))
            continue
        rows.append((line, country, year, share))
    if parse_issues:
        raise SeriesParseError(parse_issues + domain_issues)

    grouped = OrderedDict()
    for line, country, year, share in rows:
        seen = grouped.setdefault(country, {})
        if year in seen:
            domain_issues.append((line, f"duplicate year {year} for {country}"))
            continue
        seen[year] = share
    if domain_issues:
        raise SeriesDomainError(sorted(domain_issues))
    return [
        CountrySeries(country, tuple(sorted(obs.items())))
        for country, obs in grouped.items()
    ]


# ---------------------------------------------------------------------------
# structured documents


def _num(doc, key, path):
    if key not in doc:
        raise SchemaError(f"{path}.{key}" if path else key, "missing key")
    v = doc[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise SchemaError(f"{path}.{key}" if path else key, f"expected a number, got {v!r}")
    return float(v)


def _obj(doc, path):
    if not isinstance(doc, dict):
        raise SchemaError(path or "<root>", "expected an object")
    return doc


def _build(path, factory, *args):
    try:
        return factory(*args)
    except DomainError as exc:
        raise SchemaError(path or "<root>", str(exc)) from None


def params_to_dict(p: ShareCurveParams):
    return {
        "alpha_per_year": p.alpha,
        "beta": p.beta,
        "gamma": p.gamma,
        "T_years": p.T_years,
        "delta_t0_years": p.delta_t0_years,
    }


def params_from_dict(doc, path=""):
    doc = _obj(doc, path)
    return _build(
        path,
        ShareCurveParams,
        _num(doc, "alpha_per_year", path),
        _num(doc, "beta", path),
        _num(doc, "gamma", path),
        _num(doc, "T_years", path),
        _num(doc, "delta_t0_years", path),
    )


def fit_to_dict(fit):
    if fit is None:
        return None
    if isinstance(fit, LinearFit):
        return {
            "variant": "linear",
            "a2_per_year": fit.a2,
            "mu1": fit.mu1,
            "r_squared": fit.r_squared,
            "t_origin": fit.t_origin,
        }
    return {
        "variant": "quadratic",
        "b_per_year2": fit.b,
        "a20_per_year": fit.a20,
        "mu2": fit.mu2,
        "r_squared": fit.r_squared,
        "t_origin": fit.t_origin,
    }


def _origin(doc, path):
    v = _num(doc, "t_origin", path)
    return int(v) if v.is_integer() and isinstance(doc["t_origin"], int) else v


def fit_from_dict(doc, path):
    if doc is None:
        return None
    doc = _obj(doc, path)
    variant = doc.get("variant")
    if variant == "linear":
        return LinearFit(
            _num(doc, "a2_per_year", path),
            _num(doc, "mu1", path),
            _num(doc, "r_squared", path),
            _origin(doc, path),
        )
    if variant == "quadratic":
        return QuadraticFit(
            _num(doc, "b_per_year2", path),
            _num(doc, "a20_per_year", path),
            _num(doc, "mu2", path),
            _num(doc, "r_squared", path),
            _origin(doc, path),
        )
    raise SchemaError(f"{path}.variant", f"expected 'linear' or 'quadratic', got {variant!r}")


def width_to_dict(w: CurveWidth):
    return {
        "tau_years": w.tau_years,
        "t_half_years": w.t_half_years,
        "t1_years": w.t1_years,
        "t2_years": w.t2_years,
    }


def width_from_dict(doc, path):
    doc = _obj(doc, path)
    return _build(
        path,
        CurveWidth,
        _num(doc, "tau_years", path),
        _num(doc, "t_half_years", path),
        _num(doc, "t1_years", path),
        _num(doc, "t2_years", path),
    )


def event_to_dict(e: PolicyEvent):
    return {"epsilon_per_year": e.epsilon, "t_i_years": e.t_i_years, "omega_years": e.omega_years}


def event_from_dict(doc, path):
    doc = _obj(doc, path)
    return _build(
        path,
        PolicyEvent,
        _num(doc, "epsilon_per_year", path),
        _num(doc, "t_i_years", path),
        _num(doc, "omega_years", path),
    )


def to_document(obj) -> dict:
    if isinstance(obj, ShareCurveParams):
        return {"kind": "share_curve_params", **params_to_dict(obj)}
    if isinstance(obj, CalibrationReport):
        return {
            "kind": "calibration_report",
            "country": obj.country,
            "selected": obj.selected,
            "linear": fit_to_dict(obj.linear),
            "quadratic": fit_to_dict(obj.quadratic),
            "params": params_to_dict(obj.params),
            "width": width_to_dict(obj.width),
            "warnings": list(obj.warnings),
        }
    if isinstance(obj, Scenario):
        return {
            "kind": "scenario",
            "label": obj.label,
            "baseline": params_to_dict(obj.baseline),
            "events": [event_to_dict(e) for e in obj.events],
        }
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_document(doc):
    doc = _obj(doc, "")
    kind = doc.get("kind", "share_curve_params")
    if kind == "share_curve_params":
        return params_from_dict(doc)
    if kind == "calibration_report":
        for key in ("country", "selected", "linear", "params", "width"):
            if key not in doc:
                raise SchemaError(key, "missing key")
        if not isinstance(doc["country"], str):
            raise SchemaError("country", "expected a string")
        if doc["selected"] not in ("linear", "quadratic"):
            raise SchemaError("selected", "expected 'linear' or 'quadratic'")
        warnings = doc.get("warnings", [])
        if not isinstance(warnings, list) or not all(isinstance(w, str) for w in warnings):
            raise SchemaError("warnings", "expected a list of strings")
        return CalibrationReport(
            country=doc["country"],
            linear=fit_from_dict(doc["linear"], "linear"),
            quadratic=fit_from_dict(doc.get("quadratic"), "quadratic"),
            selected=doc["selected"],
            params=params_from_dict(doc["params"], "params"),
            width=width_from_dict(doc["width"], "width"),
            warnings=warnings,
        )
    if kind == "scenario":
        if "baseline" not in doc:
            raise SchemaError("baseline", "missing key")
        events = doc.get("events", [])
        if not isinstance(events, list):
            raise SchemaError("events", "expected a list")
        label = doc.get("label", "")
        if not isinstance(label, str):
            raise SchemaError("label", "expected a string")
        return Scenario(
            baseline=params_from_dict(doc["baseline"], "baseline"),
            events=tuple(event_from_dict(e, f"events[{i}]") for i, e in enumerate(events)),
            label=label,
        )
    raise SchemaError("kind", f"unknown document kind {kind!r}")


def save_params(obj) -> str:
    """Serialize params, a calibration report or a scenario to JSON text."""
    return json.dumps(to_document(obj), indent=2, sort_keys=True) + "\n"


def load_params(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno) from None
    return from_document(doc)


def write_params(obj, path) -> int:
    return atomic_write(path, save_params(obj).encode("utf-8"))


def read_params(path):
    return load_params(Path(path).read_text(encoding="utf-8"))


def curve_params(obj) -> ShareCurveParams:
    """The share-curve parameters carried by any loaded document."""
    if isinstance(obj, ShareCurveParams):
        return obj
    if isinstance(obj, CalibrationReport):
        return obj.params
    if isinstance(obj, Scenario):
        return obj.baseline
    raise TypeError(f"{type(obj).__name__} carries no share-curve parameters")


def load_run_config(path) -> RunConfig:
    text = Path(path).read_text(encoding="utf-8")
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON in config: {exc.msg}", exc.lineno) from None
    doc = _obj(doc, "")
    known = set(RunConfig.__dataclass_fields__)
    unknown = sorted(set(doc) - known)
    if unknown:
        raise SchemaError(unknown[0], "unknown config key")
    kwargs = {}
    for key in known - {"share_unit"}:
        if key in doc:
            kwargs[key] = _num(doc, key, "")
    if "share_unit" in doc:
        kwargs["share_unit"] = doc["share_unit"]
    try:
        return RunConfig(**kwargs)
    except DomainError as exc:
        raise SchemaError("<root>", str(exc)) from None


# ---------------------------------------------------------------------------
# tables


def format_cell(v) -> str:
    if isinstance(v, bool):
        return str(v).lower()
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return format(v, ".6g")
    return str(v)


def render_table(rows: Iterable[Sequence], columns: Sequence[str]) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    width = len(columns)
    for row in rows:
        if len(row) != width:
            raise ValueError(f"row has {len(row)} fields, expected {width}")
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue().encode("utf-8")


def atomic_write(path, data: bytes) -> int:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return len(data)


def write_table(rows, destination, columns: Sequence[str]) -> int:
    """Write rows as CSV (6 significant digits, LF endings); return bytes written.

    ``destination`` is a path or a writable text/binary stream.
    """
    data = render_table(rows, columns)
    if isinstance(destination, (str, os.PathLike)):
        return atomic_write(destination, data)
    try:
        destination.write(data)
    except TypeError:
        destination.write(data.decode("utf-8"))
    return len(data)
