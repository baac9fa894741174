#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Run Configuration
=================

One strict JSON document per run. Example:

    {
      "experiment": "hhg-spectrum",
      "hhg": {"omega0": 0.1, "omegaL": 1.0, "field": 0.75, "dipole": 1.0},
      "init": {"c1": 0.7071067811865476, "c2": 0.7071067811865476},
      "grid": {"samples_per_period": 64, "periods": 256},
      "spectrum": {"rel_threshold": 1e-4}
    }

Sections by experiment:

    jc-compare    jc, init, grid{t_max, samples}, series, engine_check
    hhg-spectrum  hhg, init, grid{samples_per_period, periods}, spectrum, picture
    wkbj-demo     wkbj, grid{samples}, tol
    sweep         hhg, init, grid{samples_per_period, periods}, spectrum, sweep

Every experiment accepts an optional top-level "out" directory. Complex values
are a JSON number or an [re, im] pair. Unknown keys at any level are rejected.
"""

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np
import structlog

from dds_errors import InputError, ParseError, UnknownKey, ValidationError
from dds_hhg import HhgParams, Picture, Populations
from dds_jc import JcAmplitudes, JcParams
from dds_series import TimeGrid
from dds_spectrum import DEFAULT_REL_THRESHOLD
from dds_wkbj import WkbjProblem, alpha_profile

logger = structlog.get_logger(__name__)

EXPERIMENTS = ("jc-compare", "hhg-spectrum", "wkbj-demo", "sweep")
SERIES_CHOICES = ("auto", "dyson", "dual")
SWEEP_PARAMETERS = ("z", "field", "omega0", "omegaL", "dipole")
PROFILE_PARAMETERS = {"constant": ("k",), "linear": ("a", "b"), "sqrt-linear": ("epsilon",)}

DEFAULT_JC_SAMPLES = 4096
DEFAULT_SAMPLES_PER_PERIOD = 64
DEFAULT_PERIODS = 256
DEFAULT_WKBJ_SAMPLES = 201
DEFAULT_WKBJ_TOL = 1e-10
DEFAULT_SWEEP_THRESHOLD = 1e-7
DEFAULT_OUT = "out"

_SECTIONS = {
    "jc-compare": ("jc", "init", "grid", "series", "engine_check"),
    "hhg-spectrum": ("hhg", "init", "grid", "spectrum", "picture"),
    "wkbj-demo": ("wkbj", "grid", "tol"),
    "sweep": ("hhg", "init", "grid", "spectrum", "sweep"),
}
_GRID_KEYS = {
    "jc-compare": ("t_max", "samples"),
    "hhg-spectrum": ("samples_per_period", "periods"),
    "wkbj-demo": ("samples",),
    "sweep": ("samples_per_period", "periods"),
}

_MISSING = object()


# ============================================================================
# SECTIONS
# ============================================================================

@dataclass(frozen=True)
class JcSection:
    omega: float
    omega0: float
    g: float
    n: int = 0

    def params(self) -> JcParams:
        return JcParams(self.omega, self.omega0, self.g, self.n)


@dataclass(frozen=True)
class HhgSection:
    omega0: float
    omegaL: float
    field: Optional[float]
    dipole: float = 1.0

    def params(self, **overrides) -> HhgParams:
        values = {**asdict(self), **overrides}
        return HhgParams(**values)


@dataclass(frozen=True)
class WkbjSection:
    profile: str
    parameters: Tuple[Tuple[str, float], ...]
    x0: float
    x1: float
    psi0: float = 1.0
    phi0: float = 0.0

    def problem(self) -> WkbjProblem:
        alpha = alpha_profile(self.profile, **dict(self.parameters))
        return WkbjProblem(alpha, self.x0, self.x1, self.psi0, self.phi0)


@dataclass(frozen=True)
class GridSection:
    samples: int
    t_max: Optional[float] = None
    samples_per_period: int = DEFAULT_SAMPLES_PER_PERIOD
    periods: int = DEFAULT_PERIODS

    @property
    def total(self) -> int:
        return self.samples_per_period * self.periods


@dataclass(frozen=True)
class SpectrumSection:
    rel_threshold: float = DEFAULT_REL_THRESHOLD
    remove_carrier: bool = False


@dataclass(frozen=True)
class SweepSection:
    parameter: str
    values: Tuple[float, ...]
    orders: Tuple[int, ...] = (1, 2)

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class RunConfig:
    """Validated run description with every default applied."""
    experiment: str
    grid: GridSection
    init: Tuple[complex, complex] = (1.0, 0.0)
    jc: Optional[JcSection] = None
    hhg: Optional[HhgSection] = None
    wkbj: Optional[WkbjSection] = None
    spectrum: SpectrumSection = field(default_factory=SpectrumSection)
    sweep: Optional[SweepSection] = None
    series: str = "auto"
    engine_check: bool = False
    picture: Picture = Picture.SCHRODINGER
    tol: float = DEFAULT_WKBJ_TOL
    out: str = DEFAULT_OUT

    def jc_params(self) -> JcParams:
        return self.jc.params()

    def jc_amplitudes(self) -> JcAmplitudes:
        return JcAmplitudes(*self.init)

    def hhg_params(self) -> HhgParams:
        return self.hhg.params()

    def populations(self) -> Populations:
        return Populations(*self.init)

    def jc_grid(self) -> TimeGrid:
        return TimeGrid(0.0, self.grid.t_max, self.grid.samples)

    def hhg_grid(self, params: Optional[HhgParams] = None) -> TimeGrid:
        """samples_per_period × periods nodes, dt = T_L/samples_per_period."""
        params = params or self.hhg_params()
        dt = params.period / self.grid.samples_per_period
        n = self.grid.total
        return TimeGrid(0.0, (n - 1) * dt, n)

    def sweep_points(self) -> List[Tuple[float, HhgParams]]:
        """(value, parameters) per sweep value, in document order."""
        points = []
        for value in self.sweep.values:
            if self.sweep.parameter == "z":
                params = HhgParams.from_z(value, self.hhg.omega0, self.hhg.omegaL, self.hhg.dipole)
            else:
                params = self.hhg.params(**{self.sweep.parameter: value})
            points.append((value, params))
        return points

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready echo of the configuration."""
        doc: Dict[str, Any] = {"experiment": self.experiment, "out": self.out}
        wanted = _SECTIONS[self.experiment]
        grid = asdict(self.grid)
        doc["grid"] = {k: grid[k] for k in _GRID_KEYS[self.experiment]}
        if "init" in wanted:
            doc["init"] = {"c1": _complex_echo(self.init[0]), "c2": _complex_echo(self.init[1])}
        if self.jc is not None:
            doc["jc"] = asdict(self.jc)
        if self.hhg is not None:
            doc["hhg"] = {k: v for k, v in asdict(self.hhg).items() if v is not None}
        if self.wkbj is not None:
            doc["wkbj"] = {"profile": self.wkbj.profile, **dict(self.wkbj.parameters),
                           "x0": self.wkbj.x0, "x1": self.wkbj.x1,
                           "psi0": self.wkbj.psi0, "phi0": self.wkbj.phi0}
        if "spectrum" in wanted:
            doc["spectrum"] = asdict(self.spectrum)
        if self.sweep is not None:
            doc["sweep"] = {"parameter": self.sweep.parameter, "values": list(self.sweep.values),
                            "orders": list(self.sweep.orders)}
        if "series" in wanted:
            doc["series"] = self.series
            doc["engine_check"] = self.engine_check
        if "picture" in wanted:
            doc["picture"] = self.picture.value
        if "tol" in wanted:
            doc["tol"] = self.tol
        return doc


def _complex_echo(value: complex) -> List[float]:
    value = complex(value)
    return [value.real, value.imag]


# ============================================================================
# FIELD READER
# ============================================================================

class _Reader:
    """Typed access to one JSON object, rejecting keys outside `allowed`."""

    def __init__(self, obj: Any, path: str, allowed: Tuple[str, ...]):
        if not isinstance(obj, dict):
            raise ValidationError(path, "must be an object")
        for key in obj:
            if key not in allowed:
                raise UnknownKey(key, path or None)
        self.obj = obj
        self.path = path

    def name(self, key: str) -> str:
        return f"{self.path}.{key}" if self.path else key

    def has(self, key: str) -> bool:
        return key in self.obj

    def _get(self, key: str, default):
        if key in self.obj:
            return self.obj[key]
        if default is _MISSING:
            raise ValidationError(self.name(key), "is required")
        return default

    def number(self, key: str, default=_MISSING, positive: bool = False) -> Optional[float]:
        value = self._get(key, default)
        if value is None and default is None:
            return None
        value = _as_number(value, self.name(key))
        if positive and value <= 0:
            raise ValidationError(self.name(key), f"must be positive, got {value}")
        return value

    def integer(self, key: str, default=_MISSING, minimum: int = 0) -> int:
        value = self._get(key, default)
        if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
            raise ValidationError(self.name(key), f"must be an integer, got {value!r}")
        if value < minimum:
            raise ValidationError(self.name(key), f"must be at least {minimum}, got {value}")
        return int(value)

    def complex(self, key: str, default=_MISSING) -> complex:
        value = self._get(key, default)
        if isinstance(value, list):
            if len(value) != 2:
                raise ValidationError(self.name(key), "complex values are [re, im]")
            return complex(_as_number(value[0], self.name(key)), _as_number(value[1], self.name(key)))
        return complex(_as_number(value, self.name(key)))

    def boolean(self, key: str, default=_MISSING) -> bool:
        value = self._get(key, default)
        if not isinstance(value, bool):
            raise ValidationError(self.name(key), f"must be true or false, got {value!r}")
        return value

    def choice(self, key: str, choices: Tuple[str, ...], default=_MISSING) -> str:
        value = self._get(key, default)
        if value not in choices:
            raise ValidationError(self.name(key), f"must be one of {', '.join(choices)}, got {value!r}")
        return value

    def numbers(self, key: str) -> Tuple[float, ...]:
        value = self._get(key, _MISSING)
        if not isinstance(value, list) or not value:
            raise ValidationError(self.name(key), "must be a non-empty list of numbers")
        return tuple(_as_number(v, self.name(key)) for v in value)


def _as_number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError(name, f"must be a number, got {value!r}")
    value = float(value)
    if not np.isfinite(value):
        raise ValidationError(name, "must be finite")
    return value


# ============================================================================
# DOCUMENT
# ============================================================================

def _reject_constant(name: str):
    raise ParseError(f"non-standard JSON constant {name}")


def _unique_pairs(pairs):
    obj = {}
    for key, value in pairs:
        if key in obj:
            raise ParseError(f"duplicate key '{key}'")
        obj[key] = value
    return obj


def load_document(text: Union[str, bytes]) -> Dict[str, Any]:
    """Strict JSON object: no NaN/Infinity, no duplicate keys."""
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise ParseError(f"configuration is not UTF-8: {e}") from e
    try:
        doc = json.loads(text, parse_constant=_reject_constant, object_pairs_hook=_unique_pairs)
    except json.JSONDecodeError as e:
        raise ParseError(f"malformed JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ParseError("the configuration must be a JSON object")
    return doc


def _parse_jc(obj) -> JcSection:
    r = _Reader(obj, "jc", ("omega", "omega0", "g", "n"))
    section = JcSection(r.number("omega"), r.number("omega0"), r.number("g"), r.integer("n", 0))
    section.params()
    return section


def _parse_hhg(obj, field_required: bool) -> HhgSection:
    r = _Reader(obj, "hhg", ("omega0", "omegaL", "field", "dipole"))
    if field_required:
        strength = r.number("field")
    elif r.has("field"):
        raise ValidationError("hhg.field", "is set by the z sweep and must be omitted")
    else:
        strength = None
    section = HhgSection(r.number("omega0"), r.number("omegaL", positive=True), strength,
                         r.number("dipole", 1.0))
    if strength is not None:
        section.params()
    return section


def _parse_wkbj(obj) -> WkbjSection:
    if not isinstance(obj, dict):
        raise ValidationError("wkbj", "must be an object")
    profile = obj.get("profile", _MISSING)
    if profile is _MISSING:
        raise ValidationError("wkbj.profile", "is required")
    if profile not in PROFILE_PARAMETERS:
        raise ValidationError("wkbj.profile",
                              f"must be one of {', '.join(PROFILE_PARAMETERS)}, got {profile!r}")
    names = PROFILE_PARAMETERS[profile]
    r = _Reader(obj, "wkbj", ("profile", "x0", "x1", "psi0", "phi0") + names)
    parameters = tuple((name, r.number(name)) for name in names if r.has(name))
    section = WkbjSection(profile, parameters, r.number("x0", 0.0), r.number("x1"),
                          r.number("psi0", 1.0), r.number("phi0", 0.0))
    section.problem()
    return section


def _parse_grid(obj, experiment: str, jc: Optional[JcSection]) -> GridSection:
    r = _Reader(obj, "grid", _GRID_KEYS[experiment])
    if experiment == "jc-compare":
        if r.has("t_max"):
            t_max = r.number("t_max", positive=True)
        else:
            big = jc.params().omega_n
            if big == 0:
                raise ValidationError("grid.t_max", "required when Ω_n = 0")
            t_max = 20.0 * np.pi / big
        return GridSection(r.integer("samples", DEFAULT_JC_SAMPLES, minimum=3), t_max=t_max)
    if experiment == "wkbj-demo":
        return GridSection(r.integer("samples", DEFAULT_WKBJ_SAMPLES, minimum=2))
    grid = GridSection(0, samples_per_period=r.integer("samples_per_period", DEFAULT_SAMPLES_PER_PERIOD, 2),
                       periods=r.integer("periods", DEFAULT_PERIODS, 1))
    n = grid.total
    if n & (n - 1):
        raise ValidationError("grid", f"samples_per_period × periods must be a power of two, got {n}")
    return GridSection(n, samples_per_period=grid.samples_per_period, periods=grid.periods)


def _parse_init(obj, experiment: str) -> Tuple[complex, complex]:
    r = _Reader(obj, "init", ("c1", "c2"))
    default = (1.0, 0.0) if experiment != "sweep" else (np.sqrt(0.5), np.sqrt(0.5))
    c1, c2 = r.complex("c1", default[0]), r.complex("c2", default[1])
    if experiment != "jc-compare":
        Populations(c1, c2)
    elif not (np.isfinite(abs(c1)) and np.isfinite(abs(c2))):
        raise ValidationError("init", "amplitudes must be finite")
    return c1, c2


def _parse_spectrum(obj, experiment: str, picture: Picture) -> SpectrumSection:
    r = _Reader(obj, "spectrum", ("rel_threshold", "remove_carrier"))
    sweep = experiment == "sweep"
    threshold = r.number("rel_threshold", DEFAULT_SWEEP_THRESHOLD if sweep else DEFAULT_REL_THRESHOLD)
    if not 0.0 < threshold <= 1.0:
        raise ValidationError("spectrum.rel_threshold", f"must lie in (0, 1], got {threshold}")
    remove = r.boolean("remove_carrier", sweep)
    if remove and picture is not Picture.SCHRODINGER:
        raise ValidationError("spectrum.remove_carrier", "the analytic carrier exists in the Schrödinger picture only")
    return SpectrumSection(threshold, remove)


def _parse_sweep(obj) -> SweepSection:
    r = _Reader(obj, "sweep", ("parameter", "values", "orders"))
    parameter = r.choice("parameter", SWEEP_PARAMETERS)
    values = r.numbers("values")
    orders: Tuple[int, ...] = (1, 2)
    if r.has("orders"):
        raw = r.numbers("orders")
        if any(o < 1 or o != int(o) for o in raw):
            raise ValidationError("sweep.orders", "hyper-Raman orders are integers >= 1")
        orders = tuple(int(o) for o in raw)
    return SweepSection(parameter, values, orders)


def parse_config(text: Union[str, bytes]) -> RunConfig:
    """
    Parse and validate one configuration document.

    Raises:
        ParseError: malformed JSON
        ValidationError: missing, mistyped or out-of-range value (names the field)
        UnknownKey: a key no section understands
    """
    doc = load_document(text)
    if "experiment" not in doc:
        raise ValidationError("experiment", "is required")
    experiment = doc["experiment"]
    if experiment not in EXPERIMENTS:
        raise ValidationError("experiment", f"must be one of {', '.join(EXPERIMENTS)}, got {experiment!r}")
    top = _Reader(doc, "", ("experiment", "out") + _SECTIONS[experiment])
    out = top._get("out", DEFAULT_OUT)
    if not isinstance(out, str) or not out:
        raise ValidationError("out", "must be a non-empty path string")

    settings: Dict[str, Any] = {"experiment": experiment, "out": out}
    if experiment == "jc-compare":
        jc = _parse_jc(top._get("jc", _MISSING))
        settings.update(jc=jc, series=top.choice("series", SERIES_CHOICES, "auto"),
                        engine_check=top.boolean("engine_check", False),
                        init=_parse_init(top._get("init", {}), experiment),
                        grid=_parse_grid(top._get("grid", {}), experiment, jc))
    elif experiment == "wkbj-demo":
        tol = top.number("tol", DEFAULT_WKBJ_TOL, positive=True)
        settings.update(wkbj=_parse_wkbj(top._get("wkbj", _MISSING)), tol=tol,
                        grid=_parse_grid(top._get("grid", {}), experiment, None))
    else:
        sweep = _parse_sweep(top._get("sweep", _MISSING)) if experiment == "sweep" else None
        field_required = sweep is None or sweep.parameter != "z"
        if not field_required and isinstance(doc.get("hhg"), dict) and doc["hhg"].get("dipole", 1.0) == 0:
            raise ValidationError("hhg.dipole", "a z sweep needs a non-zero dipole")
        picture = Picture(top.choice("picture", tuple(p.value for p in Picture), Picture.SCHRODINGER.value)) \
            if experiment == "hhg-spectrum" else Picture.SCHRODINGER
        settings.update(hhg=_parse_hhg(top._get("hhg", _MISSING), field_required), sweep=sweep,
                        picture=picture,
                        init=_parse_init(top._get("init", {}), experiment),
                        grid=_parse_grid(top._get("grid", {}), experiment, None),
                        spectrum=_parse_spectrum(top._get("spectrum", {}), experiment, picture))
    config = RunConfig(**settings)
    if config.sweep is not None:
        config.sweep_points()
    logger.debug("parse_config", experiment=experiment)
    return config


def load_config(path: Union[str, Path]) -> RunConfig:
    """Read and parse a configuration file."""
    try:
        text = Path(path).read_bytes()
    except OSError as e:
        raise InputError(f"cannot read configuration '{path}': {e}") from e
    return parse_config(text)
