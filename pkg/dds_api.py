#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dual Dyson Experiments API
==========================

One entry point per experiment, returning plain result records that the
command line writes to disk and the MCP server returns as JSON.
"""

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import structlog

from dds_config import RunConfig, SpectrumSection, parse_config
from dds_errors import NumericalError, OutputError, ValidationError
from dds_hhg import (
    HhgParams, Picture, Populations, bessel_identity_residual, bessel_j,
    dipole_components, dipole_cross_check, dipole_expectation,
)
from dds_jc import (
    JcAmplitudes, JcParams, amplitude_error_series, jc_dual_closed, jc_dual_propagator,
    jc_dyson_closed, jc_exact, jc_sector_hamiltonian, population_error,
)
from dds_linalg import max_norm
from dds_series import TimeGrid, dual_dyson_propagate, dyson_propagate
from dds_spectrum import (
    LineKind, Peak, SpectrumResult, TimeSeries, classify_lines, detect_peaks,
    hyper_raman_centers, power_spectrum,
)
from dds_wkbj import (
    WkbjProblem, reference_solve, wkbj_adiabatic_propagator, wkbj_berry_connections,
    wkbj_closed, wkbj_matrix_propagator,
)

logger = structlog.get_logger(__name__)

DEFAULT_WORKERS = 4
EARLY_WINDOW = 0.1


@dataclass
class Table:
    """Header plus rows; a None cell is written empty."""
    header: Tuple[str, ...]
    rows: List[Tuple[Any, ...]]


@dataclass
class PlotSpec:
    """One gnuplot panel: columns of `table` against its first column."""
    table: str
    columns: Tuple[int, ...]
    title: str
    log_y: bool = False


def _peak_rows(peaks: Sequence[Peak], prefix: Tuple[Any, ...] = ()) -> List[Tuple[Any, ...]]:
    return [prefix + (p.frequency, p.height, p.label, p.order) for p in peaks]


def _kind_counts(peaks: Sequence[Peak]) -> Dict[str, int]:
    counts = {kind.value: 0 for kind in LineKind}
    for p in peaks:
        counts[p.kind.value] += 1
    return counts


# ============================================================================
# RESULT RECORDS
# ============================================================================

@dataclass
class JcCompareResult:
    """Per-time amplitude errors of each series order against the exact solution."""
    params: JcParams
    series: str
    times: np.ndarray
    errors: Dict[str, np.ndarray]
    population_errors: Dict[str, Dict[str, float]]
    engine_deviation: Optional[Dict[str, float]] = None
    engine_refine_delta: Optional[float] = None

    experiment = "jc-compare"

    def tables(self) -> Dict[str, Table]:
        header = ("t",) + tuple(self.errors)
        rows = list(zip(self.times, *self.errors.values()))
        return {"jc-compare.csv": Table(header, rows)}

    def plots(self) -> List[PlotSpec]:
        return [PlotSpec("jc-compare.csv", tuple(range(2, len(self.errors) + 2)),
                         f"{self.series} series amplitude error", log_y=True)]

    def get_summary(self) -> Dict[str, Any]:
        p = self.params
        summary: Dict[str, Any] = {
            "series": self.series,
            "detuning": p.detuning,
            "rabi": p.rabi,
            "omega_n": p.omega_n,
            "t_max": float(self.times[-1]),
            "samples": len(self.times),
            "max_error": {k: float(np.max(v)) for k, v in self.errors.items()},
            "population_error": self.population_errors,
        }
        if p.detuning != 0.0:
            summary["lambda"] = p.lam
        if self.engine_deviation is not None:
            summary["engine_deviation"] = self.engine_deviation
            summary["engine_refine_delta"] = self.engine_refine_delta
        return summary


@dataclass
class HhgSpectrumResult:
    """Dipole signal, its spectrum and the classified peaks."""
    params: HhgParams
    init: Populations
    picture: Picture
    times: np.ndarray
    dipole: np.ndarray
    spectrum: SpectrumResult
    peaks: List[Peak]
    cross_check: float
    imag_residual: float
    carrier_removed: bool = False
    rel_threshold: float = 1e-4

    experiment = "hhg-spectrum"

    def tables(self) -> Dict[str, Table]:
        return {
            "hhg-spectrum.csv": Table(("t", "x"), list(zip(self.times, self.dipole))),
            "hhg-spectrum-spectrum.csv": Table(("omega", "power"),
                                               list(zip(self.spectrum.freqs, self.spectrum.power))),
            "hhg-spectrum-peaks.csv": Table(("freq", "height", "kind", "order"), _peak_rows(self.peaks)),
        }

    def plots(self) -> List[PlotSpec]:
        return [PlotSpec("hhg-spectrum.csv", (2,), "dipole x(t)"),
                PlotSpec("hhg-spectrum-spectrum.csv", (2,), "power spectrum", log_y=True)]

    def get_summary(self) -> Dict[str, Any]:
        p = self.params
        return {
            "omega0": p.omega0,
            "omegaL": p.omegaL,
            "field": p.field,
            "dipole": p.dipole,
            "z": p.z,
            "omega0R": p.omega0R,
            "picture": self.picture.value,
            "samples": len(self.times),
            "bin_width": self.spectrum.bin_width,
            "rel_threshold": self.rel_threshold,
            "carrier_removed": self.carrier_removed,
            "peak_count": len(self.peaks),
            "peaks_by_kind": _kind_counts(self.peaks),
            "cross_check": self.cross_check,
            "imag_residual": self.imag_residual,
        }


@dataclass
class WkbjDemoResult:
    """WKBJ solution against the adaptive reference on an output grid."""
    xs: np.ndarray
    psi_wkbj: np.ndarray
    psi_reference: np.ndarray
    matrix_gap: float
    adiabatic_gap: float
    berry_max: float
    tol: float

    experiment = "wkbj-demo"

    @property
    def abs_error(self) -> np.ndarray:
        return np.abs(self.psi_wkbj - self.psi_reference)

    def tables(self) -> Dict[str, Table]:
        rows = list(zip(self.xs, self.psi_wkbj, self.psi_reference, self.abs_error))
        return {"wkbj-demo.csv": Table(("x", "psi_wkbj", "psi_reference", "abs_error"), rows)}

    def plots(self) -> List[PlotSpec]:
        return [PlotSpec("wkbj-demo.csv", (2, 3), "WKBJ and reference solution"),
                PlotSpec("wkbj-demo.csv", (4,), "absolute error", log_y=True)]

    def get_summary(self) -> Dict[str, Any]:
        scale = float(np.max(np.abs(self.psi_reference)))
        return {
            "samples": len(self.xs),
            "x0": float(self.xs[0]),
            "x1": float(self.xs[-1]),
            "tol": self.tol,
            "max_abs_error": float(np.max(self.abs_error)),
            "max_rel_error": float(np.max(self.abs_error)) / scale if scale > 0 else 0.0,
            "matrix_vs_closed": self.matrix_gap,
            "adiabatic_vs_matrix": self.adiabatic_gap,
            "berry_connection_max": self.berry_max,
        }


@dataclass
class SweepPoint:
    value: float
    result: HhgSpectrumResult
    centers: Dict[Tuple[int, int], float]

    def rows(self, orders: Sequence[int]) -> List[Tuple[Any, ...]]:
        p = self.result.params
        w0r, width = p.omega0R, self.result.spectrum.bin_width
        out = []
        for n in orders:
            for sign in (1, -1):
                predicted = abs(w0r + sign * 2 * n * p.omegaL)
                measured = self.centers.get((n, sign))
                deviation = None if measured is None else (measured - predicted) / width
                out.append((self.value, p.z, w0r, n, sign, predicted, measured, deviation))
        return out


@dataclass
class SweepResult:
    """Hyper-Raman line centres against one swept HHG parameter."""
    parameter: str
    orders: Tuple[int, ...]
    points: List[SweepPoint] = field(default_factory=list)

    experiment = "sweep"

    def tables(self) -> Dict[str, Table]:
        rows = [row for point in self.points for row in point.rows(self.orders)]
        peaks = [row for point in self.points for row in _peak_rows(point.result.peaks, (point.value,))]
        return {
            "sweep.csv": Table(("value", "z", "omega0R", "n", "sign", "predicted", "measured",
                                "deviation_bins"), rows),
            "sweep-peaks.csv": Table(("value", "freq", "height", "kind", "order"), peaks),
        }

    def plots(self) -> List[PlotSpec]:
        return [PlotSpec("sweep.csv", (6, 7), "hyper-Raman line centres")]

    def get_summary(self) -> Dict[str, Any]:
        deviations = [row[7] for point in self.points for row in point.rows(self.orders)]
        found = [abs(d) for d in deviations if d is not None]
        return {
            "parameter": self.parameter,
            "values": [point.value for point in self.points],
            "orders": list(self.orders),
            "omega0R": [point.result.params.omega0R for point in self.points],
            "lines_expected": len(deviations),
            "lines_found": len(found),
            "max_deviation_bins": max(found) if found else None,
            "within_one_bin": bool(found) and len(found) == len(deviations) and max(found) <= 1.0,
        }


ExperimentResult = Union[JcCompareResult, HhgSpectrumResult, WkbjDemoResult, SweepResult]


# ============================================================================
# API
# ============================================================================

class DualDysonAPI:
    """
    Dual Dyson series experiments

    This provides a clean interface for:
    - Comparing Dyson and dual series against the exact JC solution
    - Dipole spectra of the two-level harmonic-generation model
    - WKBJ against an adaptive reference solution
    - Sweeping hyper-Raman lines across one laser/atom parameter

    Can be wrapped for MCP or used from the command line.
    """

    def __init__(self, max_workers: int = DEFAULT_WORKERS):
        self.max_workers = max_workers
        self._executor: Optional[ThreadPoolExecutor] = None

    def _ensure_executor(self) -> ThreadPoolExecutor:
        """Lazy initialization of the sweep worker pool"""
        if self._executor is None:
            self._executor = ThreadPoolExecutor(max_workers=self.max_workers,
                                                thread_name_prefix="dds-sweep")
        return self._executor

    def close(self):
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    # =========================================================================
    # JAYNES-CUMMINGS
    # =========================================================================

    @staticmethod
    def choose_series(params: JcParams, series: str = "auto") -> str:
        """'dyson' for |λ| < 1, 'dual' otherwise (and for Δ = 0)."""
        if series != "auto":
            return series
        if params.detuning == 0.0:
            return "dual"
        return "dyson" if abs(params.lam) < 1.0 else "dual"

    def jc_compare(self, params: JcParams, init: JcAmplitudes, grid: TimeGrid,
                   series: str = "auto", engine_check: bool = False) -> JcCompareResult:
        """
        Exact amplitudes against each order of the chosen series.

        Args:
            params: JC sector parameters
            init: Initial amplitudes (c1, c2)
            grid: Output time grid
            series: 'dyson', 'dual' or 'auto'
            engine_check: Also run the numerical series engine and report its
                max-norm deviation from the closed-form propagators

        Returns:
            JcCompareResult
        """
        series = self.choose_series(params, series)
        if series not in ("dyson", "dual"):
            raise ValidationError("series", f"must be dyson, dual or auto, got {series!r}")
        t = grid.times()
        exact = jc_exact(params, init, t)
        early = t <= t[0] + EARLY_WINDOW * (t[-1] - t[0])

        approximations: Dict[str, JcAmplitudes] = {}
        for order in range(3):
            if series == "dyson":
                approximations[f"err_order{order}"] = jc_dyson_closed(params, init, t, order)
            else:
                approximations[f"err_order{order}"] = jc_dual_closed(params, init, t, order)
        if series == "dyson":
            approximations["err_order2_resummed"] = jc_dyson_closed(params, init, t, 2, resummed=True)

        errors = {k: amplitude_error_series(v, exact) for k, v in approximations.items()}
        populations = {}
        for key, approx in approximations.items():
            head = JcAmplitudes(np.asarray(approx.c1)[early], np.asarray(approx.c2)[early])
            head_exact = JcAmplitudes(np.asarray(exact.c1)[early], np.asarray(exact.c2)[early])
            populations[key] = {"early": population_error(head, head_exact),
                                "full": population_error(approx, exact)}

        result = JcCompareResult(params, series, t, errors, populations)
        if engine_check:
            result.engine_deviation, result.engine_refine_delta = self._engine_check(params, grid, series)
        logger.info("jc_compare", series=series, samples=grid.samples,
                    max_error=float(np.max(errors["err_order2"])))
        return result

    @staticmethod
    def _engine_check(params: JcParams, grid: TimeGrid, series: str) -> Tuple[Dict[str, float], float]:
        t = grid.times()

        def h(time: float) -> np.ndarray:
            return jc_sector_hamiltonian(params, time)

        def dyson_closed(order: int) -> np.ndarray:
            columns = [jc_dyson_closed(params, JcAmplitudes(*e), t, order).vector() for e in ((1, 0), (0, 1))]
            return np.stack(columns, axis=-1)

        def dual_closed(order: int) -> np.ndarray:
            return jc_dual_propagator(params, t, order)

        if series == "dyson":
            engine, closed = dyson_propagate(h, grid, 2), dyson_closed
        else:
            engine, closed = dual_dyson_propagate(h, grid, 2), dual_closed
        deviation = {f"order{k}": max_norm(engine.orders[k] - closed(k)) for k in range(3)}
        return deviation, engine.refine_delta

    # =========================================================================
    # HARMONIC GENERATION
    # =========================================================================

    def hhg_spectrum(self, params: HhgParams, init: Populations, grid: TimeGrid,
                     rel_threshold: float = 1e-4, remove_carrier: bool = False,
                     picture: Picture = Picture.SCHRODINGER) -> HhgSpectrumResult:
        """
        First-order dipole x(t), its power spectrum and classified peaks.

        With remove_carrier the analytic ω0R carrier is subtracted before the
        transform (Schrödinger picture only).
        """
        if remove_carrier and picture is not Picture.SCHRODINGER:
            raise ValidationError("spectrum.remove_carrier",
                                  "the analytic carrier exists in the Schrödinger picture only")
        components = dipole_components(params, init, grid)
        values = dipole_expectation(params, init, grid, picture).values
        if remove_carrier:
            values = values - components.carrier
        spectrum = power_spectrum(TimeSeries(grid.spacing, values))
        peaks = classify_lines(detect_peaks(spectrum, rel_threshold), params.omegaL,
                               params.omega0R, spectrum.bin_width)
        result = HhgSpectrumResult(params, init, picture, grid.times(), values, spectrum, peaks,
                                   dipole_cross_check(params, init, grid), components.imag_residual,
                                   remove_carrier, rel_threshold)
        logger.info("hhg_spectrum", z=params.z, omega0R=params.omega0R, peaks=len(peaks),
                    carrier_removed=remove_carrier)
        return result

    def sweep(self, parameter: str, points: Sequence[Tuple[float, HhgParams]], init: Populations,
              grid_for: Callable[[HhgParams], TimeGrid], spectrum: SpectrumSection,
              orders: Sequence[int] = (1, 2)) -> SweepResult:
        """
        Hyper-Raman line centres per sweep point.

        Points run concurrently on the worker pool and are collected in input
        order.
        """
        if not points:
            raise ValidationError("sweep.values", "must not be empty")

        def run_point(point: Tuple[float, HhgParams]) -> SweepPoint:
            value, params = point
            result = self.hhg_spectrum(params, init, grid_for(params), spectrum.rel_threshold,
                                       spectrum.remove_carrier)
            return SweepPoint(value, result, hyper_raman_centers(result.peaks, orders))

        swept = list(self._ensure_executor().map(run_point, points))
        logger.info("sweep", parameter=parameter, points=len(swept))
        return SweepResult(parameter, tuple(orders), swept)

    def renormalized_gap(self, omega0: float, omegaL: float, field: float,
                         dipole: float = 1.0) -> Dict[str, Any]:
        """ω0R = ω0 J0(z) and the first hyper-Raman lines."""
        p = HhgParams(omega0, omegaL, field, dipole)
        w0r = p.omega0R
        return {
            "z": p.z,
            "J0": bessel_j(0, p.z),
            "omega0R": w0r,
            "hyper_raman": {f"n{n}{'+' if s > 0 else '-'}": abs(w0r + s * 2 * n * omegaL)
                            for n in (1, 2) for s in (1, -1)},
        }

    def bessel_identity(self, z: float, points: int = 100,
                        cutoff: Optional[int] = None) -> Dict[str, Any]:
        """Worst residual of the Bessel expansion of e^{iσ1 z sin φ} over φ in [0, 2π)."""
        if points < 1:
            raise ValidationError("points", f"must be positive, got {points}")
        cutoff = int(np.ceil(abs(z) + 20)) if cutoff is None else int(cutoff)
        phis = np.linspace(0.0, 2.0 * np.pi, points, endpoint=False)
        residuals = [bessel_identity_residual(z, phi, cutoff) for phi in phis]
        return {"z": z, "cutoff": cutoff, "points": points, "max_residual": float(max(residuals))}

    # =========================================================================
    # WKBJ
    # =========================================================================

    def wkbj_demo(self, problem: WkbjProblem, samples: int = 201, tol: float = 1e-10) -> WkbjDemoResult:
        """WKBJ closed form, matrix propagator and reference solution on `samples` points."""
        if samples < 2:
            raise ValidationError("grid.samples", f"need at least 2 points, got {samples}")
        xs = np.linspace(problem.x0, problem.x1, samples)
        psi = np.real(wkbj_closed(problem, xs))
        reference, _ = reference_solve(problem, xs, tol)
        matrix = wkbj_matrix_propagator(problem, xs)
        from_matrix = (matrix @ problem.initial)[..., 0]
        adiabatic = wkbj_adiabatic_propagator(problem, xs)
        berry = wkbj_berry_connections(problem, xs)
        result = WkbjDemoResult(xs, psi, np.real(reference), float(np.max(np.abs(from_matrix - psi))),
                                max_norm(adiabatic - matrix), float(np.max(np.abs(berry))), tol)
        logger.info("wkbj_demo", samples=samples, max_abs_error=float(np.max(result.abs_error)))
        return result

    # =========================================================================
    # DISPATCH AND EXPORT
    # =========================================================================

    def run(self, config: RunConfig) -> ExperimentResult:
        """Run the experiment a validated configuration describes."""
        logger.info("run", experiment=config.experiment)
        if config.experiment == "jc-compare":
            return self.jc_compare(config.jc_params(), config.jc_amplitudes(), config.jc_grid(),
                                   config.series, config.engine_check)
        if config.experiment == "hhg-spectrum":
            return self.hhg_spectrum(config.hhg_params(), config.populations(), config.hhg_grid(),
                                     config.spectrum.rel_threshold, config.spectrum.remove_carrier,
                                     config.picture)
        if config.experiment == "wkbj-demo":
            return self.wkbj_demo(config.wkbj.problem(), config.grid.samples, config.tol)
        if config.experiment == "sweep":
            return self.sweep(config.sweep.parameter, config.sweep_points(), config.populations(),
                              config.hhg_grid, config.spectrum, config.sweep.orders)
        raise ValidationError("experiment", f"unknown experiment {config.experiment!r}")

    def run_document(self, document: Dict[str, Any]) -> ExperimentResult:
        """Parse a configuration dict and run it."""
        return self.run(parse_config(json.dumps(document)))

    @staticmethod
    def report(result: ExperimentResult, config: Optional[RunConfig] = None,
               seedless: bool = False) -> Dict[str, Any]:
        """JSON-ready config echo plus summary scalars."""
        doc: Dict[str, Any] = {"experiment": result.experiment, "summary": result.get_summary(),
                               "seedless": seedless}
        if config is not None:
            doc["config"] = config.to_dict()
        check_finite(doc)
        return doc

    def export_json(self, result: ExperimentResult, filepath: Union[str, Path],
                    config: Optional[RunConfig] = None, seedless: bool = False):
        """Write the report to a JSON file"""
        doc = self.report(result, config, seedless)
        try:
            with open(filepath, "w", encoding="utf-8") as f:
                json.dump(doc, f, indent=2, sort_keys=True, allow_nan=False)
                f.write("\n")
        except OSError as e:
            raise OutputError(f"cannot write {filepath}: {e}") from e


def check_finite(value: Any, where: str = "summary"):
    """Reject NaN and infinities anywhere inside a JSON-ready value."""
    if isinstance(value, dict):
        for k, v in value.items():
            check_finite(v, f"{where}.{k}")
    elif isinstance(value, (list, tuple)):
        for i, v in enumerate(value):
            check_finite(v, f"{where}[{i}]")
    elif isinstance(value, float) and not np.isfinite(value):
        raise NumericalError(f"non-finite value at {where}")
