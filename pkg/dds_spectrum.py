#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dipole Power Spectrum and Line Classification
=============================================

One-sided power spectrum of a real, uniformly sampled signal (rectangular
window, angular frequencies), peak detection with sub-bin refinement, and
classification of peaks against the two-level harmonic-generation line set:

    odd harmonics      (2n+1) ω_L
    renormalized gap   ω0R
    hyper-Raman        |ω0R ± 2n ω_L|,  n >= 1
"""

from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple

import numpy as np
import structlog
from scipy.signal import find_peaks

from dds_errors import BadLength, EmptySpectrum, ValidationError

logger = structlog.get_logger(__name__)

DEFAULT_REL_THRESHOLD = 1e-4


class LineKind(Enum):
    ODD_HARMONIC = "odd-harmonic"
    RENORMALIZED_GAP = "renormalized-gap"
    HYPER_RAMAN = "hyper-raman"
    UNCLASSIFIED = "unclassified"


# preference when two lines are equally close
_PRIORITY = {LineKind.ODD_HARMONIC: 0, LineKind.RENORMALIZED_GAP: 1, LineKind.HYPER_RAMAN: 2}


@dataclass
class TimeSeries:
    dt: float
    values: np.ndarray

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if not (np.isfinite(self.dt) and self.dt > 0):
            raise ValidationError("dt", f"sample spacing must be positive, got {self.dt}")
        if self.values.ndim != 1 or len(self.values) < 2:
            raise BadLength(f"a time series needs at least 2 samples, got {self.values.shape}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def times(self) -> np.ndarray:
        return self.dt * np.arange(len(self.values))


@dataclass
class SpectrumResult:
    freqs: np.ndarray
    power: np.ndarray
    bin_width: float
    amplitudes: Optional[np.ndarray] = None

    def __len__(self) -> int:
        return len(self.freqs)


@dataclass
class Peak:
    frequency: float
    height: float
    bin_index: int
    kind: LineKind = LineKind.UNCLASSIFIED
    order: int = 0
    sign: int = 0

    @property
    def label(self) -> str:
        if self.kind is LineKind.HYPER_RAMAN:
            return f"{self.kind.value}{'+' if self.sign > 0 else '-'}"
        return self.kind.value


# ============================================================================
# SPECTRUM
# ============================================================================

def power_spectrum(series: TimeSeries) -> SpectrumResult:
    """
    P_k = w_k |X_k|² / N² with w = 1 at DC and Nyquist, 2 elsewhere.

    The normalization makes Σ P_k equal to the mean square of the signal.
    """
    n = len(series.values)
    if n < 2 or n & (n - 1):
        raise BadLength(f"spectrum length must be a power of two >= 2, got {n}")
    amplitudes = np.fft.rfft(series.values)
    weights = np.full(len(amplitudes), 2.0)
    weights[0] = 1.0
    weights[-1] = 1.0
    power = weights * np.abs(amplitudes) ** 2 / n ** 2
    freqs = 2.0 * np.pi * np.fft.rfftfreq(n, series.dt)
    return SpectrumResult(freqs, power, 2.0 * np.pi / (n * series.dt), amplitudes)


def line_amplitude_at(spec: SpectrumResult, frequency: float) -> float:
    """Cosine amplitude of the bin nearest to `frequency`."""
    k = int(np.clip(np.rint(frequency / spec.bin_width), 0, len(spec.power) - 1))
    return float(np.sqrt(2.0 * spec.power[k]))


# ============================================================================
# PEAKS
# ============================================================================

def _refine(spec: SpectrumResult, k: int) -> float:
    """Sub-bin offset of a peak at bin k, in bins."""
    if k <= 0 or k >= len(spec.power) - 1:
        return 0.0
    if spec.amplitudes is not None:
        lo, mid, hi = spec.amplitudes[k - 1:k + 2]
        denom = 2.0 * mid - lo - hi
        if denom != 0:
            return float(np.clip(np.real((lo - hi) / denom), -0.5, 0.5))
    p = spec.power[k - 1:k + 2]
    if np.any(p <= 0):
        return 0.0
    lo, mid, hi = np.log(p)
    denom = lo - 2.0 * mid + hi
    if denom == 0:
        return 0.0
    return float(np.clip(0.5 * (lo - hi) / denom, -0.5, 0.5))


def detect_peaks(spec: SpectrumResult, rel_threshold: float = DEFAULT_REL_THRESHOLD) -> List[Peak]:
    """
    Strict interior local maxima above rel_threshold × global maximum; flat
    tops of two or more bins are skipped.

    Frequencies are refined with a three-point interpolation on the complex
    spectrum (exact for an off-bin tone under a rectangular window), or on
    the log power when no complex amplitudes are stored.
    """
    if len(spec.power) == 0:
        raise EmptySpectrum("cannot detect peaks in an empty spectrum")
    if not 0.0 < rel_threshold <= 1.0:
        raise ValidationError("rel_threshold", f"must lie in (0, 1], got {rel_threshold}")
    top = float(np.max(spec.power))
    if top <= 0.0:
        return []
    indices, _ = find_peaks(spec.power, height=rel_threshold * top, plateau_size=(1, 1))
    peaks = [Peak(float(spec.freqs[k] + _refine(spec, int(k)) * spec.bin_width),
                  float(spec.power[k]), int(k)) for k in indices]
    logger.debug("detect_peaks", count=len(peaks), threshold=rel_threshold)
    return peaks


def _candidates(frequency: float, omega_l: float, omega0r: float) -> Iterable[Tuple[float, LineKind, int, int]]:
    n = max(0, int(np.rint((frequency / omega_l - 1.0) / 2.0)))
    yield (2 * n + 1) * omega_l, LineKind.ODD_HARMONIC, 2 * n + 1, 0
    yield abs(omega0r), LineKind.RENORMALIZED_GAP, 0, 0
    for sign in (1, -1):
        # |ω0R + s·2nω_L| = f  =>  n ≈ ±(f ∓ ω0R)/(2ω_L), checked on both branches
        for target in (frequency, -frequency):
            n = int(np.rint((target - omega0r) / (2.0 * sign * omega_l)))
            if n >= 1:
                yield abs(omega0r + sign * 2 * n * omega_l), LineKind.HYPER_RAMAN, n, sign


def classify_lines(peaks: List[Peak], omega_l: float, omega0r: float, bin_width: float) -> List[Peak]:
    """Tag each peak with the nearest line within one bin; others stay unclassified."""
    if omega_l <= 0:
        raise ValidationError("omegaL", f"must be positive, got {omega_l}")
    result = []
    for peak in peaks:
        best = None
        for line, kind, order, sign in _candidates(peak.frequency, omega_l, omega0r):
            distance = abs(peak.frequency - line)
            if distance > bin_width:
                continue
            key = (distance, _PRIORITY[kind])
            if best is None or key < best[0]:
                best = (key, kind, order, sign)
        if best is None:
            result.append(replace(peak, kind=LineKind.UNCLASSIFIED, order=0, sign=0))
        else:
            result.append(replace(peak, kind=best[1], order=best[2], sign=best[3]))
    return sorted(result, key=lambda p: p.frequency)


def hyper_raman_centers(peaks: List[Peak], orders: Iterable[int] = (1, 2)) -> Dict[Tuple[int, int], float]:
    """Refined centre of the strongest hyper-Raman peak per (n, sign)."""
    wanted = set(orders)
    best: Dict[Tuple[int, int], Peak] = {}
    for p in peaks:
        if p.kind is not LineKind.HYPER_RAMAN or p.order not in wanted:
            continue
        key = (p.order, p.sign)
        if key not in best or p.height > best[key].height:
            best[key] = p
    return {k: v.frequency for k, v in best.items()}
