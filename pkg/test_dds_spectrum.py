#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Spectrum Tests
==============
"""

import numpy as np
import pytest

from dds_errors import BadLength, EmptySpectrum, ValidationError
from dds_spectrum import (
    LineKind, Peak, SpectrumResult, TimeSeries, classify_lines, detect_peaks,
    hyper_raman_centers, line_amplitude_at, power_spectrum,
)


def _tone(freq: float, amp: float = 1.0, n: int = 4096, dt: float = 0.05) -> TimeSeries:
    t = dt * np.arange(n)
    return TimeSeries(dt, amp * np.cos(freq * t))


def test_time_series_validation():
    with pytest.raises(ValidationError):
        TimeSeries(0.0, np.zeros(8))
    with pytest.raises(BadLength):
        TimeSeries(0.1, np.zeros(1))
    assert np.allclose(TimeSeries(0.5, np.zeros(4)).times, [0.0, 0.5, 1.0, 1.5])


def test_power_spectrum_parseval():
    """Σ P_k equals the mean square of the samples"""
    rng = np.random.default_rng(3)
    series = TimeSeries(0.1, rng.normal(size=1024))
    spec = power_spectrum(series)
    assert np.isclose(np.sum(spec.power), np.mean(series.values ** 2), rtol=1e-12)
    assert len(spec) == 513
    assert np.isclose(spec.bin_width, 2.0 * np.pi / (1024 * 0.1))


def test_power_spectrum_needs_power_of_two():
    with pytest.raises(BadLength):
        power_spectrum(TimeSeries(0.1, np.zeros(1000)))


def test_on_bin_tone_amplitude():
    n, dt = 4096, 0.05
    bin_width = 2.0 * np.pi / (n * dt)
    spec = power_spectrum(_tone(200 * bin_width, 0.7, n, dt))
    assert np.isclose(line_amplitude_at(spec, 200 * bin_width), 0.7)
    assert line_amplitude_at(spec, 300 * bin_width) < 1e-10


def test_peak_refinement_for_off_bin_tone():
    print("=" * 80)
    print("TEST: SUB-BIN PEAK REFINEMENT")
    print("=" * 80)
    n, dt = 4096, 0.05
    bin_width = 2.0 * np.pi / (n * dt)
    for offset in (0.13, 0.37, -0.29):
        freq = (700 + offset) * bin_width
        peaks = detect_peaks(power_spectrum(_tone(freq, 1.0, n, dt)), rel_threshold=0.5)
        assert len(peaks) == 1
        error = abs(peaks[0].frequency - freq) / bin_width
        print(f"  offset {offset:+.2f}: error {error:.2e} bins")
        assert error < 0.01


def test_log_power_refinement_without_amplitudes():
    freqs = np.arange(8.0)
    power = np.exp(-0.5 * (freqs - 3.25) ** 2)
    peaks = detect_peaks(SpectrumResult(freqs, power, 1.0), rel_threshold=0.1)
    assert len(peaks) == 1 and np.isclose(peaks[0].frequency, 3.25)


def test_detect_peaks_threshold_and_errors():
    n, dt = 2048, 0.05
    bin_width = 2.0 * np.pi / (n * dt)
    t = dt * np.arange(n)
    # on-bin tones, no leakage
    series = TimeSeries(dt, np.cos(49 * bin_width * t) + 1e-3 * np.cos(147 * bin_width * t))
    spec = power_spectrum(series)
    assert [p.bin_index for p in detect_peaks(spec, rel_threshold=1e-3)] == [49]
    assert [p.bin_index for p in detect_peaks(spec, rel_threshold=1e-8)] == [49, 147]
    with pytest.raises(ValidationError):
        detect_peaks(spec, rel_threshold=0.0)
    with pytest.raises(EmptySpectrum):
        detect_peaks(SpectrumResult(np.array([]), np.array([]), 1.0))
    assert detect_peaks(SpectrumResult(np.arange(4.0), np.zeros(4), 1.0)) == []


def test_flat_tops_are_not_peaks():
    freqs = np.arange(9.0)
    power = np.array([0.0, 1.0, 3.0, 3.0, 1.0, 0.5, 2.0, 0.5, 0.0])
    peaks = detect_peaks(SpectrumResult(freqs, power, 1.0), rel_threshold=0.1)
    assert [p.bin_index for p in peaks] == [6]


def test_classify_lines():
    omega_l, omega0r, width = 1.0, 0.05, 0.01
    peaks = [Peak(3.001, 1.0, 10), Peak(0.05, 1.0, 2), Peak(2.05, 1.0, 8), Peak(3.95, 1.0, 12),
             Peak(1.5, 1.0, 6)]
    out = classify_lines(peaks, omega_l, omega0r, width)
    kinds = [(p.frequency, p.kind, p.order, p.sign) for p in out]
    assert kinds == [
        (0.05, LineKind.RENORMALIZED_GAP, 0, 0),
        (1.5, LineKind.UNCLASSIFIED, 0, 0),
        (2.05, LineKind.HYPER_RAMAN, 1, 1),
        (3.001, LineKind.ODD_HARMONIC, 3, 0),
        (3.95, LineKind.HYPER_RAMAN, 2, -1),
    ]
    assert out[2].label == "hyper-raman+" and out[4].label == "hyper-raman-"
    with pytest.raises(ValidationError):
        classify_lines(peaks, 0.0, omega0r, width)


def test_classify_tie_prefers_odd_harmonic():
    """ω0R = 1 puts the gap line on top of the first harmonic"""
    out = classify_lines([Peak(1.0, 1.0, 4)], 1.0, 1.0, 0.01)
    assert out[0].kind is LineKind.ODD_HARMONIC


def test_hyper_raman_centers_keep_strongest():
    peaks = [
        Peak(2.05, 0.2, 1, LineKind.HYPER_RAMAN, 1, 1),
        Peak(2.06, 0.5, 2, LineKind.HYPER_RAMAN, 1, 1),
        Peak(1.95, 0.3, 3, LineKind.HYPER_RAMAN, 1, -1),
        Peak(6.05, 0.3, 4, LineKind.HYPER_RAMAN, 3, 1),
        Peak(3.0, 9.0, 5, LineKind.ODD_HARMONIC, 3),
    ]
    centers = hyper_raman_centers(peaks)
    assert centers == {(1, 1): 2.06, (1, -1): 1.95}


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
