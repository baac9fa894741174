#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Two-Level HHG Model Tests
=========================

Hamiltonians, Bessel machinery, the first-order state and the dipole signal.
"""

import numpy as np
import pytest

from dds_errors import CutoffTooSmall, OrderTooLarge, ValidationError
from dds_hhg import (
    HhgParams, Picture, Populations, analytic_lines, bessel_identity_residual, bessel_j,
    bessel_terms, dipole_components, dipole_cross_check, dipole_expectation, dipole_leading_order,
    hhg_dressed_states, hhg_dual_hamiltonian, hhg_interaction_hamiltonian, hhg_leading_propagator,
    hhg_schrodinger_hamiltonian, hhg_state_first_order, renormalized_gap,
)
from dds_linalg import is_hermitian, is_unitary, max_norm
from dds_series import TimeGrid, dual_dyson_propagate, propagate_exact
from dds_spectrum import LineKind

GROUND = Populations(1.0, 0.0)
EQUAL = Populations(np.sqrt(0.5), np.sqrt(0.5))
MIXED = Populations(np.sqrt(0.8), 1j * np.sqrt(0.2))


# ============================================================================
# PARAMETERS
# ============================================================================

def test_params_from_z():
    p = HhgParams.from_z(1.5, omega0=0.1, omegaL=2.0, dipole=0.5)
    assert np.isclose(p.z, 1.5)
    assert np.isclose(p.coupling, 1.5)
    assert np.isclose(p.period, np.pi)
    assert np.isclose(p.omega0R, 0.1 * bessel_j(0, 1.5))


def test_params_validation():
    with pytest.raises(ValidationError):
        HhgParams(0.1, 0.0, 1.0, 1.0)
    with pytest.raises(ValidationError):
        HhgParams(float("nan"), 1.0, 1.0, 1.0)


def test_populations_must_be_normalized():
    with pytest.raises(ValidationError):
        Populations(1.0, 1.0)
    assert np.allclose(MIXED.vector(), [1j * np.sqrt(0.2), np.sqrt(0.8)]), "vector is (c2, c1)"


# ============================================================================
# HAMILTONIANS
# ============================================================================

def test_hamiltonians_are_hermitian():
    p = HhgParams.from_z(1.5, omega0=0.3)
    t = np.linspace(0.0, 7.0, 15)
    for stack in (hhg_schrodinger_hamiltonian(p, t), hhg_interaction_hamiltonian(p, t),
                  hhg_dual_hamiltonian(p, t)):
        assert all(is_hermitian(h) for h in stack)


def test_dressed_states_are_eigenvectors():
    p = HhgParams.from_z(2.0, omega0=0.2)
    for t in (0.0, 0.4, 2.9):
        a, b = hhg_dressed_states(p, t)
        h = hhg_interaction_hamiltonian(p, t)
        e = p.coupling * np.cos(p.omegaL * t)
        assert np.allclose(h @ a, -e * a)
        assert np.allclose(h @ b, e * b)


def test_leading_propagator_is_unitary():
    p = HhgParams.from_z(1.5, omega0=0.1)
    t = np.linspace(0.0, 3.0 * p.period, 37)
    for picture in Picture:
        u = hhg_leading_propagator(p, t, picture)
        assert np.allclose(u[0], np.eye(2))
        assert all(is_unitary(m, 1e-12) for m in u)


def test_dual_hamiltonian_has_bare_gap():
    p = HhgParams.from_z(3.0, omega0=0.4)
    for h in hhg_dual_hamiltonian(p, np.linspace(0.0, 5.0, 11)):
        assert np.allclose(np.linalg.eigvalsh(h), [-0.2, 0.2])


def test_engine_reproduces_leading_propagator():
    """Tracked frames of the interaction Hamiltonian over a laser period, through both zeros of cos ω_L t"""
    p = HhgParams.from_z(1.5, omega0=0.1)
    grid = TimeGrid(0.0, p.period, 4096)
    series = dual_dyson_propagate(lambda t: hhg_interaction_hamiltonian(p, t), grid, 0)
    assert max_norm(series.orders[0] - hhg_leading_propagator(p, grid.times())) < 1e-8


def test_engine_first_order_matches_closed_form():
    print("=" * 80)
    print("TEST: ENGINE DUAL ORDER 1 VS CLOSED FORM")
    print("=" * 80)
    p = HhgParams.from_z(1.5, omega0=0.1)
    grid = TimeGrid(0.0, p.period, 4096)
    series = dual_dyson_propagate(lambda t: hhg_interaction_hamiltonian(p, t), grid, 1)
    numeric = series.apply(1, MIXED.vector())
    closed = hhg_state_first_order(p, MIXED, grid.times(), renormalized=False,
                                   picture=Picture.INTERACTION)
    gap = float(np.max(np.abs(numeric - closed)))
    print(f"  max gap: {gap:.3e}")
    assert gap < 1e-6


# ============================================================================
# BESSEL FUNCTIONS
# ============================================================================

def test_bessel_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert abs(bessel_j(0, 2.404825557695773)) < 1e-12, "first zero of J0"
    with pytest.raises(ValidationError):
        bessel_j(-1, 1.0)
    with pytest.raises(OrderTooLarge):
        bessel_j(65, 1.0)


def test_bessel_terms_tail():
    j = bessel_terms(1.5)
    assert len(j) - 1 > 1.5 + 10
    assert abs(j[-1]) < 1e-14
    with pytest.raises(OrderTooLarge):
        bessel_terms(60.0)


def test_bessel_identity():
    """e^{iσ1 z sin φ} against its Bessel expansion"""
    for z in (0.5, 1.5, 4.0):
        worst = max(bessel_identity_residual(z, phi, int(np.ceil(z + 20)))
                    for phi in np.linspace(0.0, 2.0 * np.pi, 100))
        assert worst < 1e-12, f"z={z}: residual {worst:.2e}"
    with pytest.raises(CutoffTooSmall):
        bessel_identity_residual(1.5, 0.3, 5)


def test_renormalized_gap_vanishes_at_bessel_zero():
    p = HhgParams.from_z(2.404825557695773, omega0=0.1)
    assert abs(renormalized_gap(p)) < 1e-12


# ============================================================================
# FIRST ORDER STATE
# ============================================================================

def test_first_order_state_starts_at_initial_value():
    p = HhgParams.from_z(1.5, omega0=0.1)
    for renormalized in (True, False):
        for picture in Picture:
            s = hhg_state_first_order(p, MIXED, 0.0, renormalized, picture)
            assert np.allclose(s, MIXED.vector())


def test_first_order_state_beats_leading_order():
    print("=" * 80)
    print("TEST: FIRST ORDER STATE VS ODE")
    print("=" * 80)
    p = HhgParams.from_z(1.5, omega0=0.05)
    grid = TimeGrid(0.0, 4.0 * np.pi, 2049)
    exact = propagate_exact(lambda t: hhg_schrodinger_hamiltonian(p, t), grid) @ MIXED.vector()
    first = hhg_state_first_order(p, MIXED, grid.times())
    leading = hhg_leading_propagator(p, grid.times(), Picture.SCHRODINGER) @ MIXED.vector()
    err_first = float(np.max(np.abs(first - exact)))
    err_leading = float(np.max(np.abs(leading - exact)))
    print(f"  leading: {err_leading:.3e}  first: {err_first:.3e}")
    assert err_first < 0.25 * err_leading


def test_first_order_state_defaults():
    """Defaults are the renormalized state in the Schrödinger picture"""
    p = HhgParams.from_z(1.5, omega0=0.1)
    t = np.linspace(0.0, 30.0, 61)
    default = hhg_state_first_order(p, MIXED, t)
    assert np.array_equal(default, hhg_state_first_order(p, MIXED, t, True, Picture.SCHRODINGER))
    raw = hhg_state_first_order(p, MIXED, t, renormalized=False)
    assert np.max(np.abs(default - raw)) > 1e-3


def test_picture_changes_only_phases():
    p = HhgParams.from_z(1.5, omega0=0.1)
    t = np.linspace(0.0, 20.0, 41)
    s = hhg_state_first_order(p, MIXED, t, picture=Picture.SCHRODINGER)
    i = hhg_state_first_order(p, MIXED, t, picture=Picture.INTERACTION)
    assert np.allclose(np.abs(s), np.abs(i))


# ============================================================================
# DIPOLE SIGNAL
# ============================================================================

def test_dipole_components_by_initial_state():
    p = HhgParams.from_z(1.5, omega0=0.1)
    t = np.linspace(0.0, 50.0, 501)
    ground = dipole_components(p, GROUND, t)
    assert np.allclose(ground.carrier, 0.0) and np.allclose(ground.hyper_raman, 0.0)
    assert np.max(np.abs(ground.odd)) > 1e-3
    assert ground.imag_residual < 1e-12
    equal = dipole_components(p, EQUAL, t)
    assert np.allclose(equal.odd, 0.0)
    assert np.isclose(equal.carrier[0], -1.0), "x(0) carrier = -2 d Re(c1 c2*)"
    assert equal.imag_residual < 1e-12


def test_dipole_cross_check_is_second_order():
    t = np.linspace(0.0, 8.0 * np.pi, 801)
    gaps = [dipole_cross_check(HhgParams.from_z(1.5, omega0=w), MIXED, t) for w in (0.04, 0.02)]
    print(f"  cross-check gaps: {gaps}")
    assert gaps[0] < 0.05
    assert gaps[0] / gaps[1] > 3.0, "halving ω0 should quarter the gap"


def test_leading_order_dipole_is_constant():
    p = HhgParams.from_z(1.5, omega0=0.1)
    x = dipole_leading_order(p, EQUAL, np.linspace(0.0, 30.0, 301))
    assert np.allclose(x, -1.0)


def test_dipole_expectation_series():
    p = HhgParams.from_z(1.5, omega0=0.1)
    grid = TimeGrid(0.0, 63.0 * p.period / 64.0, 64)
    for picture in Picture:
        series = dipole_expectation(p, MIXED, grid, picture)
        assert len(series) == 64
        assert np.isclose(series.dt, grid.spacing)
        assert np.all(np.isfinite(series.values))


def test_analytic_lines():
    p = HhgParams.from_z(1.5, omega0=0.1)
    ground = analytic_lines(p, GROUND, 20.0)
    assert ground and all(line.kind is LineKind.ODD_HARMONIC for line in ground)
    assert all(line.order % 2 == 1 and np.isclose(line.frequency, line.order) for line in ground)
    equal = analytic_lines(p, EQUAL, 20.0)
    kinds = {line.kind for line in equal}
    assert kinds == {LineKind.RENORMALIZED_GAP, LineKind.HYPER_RAMAN}
    gap = next(line for line in equal if line.kind is LineKind.RENORMALIZED_GAP)
    assert np.isclose(gap.frequency, abs(p.omega0R)) and np.isclose(gap.amplitude, 1.0)
    freqs = [line.frequency for line in equal]
    assert freqs == sorted(freqs) and max(freqs) <= 20.0


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
