#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Jaynes-Cummings Model Tests
===========================

Exact sector dynamics, the λ expansion with and without resummation and the
1/λ operator expansion.
"""

import numpy as np
import pytest

from dds_errors import ValidationError, ZeroCoupling, ZeroDetuning
from dds_jc import (
    JcAmplitudes, JcParams, amplitude_error_series, jc_berry_connections, jc_dressed_states,
    jc_dual_closed, jc_dual_hamiltonian_closed, jc_dual_propagator, jc_dyson_closed, jc_exact,
    jc_exact_propagator, jc_first_correction, jc_leading_propagator, jc_second_correction,
    jc_sector_hamiltonian, max_amplitude_error, population_error,
)
from dds_linalg import is_hermitian, is_unitary, max_norm, pauli
from dds_series import TimeGrid, propagate_exact


MIXED = JcAmplitudes(np.sqrt(0.3), 1j * np.sqrt(0.7))


# ============================================================================
# PARAMETERS
# ============================================================================

def test_params_derived_quantities():
    p = JcParams(omega=1.0, omega0=1.5, g=0.1, n=3)
    assert np.isclose(p.detuning, 0.5)
    assert np.isclose(p.coupling, 0.2), "G = g√(n+1)"
    assert np.isclose(p.rabi, 0.4)
    assert np.isclose(p.omega_n, np.hypot(0.5, 0.4))
    assert np.isclose(p.lam, 0.8)


def test_params_from_ratio():
    p = JcParams.from_ratio(0.25, rabi=2.0, n=1)
    assert np.isclose(p.lam, 0.25)
    assert np.isclose(p.rabi, 2.0)
    assert np.isclose(p.detuning, 8.0)
    with pytest.raises(ZeroCoupling):
        JcParams.from_ratio(0.0)


def test_params_validation():
    with pytest.raises(ValidationError):
        JcParams(1.0, 1.0, 0.1, n=-1)
    with pytest.raises(ValidationError):
        JcParams(1.0, 1.0, 0.1, n=1.5)
    with pytest.raises(ValidationError):
        JcParams(1.0, float("nan"), 0.1)
    with pytest.raises(ZeroDetuning):
        JcParams(1.0, 1.0, 0.1).lam


# ============================================================================
# EXACT SOLUTION
# ============================================================================

def test_exact_matches_ode_integration():
    print("=" * 80)
    print("TEST: EXACT JC AMPLITUDES VS ODE")
    print("=" * 80)
    p = JcParams(omega=1.0, omega0=1.7, g=0.23, n=2)
    grid = TimeGrid(0.0, 20.0 * np.pi / p.omega_n, 401)
    u = propagate_exact(lambda t: jc_sector_hamiltonian(p, t), grid)
    numeric = JcAmplitudes.from_vector(u @ MIXED.vector())
    err = max_amplitude_error(jc_exact(p, MIXED, grid.times()), numeric)
    print(f"  max amplitude error: {err:.3e}")
    assert err < 1e-9


def test_exact_initial_value_and_norm():
    p = JcParams(1.0, 1.3, 0.4)
    t = np.linspace(0.0, 30.0, 301)
    c = jc_exact(p, MIXED, t)
    assert np.isclose(c.c1[0], MIXED.c1) and np.isclose(c.c2[0], MIXED.c2)
    assert np.allclose(c.norm(), 1.0, atol=1e-13)


def test_exact_resonant_rabi_flop():
    """At Δ = 0 the population swaps completely after t = π/R_n"""
    p = JcParams(1.0, 1.0, 0.5)
    c = jc_exact(p, JcAmplitudes(1.0, 0.0), np.pi / p.rabi)
    assert abs(c.c1) < 1e-12 and np.isclose(abs(c.c2), 1.0)


def test_exact_without_coupling_or_detuning_is_frozen():
    c = jc_exact(JcParams(1.0, 1.0, 0.0), MIXED, np.array([0.0, 5.0]))
    assert np.allclose(c.c1, MIXED.c1) and np.allclose(c.c2, MIXED.c2)


def test_exact_propagator_is_unitary():
    p = JcParams(1.0, 2.1, 0.3, n=1)
    for u in jc_exact_propagator(p, np.linspace(0.0, 40.0, 41)):
        assert is_unitary(u, 1e-12)


def test_dressed_states_are_eigenvectors():
    p = JcParams(1.0, 1.4, 0.35)
    for t in (0.0, 0.9, 7.3):
        a, b = jc_dressed_states(p, t)
        h = jc_sector_hamiltonian(p, t)
        assert np.allclose(h @ a, p.coupling * a)
        assert np.allclose(h @ b, -p.coupling * b)
    assert np.allclose(jc_berry_connections(p), (0.2, -0.2))


# ============================================================================
# DYSON SIDE
# ============================================================================

def test_dyson_order_zero_is_initial_state():
    p = JcParams.from_ratio(0.1)
    c = jc_dyson_closed(p, MIXED, np.linspace(0.0, 3.0, 7), 0)
    assert np.allclose(c.c1, MIXED.c1) and np.allclose(c.c2, MIXED.c2)


def test_dyson_orders_improve_for_small_lambda():
    p = JcParams.from_ratio(0.05)
    t = np.linspace(0.0, 2.0 * np.pi / p.detuning * 5, 501)
    exact = jc_exact(p, MIXED, t)
    errors = [max_amplitude_error(jc_dyson_closed(p, MIXED, t, k), exact) for k in range(3)]
    assert errors[0] > errors[1] > errors[2], f"orders should improve: {errors}"


def test_resummation_only_changes_second_order():
    p = JcParams.from_ratio(0.2)
    t = np.linspace(0.0, 10.0, 101)
    for order in (0, 1):
        a = jc_dyson_closed(p, MIXED, t, order)
        b = jc_dyson_closed(p, MIXED, t, order, resummed=True)
        assert max_amplitude_error(a, b) == 0.0
    a = jc_dyson_closed(p, MIXED, t, 2)
    b = jc_dyson_closed(p, MIXED, t, 2, resummed=True)
    assert max_amplitude_error(a, b) > 1e-3


def test_unresummed_second_order_is_secular():
    """The t-linear term makes the unresummed population error grow; resummation keeps it bounded"""
    print("=" * 80)
    print("TEST: SECULAR TERM")
    print("=" * 80)
    p = JcParams.from_ratio(0.1)
    # windows Δt = 20 and Δt = 200
    short = np.linspace(0.0, 20.0 / p.detuning, 2001)
    long = np.linspace(0.0, 200.0 / p.detuning, 20001)
    growth = {}
    for resummed in (False, True):
        errs = [population_error(jc_dyson_closed(p, MIXED, t, 2, resummed), jc_exact(p, MIXED, t))
                for t in (short, long)]
        growth[resummed] = errs[1] / errs[0]
        print(f"  resummed={resummed}: {errs[0]:.3e} -> {errs[1]:.3e}")
    assert growth[False] >= 5.0
    assert growth[True] < 1.5


def test_dyson_needs_detuning():
    with pytest.raises(ZeroDetuning):
        jc_dyson_closed(JcParams(1.0, 1.0, 0.2), MIXED, 1.0, 1)
    with pytest.raises(ValidationError):
        jc_dyson_closed(JcParams.from_ratio(0.1), MIXED, 1.0, 3)


# ============================================================================
# DUAL SIDE
# ============================================================================

def test_leading_propagator_is_unitary_and_starts_at_identity():
    p = JcParams.from_ratio(7.0)
    u = jc_leading_propagator(p, np.linspace(0.0, 25.0, 51))
    assert np.allclose(u[0], np.eye(2))
    assert all(is_unitary(m, 1e-12) for m in u)


def test_dual_orders_improve_for_large_lambda():
    p = JcParams.from_ratio(10.0)
    t = np.linspace(0.0, 4.0 * np.pi, 401)
    exact = jc_exact_propagator(p, t)
    errors = [max_norm(jc_dual_propagator(p, t, k) - exact) for k in range(3)]
    assert errors[0] > errors[1] > errors[2], f"orders should improve: {errors}"


def test_second_correction_diagonal_sign():
    """U2 carries -τ sin τ/(2λ²) on its diagonal; the flipped sign is worse"""
    p = JcParams.from_ratio(40.0)
    t = np.linspace(0.0, 6.0 * np.pi, 301)
    exact = jc_exact_propagator(p, t)
    base = jc_leading_propagator(p, t) + jc_first_correction(p, t)
    u2 = jc_second_correction(p, t)
    flipped = u2.copy()
    tau = 0.5 * p.rabi * t
    w = 0.5 / p.lam ** 2
    phase = np.exp(-0.5j * p.detuning * t)
    flipped[:, 0, 0] += 2.0 * w * tau * np.sin(tau) * phase
    flipped[:, 1, 1] += 2.0 * w * tau * np.sin(tau) * np.conj(phase)
    assert max_norm(base + u2 - exact) < 0.1 * max_norm(base + flipped - exact)


def test_dual_closed_applies_operators():
    p = JcParams.from_ratio(5.0)
    t = np.linspace(0.0, 3.0, 31)
    c = jc_dual_closed(p, MIXED, t, 2)
    direct = jc_dual_propagator(p, t, 2) @ MIXED.vector()
    assert np.allclose(c.vector(), direct)


def test_dual_hamiltonian_closed_form():
    p = JcParams.from_ratio(4.0)
    for t in (0.0, 1.1, 9.0):
        h = jc_dual_hamiltonian_closed(p, t)
        assert is_hermitian(h)
        assert abs(np.trace(h)) < 1e-14
        assert np.allclose(np.linalg.eigvalsh(h), [-0.5 * abs(p.detuning), 0.5 * abs(p.detuning)])
    assert np.allclose(jc_dual_hamiltonian_closed(p, 0.0), -0.5 * p.detuning * pauli(3))


def test_dual_needs_coupling():
    with pytest.raises(ZeroCoupling):
        jc_leading_propagator(JcParams(1.0, 2.0, 0.0), 1.0)


# ============================================================================
# ERROR METRICS
# ============================================================================

def test_error_metrics():
    a = JcAmplitudes(np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    b = JcAmplitudes(np.array([1.0, 0.6]), np.array([0.0, 0.8]))
    assert np.allclose(amplitude_error_series(a, b), [0.0, 0.6])
    assert np.isclose(max_amplitude_error(a, b), 0.6)
    assert np.isclose(population_error(a, b), 0.36)


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
