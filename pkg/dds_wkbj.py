#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
WKBJ From the Adiabatic Propagator
==================================

ψ'' + α²(x) ψ = 0 written as a first-order system

    i d/dx (ψ, φ) = L(x) (ψ, φ),   L = [[0, i], [-iα², 0]]

L has eigenvalues ±α with explicit right/left eigenvectors. Their Berry
connections vanish, so the adiabatic propagator is a phase rotation by
Φ(x) = ∫α, which is the WKBJ approximation. Turning points (α <= 0) are
degeneracies of L and are rejected.
"""

from dataclasses import dataclass
from typing import Callable, Tuple, Union

import numpy as np
import structlog
from scipy.integrate import solve_ivp, trapezoid

from dds_errors import StepUnderflow, TurningPoint, ValidationError
from dds_series import PropagatorSeries, TimeGrid, biorthogonal_connections, dyson_propagate

logger = structlog.get_logger(__name__)

PHASE_NODES = 4097
CHECK_NODES = 4097
MIN_TOL = 1e-12

XLike = Union[float, np.ndarray]
Profile = Callable[[np.ndarray], np.ndarray]


def alpha_profile(kind: str, **params) -> Profile:
    """
    α(x) families: 'constant' (k), 'linear' (a + b x), 'sqrt-linear' (√(1 + εx)).
    """
    if kind == "constant":
        k = float(params.get("k", 1.0))
        return lambda x: np.full(np.shape(x), k, dtype=float)
    if kind == "linear":
        a, b = float(params.get("a", 1.0)), float(params.get("b", 0.0))
        return lambda x: a + b * np.asarray(x, dtype=float)
    if kind == "sqrt-linear":
        eps = float(params.get("epsilon", 0.0))
        # clamped at zero so that the turning-point check rejects it
        return lambda x: np.sqrt(np.maximum(1.0 + eps * np.asarray(x, dtype=float), 0.0))
    raise ValidationError("wkbj.profile", f"unknown profile '{kind}'")


@dataclass
class WkbjProblem:
    alpha: Profile
    x0: float
    x1: float
    psi0: complex = 1.0
    phi0: complex = 0.0

    def __post_init__(self):
        if not (np.isfinite(self.x0) and np.isfinite(self.x1)) or self.x1 <= self.x0:
            raise ValidationError("wkbj.x1", f"need finite x0 < x1, got [{self.x0}, {self.x1}]")
        self.psi0, self.phi0 = complex(self.psi0), complex(self.phi0)

    def check_turning_points(self):
        xs = np.linspace(self.x0, self.x1, CHECK_NODES)
        a = np.asarray(self.alpha(xs), dtype=float)
        bad = ~(np.isfinite(a) & (a > 0))
        if np.any(bad):
            raise TurningPoint(f"α(x) <= 0 at x={xs[np.argmax(bad)]:.6g}; connection formulas are not supported")

    def generator(self, x: float) -> np.ndarray:
        """L(x)."""
        a = float(self.alpha(np.asarray(x)))
        return np.array([[0.0, 1j], [-1j * a * a, 0.0]])

    @property
    def initial(self) -> np.ndarray:
        return np.array([self.psi0, self.phi0])


def _check_range(problem: WkbjProblem, x: np.ndarray):
    span = 1e-12 * max(1.0, abs(problem.x1 - problem.x0))
    if np.any(x < problem.x0 - span) or np.any(x > problem.x1 + span):
        raise ValidationError("x", f"points must lie in [{problem.x0}, {problem.x1}]")


def phase_integral(problem: WkbjProblem, x: XLike) -> np.ndarray:
    """Φ(x) = ∫_{x0}^x α by the trapezoid rule on 4097 nodes per point."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty(xs.shape)
    for i, xi in enumerate(xs.flat):
        nodes = np.linspace(problem.x0, xi, PHASE_NODES)
        out.flat[i] = trapezoid(problem.alpha(nodes), nodes)
    return out.reshape(np.shape(x))


def _prepare(problem: WkbjProblem, x: XLike):
    problem.check_turning_points()
    xa = np.asarray(x, dtype=float)
    _check_range(problem, xa)
    return xa, phase_integral(problem, xa), np.asarray(problem.alpha(xa), dtype=float), \
        float(problem.alpha(np.asarray(problem.x0)))


def wkbj_constants(problem: WkbjProblem) -> Tuple[complex, complex]:
    """(C1, C2) = (√α0 ψ0, φ0/√α0)."""
    problem.check_turning_points()
    a0 = float(problem.alpha(np.asarray(problem.x0)))
    return np.sqrt(a0) * problem.psi0, problem.phi0 / np.sqrt(a0)


def wkbj_closed(problem: WkbjProblem, x: XLike):
    """ψ(x) ≈ (C1 cos Φ + C2 sin Φ)/√α(x)."""
    _, phase, a, _ = _prepare(problem, x)
    c1, c2 = wkbj_constants(problem)
    return (c1 * np.cos(phase) + c2 * np.sin(phase)) / np.sqrt(a)


def wkbj_matrix_propagator(problem: WkbjProblem, x: XLike) -> np.ndarray:
    """
    U_A(x, x0) = 1/√(α α0) [[α0 cos Φ, sin Φ], [-α α0 sin Φ, α cos Φ]].
    """
    _, phase, a, a0 = _prepare(problem, x)
    c, s = np.cos(phase), np.sin(phase)
    norm = 1.0 / np.sqrt(a * a0)
    out = np.empty(np.shape(phase) + (2, 2), dtype=complex)
    out[..., 0, 0] = norm * a0 * c
    out[..., 0, 1] = norm * s
    out[..., 1, 0] = -norm * a * a0 * s
    out[..., 1, 1] = norm * a * c
    return out


def wkbj_eigenvectors(alpha_values: XLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    Right eigenvectors (columns |1>, |2> for +α, -α) and biorthogonal left rows,
    principal square-root branches:

        |1> = (1, -iα)/√(-2iα),  <1~| = (-iα, 1)/√(-2iα)
        |2> = (1,  iα)/√(2iα),   <2~| = ( iα, 1)/√(2iα)
    """
    a = np.asarray(alpha_values, dtype=float)
    n1, n2 = np.sqrt(-2j * a), np.sqrt(2j * a)
    right = np.zeros(a.shape + (2, 2), dtype=complex)
    left = np.zeros(a.shape + (2, 2), dtype=complex)
    right[..., 0, 0], right[..., 1, 0] = 1.0 / n1, -1j * a / n1
    right[..., 0, 1], right[..., 1, 1] = 1.0 / n2, 1j * a / n2
    left[..., 0, 0], left[..., 0, 1] = -1j * a / n1, 1.0 / n1
    left[..., 1, 0], left[..., 1, 1] = 1j * a / n2, 1.0 / n2
    return right, left


def wkbj_adiabatic_propagator(problem: WkbjProblem, x: XLike) -> np.ndarray:
    """Σ_n e^{-i∫λ_n} |n,x><ñ,x0| with λ = (+α, -α)."""
    _, phase, a, a0 = _prepare(problem, x)
    right, _ = wkbj_eigenvectors(a)
    _, left0 = wkbj_eigenvectors(a0)
    phases = np.stack([np.exp(-1j * phase), np.exp(1j * phase)], axis=-1)
    return (right * phases[..., None, :]) @ left0


def wkbj_berry_connections(problem: WkbjProblem, xs: np.ndarray) -> np.ndarray:
    """Numerical <ñ|i d/dx|n> along xs, shape (len(xs), 2)."""
    problem.check_turning_points()
    xs = np.asarray(xs, dtype=float)
    right, left = wkbj_eigenvectors(problem.alpha(xs))
    return biorthogonal_connections(right, left, xs)


def wkbj_dyson(problem: WkbjProblem, samples: int, order: int) -> PropagatorSeries:
    """Dyson partial sums of the first-order system on [x0, x1]."""
    return dyson_propagate(problem.generator, TimeGrid(problem.x0, problem.x1, samples), order)


def reference_solve(problem: WkbjProblem, x: XLike, tol: float = 1e-10):
    """
    (ψ, φ) at x by adaptive DOP853 integration of ψ' = φ, φ' = -α² ψ.

    Args:
        problem: Profile, interval and initial values
        x: One point or an array of points in [x0, x1]
        tol: Relative tolerance (>= 1e-12); absolute tolerance is tol/100

    Returns:
        (psi, phi) with the shape of x
    """
    if not np.isfinite(tol) or tol < MIN_TOL:
        raise ValidationError("tol", f"tolerance must be at least {MIN_TOL:g}, got {tol}")
    problem.check_turning_points()
    xa = np.asarray(x, dtype=float)
    _check_range(problem, xa)
    flat = np.atleast_1d(xa).ravel()
    order = np.argsort(flat)
    targets = np.clip(flat[order], problem.x0, problem.x1)

    def rhs(xi, y):
        a = float(problem.alpha(np.asarray(xi)))
        return np.array([y[1], -a * a * y[0]])

    if targets[-1] <= problem.x0:
        values = np.tile(problem.initial[:, None], (1, len(targets)))
    else:
        sol = solve_ivp(rhs, (problem.x0, float(targets[-1])), problem.initial, method="DOP853",
                        t_eval=targets, rtol=tol, atol=tol * 1e-2)
        if not sol.success:
            raise StepUnderflow(f"reference integration failed: {sol.message}")
        values = sol.y
    out = np.empty((2, len(flat)), dtype=complex)
    out[:, order] = values
    logger.debug("reference_solve", points=len(flat), tol=tol)
    return out[0].reshape(xa.shape), out[1].reshape(xa.shape)
