#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Dyson and Dual Dyson Series Engine
==================================

Numerical propagation of i d/dt |psi> = H(t) |psi> for small Hilbert spaces by
two expansions:

    Dyson       U = I - i∫H + (-i)²∫∫H H + ...
    dual Dyson  U = U_A(t) · T exp(-i∫H'(t')dt')

where U_A is the adiabatic propagator built from the instantaneous eigenframes
of H and H' the coupling between frames. The superadiabatic chain repeats the
dual step on H'.

Operator functions are callables t -> (N, N) array. Sampled results are stacked
arrays of shape (samples, N, N) on a uniform TimeGrid. Every propagation runs
on the grid and on its doubling; the difference certifies the quadrature and
the two are combined by Richardson extrapolation.
"""

from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
import structlog
from scipy.integrate import cumulative_simpson, cumulative_trapezoid, solve_ivp
from scipy.optimize import linear_sum_assignment

from dds_errors import (
    DegeneracyCrossing, GridTooCoarse, OrderTooLarge, StepUnderflow, ValidationError,
)
from dds_linalg import as_operator, dagger, hermitian_eigensystem, max_norm

logger = structlog.get_logger(__name__)

MAX_DYSON_ORDER = 4
MAX_DUAL_ORDER = 2
DEFAULT_REFINE_TOL = 1e-4
DEFAULT_DEGENERACY_FACTOR = 1e-8
REFERENCE_SWITCH_RATIO = 0.1


# ============================================================================
# GRID AND SAMPLED OPERATORS
# ============================================================================

@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid of `samples` nodes on [t0, t1]."""
    t0: float
    t1: float
    samples: int

    def __post_init__(self):
        if not (np.isfinite(self.t0) and np.isfinite(self.t1)):
            raise ValidationError("grid", "endpoints must be finite")
        if self.t1 <= self.t0:
            raise ValidationError("grid", f"t1 ({self.t1}) must exceed t0 ({self.t0})")
        if int(self.samples) != self.samples or self.samples < 2:
            raise ValidationError("grid.samples", f"need an integer >= 2, got {self.samples}")

    @property
    def spacing(self) -> float:
        return (self.t1 - self.t0) / (self.samples - 1)

    def times(self) -> np.ndarray:
        return np.linspace(self.t0, self.t1, self.samples)

    def refined(self) -> "TimeGrid":
        """Doubled grid; its even nodes are this grid's nodes."""
        return TimeGrid(self.t0, self.t1, 2 * self.samples - 1)


OperatorFunction = Callable[[float], np.ndarray]


@dataclass
class SampledOperator:
    """Operator values on grid nodes, callable with linear interpolation."""
    times: np.ndarray
    values: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, k: int) -> np.ndarray:
        return self.values[k]

    def __call__(self, t: float) -> np.ndarray:
        k = int(np.clip(np.searchsorted(self.times, t) - 1, 0, len(self.times) - 2))
        w = (t - self.times[k]) / (self.times[k + 1] - self.times[k])
        return (1.0 - w) * self.values[k] + w * self.values[k + 1]


def sample_operator(h: OperatorFunction, times: np.ndarray) -> np.ndarray:
    return np.stack([as_operator(h(float(t))) for t in times])


def interaction_picture(h0, v: OperatorFunction) -> OperatorFunction:
    """t -> e^{iH0 t} V(t) e^{-iH0 t} for a static Hermitian H0."""
    h0 = as_operator(h0)
    values, vectors = hermitian_eigensystem(h0)
    vd = dagger(vectors)

    def h_interaction(t: float) -> np.ndarray:
        rot = (vectors * np.exp(1j * values * t)) @ vd
        return rot @ as_operator(v(t)) @ dagger(rot)

    return h_interaction


# ============================================================================
# RESULT RECORDS
# ============================================================================

@dataclass
class PropagatorSeries:
    """orders[k] holds the partial sum through order k at every node."""
    times: np.ndarray
    orders: List[np.ndarray]
    refine_delta: float = 0.0

    def at(self, order: int, index: int = -1) -> np.ndarray:
        return self.orders[order][index]

    def apply(self, order: int, state) -> np.ndarray:
        """Evolve `state` at every node: shape (samples, N)."""
        return self.orders[order] @ np.asarray(state, dtype=complex)


@dataclass
class EigenFrame:
    time: float
    energies: np.ndarray
    vectors: np.ndarray
    berry_connection: np.ndarray


@dataclass
class FrameSet:
    """
    Tracked instantaneous eigenframes.

    vectors[k][:, n] is |n, t_k>; level n follows one smooth family even when
    eigenvalues change order between nodes.
    """
    times: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray
    berry_connection: np.ndarray

    def __len__(self) -> int:
        return len(self.times)

    def __getitem__(self, k: int) -> EigenFrame:
        return EigenFrame(float(self.times[k]), self.energies[k],
                          self.vectors[k], self.berry_connection[k])

    @property
    def levels(self) -> int:
        return self.energies.shape[1]


@dataclass
class SuperadiabaticChain:
    times: np.ndarray
    propagators: List[np.ndarray] = field(default_factory=list)
    hamiltonians: List[np.ndarray] = field(default_factory=list)
    residual_norms: List[float] = field(default_factory=list)
    terminated: bool = False
    involution_step: Optional[int] = None
    diverged: bool = False
    refine_delta: float = 0.0

    @property
    def rejected_step(self) -> Optional[int]:
        """Step dropped by the involution or divergence stop; its norm stays in residual_norms."""
        if len(self.residual_norms) > len(self.propagators):
            return len(self.residual_norms)
        return None

    @property
    def steps(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        return list(zip(self.propagators, self.hamiltonians))

    def compose(self, order: int = 1) -> np.ndarray:
        """U_A^(1) ... U_A^(K) times the Dyson partial sum of H^(K)."""
        dim = self.propagators[0].shape[-1]
        total = np.broadcast_to(np.eye(dim, dtype=complex), self.propagators[0].shape)
        for ua in self.propagators:
            total = total @ ua
        residual = _partial_sums(_dyson_terms(self.hamiltonians[-1], self.times, order))[order]
        return total @ residual


# ============================================================================
# DYSON SERIES
# ============================================================================

def _dyson_terms(hs: np.ndarray, times: np.ndarray, order: int) -> List[np.ndarray]:
    # term_j(t) = -i ∫_{t0}^t H(s) term_{j-1}(s) ds
    dim = hs.shape[-1]
    term = np.broadcast_to(np.eye(dim, dtype=complex), hs.shape).copy()
    terms = [term]
    for _ in range(order):
        term = -1j * cumulative_trapezoid(hs @ term, times, axis=0, initial=0)
        terms.append(term)
    return terms


def _partial_sums(terms: Sequence[np.ndarray]) -> List[np.ndarray]:
    return list(np.cumsum(np.stack(terms), axis=0))


def _richardson(coarse: Sequence[np.ndarray], fine: Sequence[np.ndarray],
                refine_tol: float, what: str) -> Tuple[List[np.ndarray], float]:
    delta = 0.0
    combined = []
    for c, f in zip(coarse, fine):
        f = f[::2]
        delta = max(delta, max_norm(f - c))
        combined.append(f + (f - c) / 3.0)
    if delta / 3.0 > refine_tol:
        raise GridTooCoarse(
            f"{what}: doubling the grid changed the result by {delta:.3e} "
            f"(tolerance {3.0 * refine_tol:.3e}); use more samples")
    return combined, delta


def _check_order(order: int, cap: int):
    if int(order) != order or order < 0:
        raise ValidationError("order", f"must be a non-negative integer, got {order!r}")
    if order > cap:
        raise OrderTooLarge(f"order {order} exceeds the supported maximum {cap}")


def dyson_propagate(h: OperatorFunction, grid: TimeGrid, order: int,
                    refine_tol: float = DEFAULT_REFINE_TOL) -> PropagatorSeries:
    """
    Dyson partial sums through `order` at every grid node.

    Args:
        h: Operator function of time
        grid: Uniform time grid
        order: Highest perturbative order (at most 4)
        refine_tol: Allowed error estimate from the grid-doubling check

    Returns:
        PropagatorSeries with orders[0] = identity
    """
    _check_order(order, MAX_DYSON_ORDER)
    runs = []
    for g in (grid, grid.refined()):
        times = g.times()
        runs.append(_partial_sums(_dyson_terms(sample_operator(h, times), times, order)))
    orders, delta = _richardson(runs[0], runs[1], refine_tol, "dyson_propagate")
    logger.debug("dyson_propagate", order=order, samples=grid.samples, refine_delta=delta)
    return PropagatorSeries(grid.times(), orders, delta)


# ============================================================================
# EIGENFRAMES
# ============================================================================

def _lock_phase(vector: np.ndarray, index: int, phase: float) -> np.ndarray:
    return vector * np.exp(1j * (phase - np.angle(vector[index])))


def _berry_connection(vectors: np.ndarray, times: np.ndarray) -> np.ndarray:
    # A_n = <n|i d/dt|n> = -d/dt of the accumulated overlap phase
    overlaps = np.einsum("kin,kin->kn", np.conj(vectors[:-1]), vectors[1:])
    theta = np.concatenate([np.zeros((1, vectors.shape[-1])),
                            np.cumsum(np.angle(overlaps), axis=0)])
    return -np.gradient(theta, times, axis=0, edge_order=2)


def frames_from_samples(hs: np.ndarray, times: np.ndarray,
                        degeneracy_tol: Optional[float] = None) -> FrameSet:
    """Track eigenframes of sampled Hermitian operators."""
    m, dim = hs.shape[0], hs.shape[-1]
    energies = np.empty((m, dim))
    vectors = np.empty((m, dim, dim), dtype=complex)

    values, vecs = hermitian_eigensystem(hs[0])
    reference = []
    for n in range(dim):
        col = np.abs(vecs[:, n])
        reference.append(n if col[n] >= (1.0 - 1e-9) * col.max() else int(np.argmax(col)))
    ref_phase = [0.0] * dim
    for n in range(dim):
        vecs[:, n] = _lock_phase(vecs[:, n], reference[n], 0.0)
    energies[0], vectors[0] = values, vecs

    for k in range(1, m):
        values, vecs = hermitian_eigensystem(hs[k])
        prev = vectors[k - 1]
        rows, cols = linear_sum_assignment(-np.abs(dagger(prev) @ vecs))
        perm = cols[np.argsort(rows)]
        values, vecs = values[perm], vecs[:, perm]
        for n in range(dim):
            mags = np.abs(vecs[:, n])
            if mags[reference[n]] < REFERENCE_SWITCH_RATIO * mags.max():
                reference[n] = int(np.argmax(np.abs(prev[:, n])))
                ref_phase[n] = float(np.angle(prev[reference[n], n]))
            vecs[:, n] = _lock_phase(vecs[:, n], reference[n], ref_phase[n])
            if np.real(np.vdot(prev[:, n], vecs[:, n])) <= 0.0:
                raise GridTooCoarse(
                    f"level {n} lost phase continuity at t={times[k]:.6g}; refine the grid")
        energies[k], vectors[k] = values, vecs

    if dim > 1:
        tol = degeneracy_tol
        if tol is None:
            tol = DEFAULT_DEGENERACY_FACTOR * max(float(np.max(np.abs(energies))), np.finfo(float).tiny)
        gaps = np.abs(energies[:, :, None] - energies[:, None, :])
        gaps[:, np.arange(dim), np.arange(dim)] = np.inf
        worst = int(np.argmin(gaps.min(axis=(1, 2))))
        if gaps[worst].min() <= tol:
            raise DegeneracyCrossing(
                f"levels degenerate at t={times[worst]:.6g} (gap {gaps[worst].min():.3e} <= {tol:.3e})")

    return FrameSet(np.asarray(times, dtype=float), energies, vectors,
                    _berry_connection(vectors, times))


def instantaneous_frames(h: OperatorFunction, grid: TimeGrid,
                         degeneracy_tol: Optional[float] = None) -> FrameSet:
    """
    Gauge-continuous eigenframes of H(t) on the grid.

    The reference component of each level (its diagonal one at t0 when that is
    maximal) is kept real positive; the reference moves to the largest
    component when it drops below 10% of it.
    """
    times = grid.times()
    return frames_from_samples(sample_operator(h, times), times, degeneracy_tol)


def berry_phases(frames: FrameSet) -> np.ndarray:
    """gamma_n(t) on every node, shape (samples, levels)."""
    return cumulative_trapezoid(frames.berry_connection, frames.times, axis=0, initial=0)


def dynamical_phases(frames: FrameSet) -> np.ndarray:
    return cumulative_simpson(frames.energies, x=frames.times, axis=0, initial=0)


def adiabatic_propagator(frames: FrameSet) -> np.ndarray:
    """U_A(t) = Σ_n exp(i gamma_n - i∫E_n) |n,t><n,t0| on every node."""
    phase = np.exp(1j * (berry_phases(frames) - dynamical_phases(frames)))
    return np.einsum("kin,kn,jn->kij", frames.vectors, phase, np.conj(frames.vectors[0]))


def frame_derivative_couplings(frames: FrameSet) -> np.ndarray:
    """<m,t|d/dt|n,t> by second-order finite differences, shape (samples, N, N)."""
    dv = np.gradient(frames.vectors, frames.times, axis=0, edge_order=2)
    return np.einsum("kim,kin->kmn", np.conj(frames.vectors), dv)


def dual_hamiltonian(frames: FrameSet) -> np.ndarray:
    """H'(t) expressed on the t0 frame, mapped back to the original basis."""
    phi = berry_phases(frames) - dynamical_phases(frames)
    coupling = 1j * frame_derivative_couplings(frames)
    dim = frames.levels
    # e^{-i(γm-γn)} e^{i∫(Em-En)} = e^{i(φn - φm)}
    weights = np.exp(1j * (phi[:, None, :] - phi[:, :, None]))
    inner = -weights * coupling
    inner[:, np.arange(dim), np.arange(dim)] = 0.0
    v0 = frames.vectors[0]
    return v0 @ inner @ dagger(v0)


def biorthogonal_connections(right: np.ndarray, left: np.ndarray, times: np.ndarray) -> np.ndarray:
    """
    Connections <ñ|i d/dt|n> of a non-Hermitian family.

    right[k][:, n] is |n, t_k>; left[k][n, :] is the dual row <ñ, t_k| with
    left[k] @ right[k] = I.
    """
    dr = np.gradient(right, times, axis=0, edge_order=2)
    return 1j * np.einsum("knj,kjn->kn", left, dr)


# ============================================================================
# DUAL DYSON SERIES
# ============================================================================

def _dual_orders(hs: np.ndarray, times: np.ndarray, order: int,
                 degeneracy_tol: Optional[float]) -> List[np.ndarray]:
    frames = frames_from_samples(hs, times, degeneracy_tol)
    ua = adiabatic_propagator(frames)
    residual = _partial_sums(_dyson_terms(dual_hamiltonian(frames), times, order))
    return [ua @ r for r in residual]


def dual_dyson_propagate(h: OperatorFunction, grid: TimeGrid, order: int,
                         degeneracy_tol: Optional[float] = None,
                         refine_tol: float = DEFAULT_REFINE_TOL) -> PropagatorSeries:
    """orders[k](t) = U_A(t) · (Dyson partial sum of H' through order k)."""
    _check_order(order, MAX_DUAL_ORDER)
    runs = []
    for g in (grid, grid.refined()):
        times = g.times()
        runs.append(_dual_orders(sample_operator(h, times), times, order, degeneracy_tol))
    orders, delta = _richardson(runs[0], runs[1], refine_tol, "dual_dyson_propagate")
    logger.debug("dual_dyson_propagate", order=order, samples=grid.samples, refine_delta=delta)
    return PropagatorSeries(grid.times(), orders, delta)


def superadiabatic_iterate(h: OperatorFunction, grid: TimeGrid, steps: int,
                           degeneracy_tol: Optional[float] = None,
                           vanish_tol: float = 1e-12,
                           involution_tol: float = 1e-5,
                           refine_tol: float = DEFAULT_REFINE_TOL) -> SuperadiabaticChain:
    """
    Iterate frames -> U_A -> H' up to `steps` times.

    Stops early when H^(k) vanishes (relative to max|H|). Step k >= 2 is
    rejected, and the chain ends at step k-1, when U_A^(k) equals
    (U_A^(k-1))† within involution_tol (involution_step = k) or when
    max|H^(k)| exceeds max|H^(k-1)| (diverged). For two levels the involution
    is generic: the frames of H^(1) turn with the dynamical phase of step 1,
    whose Berry phase cancels it. No optimal truncation step is selected;
    residual_norms reports max|H^(k)| per step, the rejected one included.
    """
    if int(steps) != steps or steps < 1:
        raise ValidationError("steps", f"must be a positive integer, got {steps!r}")

    times = grid.times()
    current = sample_operator(h, times)
    scale = max(max_norm(current), np.finfo(float).tiny)
    chain = SuperadiabaticChain(times)
    for k in range(1, steps + 1):
        frames = frames_from_samples(current, times, degeneracy_tol)
        ua, hp = adiabatic_propagator(frames), dual_hamiltonian(frames)
        chain.residual_norms.append(max_norm(hp))
        if k >= 2:
            if max_norm(ua - dagger(chain.propagators[-1])) <= involution_tol:
                chain.involution_step = k
                break
            if chain.residual_norms[-1] > chain.residual_norms[-2]:
                chain.diverged = True
                logger.info("superadiabatic_diverged", step=k, residual_norms=chain.residual_norms)
                break
        chain.propagators.append(ua)
        chain.hamiltonians.append(hp)
        if chain.residual_norms[-1] <= vanish_tol * scale:
            chain.terminated = True
            break
        current = hp

    # same number of steps on the doubled grid, no early-stop checks
    fine_times = grid.refined().times()
    current = sample_operator(h, fine_times)
    fine_props, fine_hams = [], []
    for _ in range(len(chain.propagators)):
        frames = frames_from_samples(current, fine_times, degeneracy_tol)
        fine_props.append(adiabatic_propagator(frames))
        current = dual_hamiltonian(frames)
        fine_hams.append(current)
    chain.propagators, d1 = _richardson(chain.propagators, fine_props, refine_tol, "superadiabatic_iterate")
    chain.hamiltonians, d2 = _richardson(chain.hamiltonians, fine_hams, refine_tol, "superadiabatic_iterate")
    chain.refine_delta = max(d1, d2)
    logger.debug("superadiabatic_iterate", steps=len(chain.propagators),
                 residual_norms=chain.residual_norms, terminated=chain.terminated,
                 involution_step=chain.involution_step, diverged=chain.diverged)
    return chain


# ============================================================================
# ODE ORACLE
# ============================================================================

def propagate_exact(h: OperatorFunction, grid: TimeGrid, rtol: float = 1e-11,
                    atol: float = 1e-13) -> np.ndarray:
    """Adaptive Runge-Kutta propagator on every node (DOP853)."""
    times = grid.times()
    dim = as_operator(h(float(times[0]))).shape[0]

    def rhs(t, y):
        return (-1j * as_operator(h(t)) @ y.reshape(dim, dim)).ravel()

    sol = solve_ivp(rhs, (times[0], times[-1]), np.eye(dim, dtype=complex).ravel(),
                    method="DOP853", t_eval=times, rtol=rtol, atol=atol)
    if not sol.success:
        raise StepUnderflow(f"reference integration failed: {sol.message}")
    return np.moveaxis(sol.y, -1, 0).reshape(len(times), dim, dim)
