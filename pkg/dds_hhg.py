#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Two-Level Atom in a Strong Laser Field
======================================

    H = (ω0/2) σ3 + Ω d12 cos(ω_L t) σ1,      basis |2> = (1,0), |1> = (0,1)

In the interaction picture the field term is rotated by e^{i(ω0/2)σ3 t}. The
dual series leads with U0 = e^{i(ω0/2)σ3 t} e^{-iσ1 θ(t)}, θ = (Ωd12/ω_L) sin ω_L t,
and the first correction expands e^{-2iσ1θ} in Bessel functions of
z = 2Ωd12/ω_L. Resumming its secular part renormalizes the level splitting
to ω0R = ω0 J0(z), which sets the hyper-Raman lines at |ω0R ± 2nω_L|.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Union

import numpy as np
import structlog
from scipy.special import jv

from dds_errors import CutoffTooSmall, OrderTooLarge, ValidationError
from dds_linalg import dagger, max_norm, pauli, unitary_exponential
from dds_series import TimeGrid
from dds_spectrum import LineKind, TimeSeries

logger = structlog.get_logger(__name__)

MAX_BESSEL_ORDER = 64
BESSEL_TAIL = 1e-14

TimeLike = Union[float, np.ndarray]


class Picture(Enum):
    SCHRODINGER = "schrodinger"
    INTERACTION = "interaction"


@dataclass(frozen=True)
class HhgParams:
    omega0: float
    omegaL: float
    field: float
    dipole: float

    def __post_init__(self):
        for name in ("omega0", "omegaL", "field", "dipole"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"hhg.{name}", "must be finite")
        if self.omegaL <= 0:
            raise ValidationError("hhg.omegaL", f"laser frequency must be positive, got {self.omegaL}")

    @property
    def coupling(self) -> float:
        return self.field * self.dipole

    @property
    def z_half(self) -> float:
        """Ωd12/ω_L, the rotation amplitude in U0."""
        return self.coupling / self.omegaL

    @property
    def z(self) -> float:
        """2Ωd12/ω_L, the Bessel argument."""
        return 2.0 * self.z_half

    @property
    def omega0R(self) -> float:
        return renormalized_gap(self)

    @property
    def period(self) -> float:
        return 2.0 * np.pi / self.omegaL

    @classmethod
    def from_z(cls, z: float, omega0: float, omegaL: float = 1.0, dipole: float = 1.0) -> "HhgParams":
        return cls(omega0=omega0, omegaL=omegaL, field=0.5 * z * omegaL / dipole, dipole=dipole)


@dataclass
class Populations:
    """Initial bare-level amplitudes; c1 on |1>, c2 on |2>."""
    c1: complex
    c2: complex

    def __post_init__(self):
        self.c1, self.c2 = complex(self.c1), complex(self.c2)
        total = abs(self.c1) ** 2 + abs(self.c2) ** 2
        if not np.isfinite(total) or abs(total - 1.0) > 1e-6:
            raise ValidationError("init", f"|c1|² + |c2|² must be 1, got {total:.9g}")

    def vector(self) -> np.ndarray:
        return np.array([self.c2, self.c1], dtype=complex)


@dataclass
class DipoleComponents:
    """Parts of x(t): ω0R carrier, odd-harmonic comb, hyper-Raman cross term."""
    times: np.ndarray
    carrier: np.ndarray
    odd: np.ndarray
    hyper_raman: np.ndarray
    imag_residual: float = 0.0

    @property
    def total(self) -> np.ndarray:
        return self.carrier + self.odd + self.hyper_raman


@dataclass
class PredictedLine:
    frequency: float
    amplitude: float
    kind: LineKind
    order: int
    sign: int = 0


def _as_times(grid_or_times) -> np.ndarray:
    if isinstance(grid_or_times, TimeGrid):
        return grid_or_times.times()
    return np.asarray(grid_or_times, dtype=float)


def _sigma1_rotation(theta: np.ndarray) -> np.ndarray:
    """e^{-iσ1θ} = cos θ I - i sin θ σ1, stacked over θ."""
    c, s = np.cos(theta)[..., None, None], np.sin(theta)[..., None, None]
    return c * np.eye(2) - 1j * s * pauli(1)


def _sigma3_phase(angle: np.ndarray) -> np.ndarray:
    """e^{iσ3·angle}, stacked."""
    angle = np.asarray(angle, dtype=float)
    out = np.zeros(angle.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = np.exp(1j * angle)
    out[..., 1, 1] = np.exp(-1j * angle)
    return out


def _theta(p: HhgParams, t: np.ndarray) -> np.ndarray:
    return p.z_half * np.sin(p.omegaL * t)


# ============================================================================
# HAMILTONIANS AND LEADING ORDER
# ============================================================================

def hhg_free_hamiltonian(p: HhgParams) -> np.ndarray:
    return 0.5 * p.omega0 * pauli(3)


def hhg_schrodinger_hamiltonian(p: HhgParams, t: TimeLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    drive = p.coupling * np.cos(p.omegaL * t)[..., None, None]
    return hhg_free_hamiltonian(p) + drive * pauli(1)


def hhg_interaction_hamiltonian(p: HhgParams, t: TimeLike) -> np.ndarray:
    """Ωd12 cos(ω_L t) (e^{iω0 t}|2><1| + e^{-iω0 t}|1><2|)."""
    t = np.asarray(t, dtype=float)
    amp = p.coupling * np.cos(p.omegaL * t)
    out = np.zeros(t.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = amp * np.exp(1j * p.omega0 * t)
    out[..., 1, 0] = amp * np.exp(-1j * p.omega0 * t)
    return out


def hhg_dressed_states(p: HhgParams, t: TimeLike):
    """
    (|a,t>, |b,t>) for eigenvalues -Ωd12 cos ω_L t and +Ωd12 cos ω_L t.

    |a> = (|2> - e^{-iω0 t}|1>)/√2,  |b> = (e^{iω0 t}|2> + |1>)/√2
    """
    t = np.asarray(t, dtype=float)
    phase = np.exp(1j * p.omega0 * t)
    one = np.ones_like(phase)
    a = np.stack([one, -np.conj(phase)], axis=-1) / np.sqrt(2.0)
    b = np.stack([phase, one], axis=-1) / np.sqrt(2.0)
    return a, b


def hhg_leading_propagator(p: HhgParams, t: TimeLike,
                           picture: Picture = Picture.INTERACTION) -> np.ndarray:
    """
    U0 = e^{i(ω0/2)σ3 t} e^{-iσ1 θ(t)} in the interaction picture; the
    Schrödinger-picture state map drops the first factor.
    """
    t = np.asarray(t, dtype=float)
    rot = _sigma1_rotation(_theta(p, t))
    if picture is Picture.SCHRODINGER:
        return rot
    return _sigma3_phase(0.5 * p.omega0 * t) @ rot


def hhg_dual_hamiltonian(p: HhgParams, t: TimeLike) -> np.ndarray:
    """H'(t) = (ω0/2) e^{iσ1θ} σ3 e^{-iσ1θ}."""
    rot = _sigma1_rotation(_theta(p, np.asarray(t, dtype=float)))
    return 0.5 * p.omega0 * dagger(rot) @ pauli(3) @ rot


# ============================================================================
# BESSEL FUNCTIONS
# ============================================================================

def bessel_j(order: int, z: float) -> float:
    """J_order(z) for integer order 0..64."""
    if int(order) != order or order < 0:
        raise ValidationError("order", f"Bessel order must be a non-negative integer, got {order!r}")
    if order > MAX_BESSEL_ORDER:
        raise OrderTooLarge(f"Bessel order {order} exceeds {MAX_BESSEL_ORDER}")
    return float(jv(int(order), z))


def bessel_terms(z: float) -> np.ndarray:
    """J_0(z) .. J_K(z), K the first order with |J_K| < 1e-14 and K > z + 10."""
    for k in range(MAX_BESSEL_ORDER + 1):
        if k > abs(z) + 10 and abs(bessel_j(k, z)) < BESSEL_TAIL:
            return jv(np.arange(k + 1), z)
    raise OrderTooLarge(f"Bessel sums for z={z} need more than {MAX_BESSEL_ORDER} terms")


def renormalized_gap(p: HhgParams) -> float:
    """ω0R = ω0 J0(2Ωd12/ω_L)."""
    return p.omega0 * bessel_j(0, p.z)


def bessel_identity_residual(z: float, phi: float, cutoff: int) -> float:
    """
    Max-norm gap between e^{iσ1 z sin φ} and its Bessel expansion
    J0 + 2ΣJ_{2n} cos 2nφ + 2iσ1 ΣJ_{2n+1} sin(2n+1)φ using orders up to `cutoff`.
    """
    if cutoff < abs(z) + 10:
        raise CutoffTooSmall(f"cutoff {cutoff} must be at least z + 10 = {abs(z) + 10:g}")
    exact = unitary_exponential(-z * np.sin(phi) * pauli(1), 1.0)
    even = bessel_j(0, z)
    odd = 0.0
    for k in range(1, int(cutoff) + 1):
        if k % 2 == 0:
            even += 2.0 * bessel_j(k, z) * np.cos(k * phi)
        else:
            odd += 2.0 * bessel_j(k, z) * np.sin(k * phi)
    series = even * np.eye(2) + 1j * odd * pauli(1)
    return max_norm(exact - series)


# ============================================================================
# FIRST ORDER STATE
# ============================================================================

def _first_order_sums(p: HhgParams, t: np.ndarray):
    """
    even(t) = Σ_{n>=1} J_{2n} sin(2nω_L t)/(2nω_L)
    odd(t)  = Σ_{n>=0} J_{2n+1} (cos((2n+1)ω_L t) - 1)/((2n+1)ω_L)
    """
    j = bessel_terms(p.z)
    even = np.zeros_like(t)
    odd = np.zeros_like(t)
    for k in range(1, len(j)):
        w = k * p.omegaL
        if k % 2 == 0:
            even += j[k] * np.sin(w * t) / w
        else:
            odd += j[k] * (np.cos(w * t) - 1.0) / w
    return even, odd


def hhg_state_first_order(p: HhgParams, init: Populations, t: TimeLike,
                          renormalized: bool = True,
                          picture: Picture = Picture.SCHRODINGER) -> np.ndarray:
    """
    First-order state, shape (..., 2).

    Unrenormalized: e^{-iσ1θ}[I - i(ω0/2)J0 t σ3 - iω0·even σ3 + iω0·odd σ2] ψ0.
    Renormalized: the secular term moves into e^{-i(ω0/2)J0 t σ3} acting on ψ0.
    The interaction picture multiplies by e^{i(ω0/2)σ3 t} on the left.
    """
    t = np.asarray(t, dtype=float)
    even, odd = _first_order_sums(p, t)
    s2, s3 = pauli(2), pauli(3)
    bracket = (np.eye(2) - 1j * p.omega0 * even[..., None, None] * s3
               + 1j * p.omega0 * odd[..., None, None] * s2)
    psi0 = init.vector()
    j0 = bessel_j(0, p.z)
    if renormalized:
        inner = _sigma3_phase(-0.5 * p.omega0 * j0 * t) @ psi0
        state = _sigma1_rotation(_theta(p, t)) @ (bracket @ inner[..., None])
    else:
        bracket = bracket - 0.5j * p.omega0 * j0 * t[..., None, None] * s3
        state = _sigma1_rotation(_theta(p, t)) @ (bracket @ psi0)[..., None]
    state = state[..., 0]
    if picture is Picture.INTERACTION:
        state = (_sigma3_phase(0.5 * p.omega0 * t) @ state[..., None])[..., 0]
    return state


# ============================================================================
# DIPOLE SIGNAL
# ============================================================================

def dipole_components(p: HhgParams, init: Populations, grid_or_times) -> DipoleComponents:
    """Closed-form first-order x(t), split into its three parts."""
    t = _as_times(grid_or_times)
    c1, c2 = init.c1, init.c2
    w0r = renormalized_gap(p)
    j = bessel_terms(p.z)
    even = np.zeros_like(t)
    odd = np.zeros_like(t)
    for k in range(1, len(j)):
        if k % 2 == 0:
            even += j[k] * np.sin(k * p.omegaL * t) / (0.5 * k * p.omegaL)
        else:
            odd += j[k] * (np.cos(k * p.omegaL * t) - 1.0) / (0.5 * k * p.omegaL)
    up = np.conj(c2) * c1 * np.exp(1j * w0r * t)
    down = c2 * np.conj(c1) * np.exp(-1j * w0r * t)
    carrier = -p.dipole * (down + up)
    comb = -p.dipole * (abs(c1) ** 2 - abs(c2) ** 2) * p.omega0 * odd
    cross = -p.dipole * 1j * (up - down) * p.omega0 * even
    imag = max_norm(np.imag(carrier + comb + cross))
    return DipoleComponents(t, np.real(carrier), np.real(comb), np.real(cross), imag)


def dipole_from_state(p: HhgParams, init: Populations, grid_or_times,
                      picture: Picture = Picture.SCHRODINGER) -> np.ndarray:
    """<Ψ(t)|(-d12 σ1)|Ψ(t)> from the renormalized first-order state."""
    state = hhg_state_first_order(p, init, _as_times(grid_or_times), True, picture)
    return -p.dipole * np.real(np.einsum("ki,ij,kj->k", np.conj(state), pauli(1), state))


def dipole_expectation(p: HhgParams, init: Populations, grid: TimeGrid,
                       picture: Picture = Picture.SCHRODINGER) -> TimeSeries:
    """
    x(t) on the grid.

    The Schrödinger picture evaluates the closed form; the interaction picture
    takes the expectation in the state that keeps the e^{i(ω0/2)σ3 t} factor.
    """
    if picture is Picture.SCHRODINGER:
        values = dipole_components(p, init, grid).total
    else:
        values = dipole_from_state(p, init, grid, picture)
    return TimeSeries(grid.spacing, values)


def dipole_cross_check(p: HhgParams, init: Populations, grid_or_times) -> float:
    """Max gap between the closed form and the state expectation (second order in ω0/ω_L)."""
    closed = dipole_components(p, init, grid_or_times).total
    return float(np.max(np.abs(closed - dipole_from_state(p, init, grid_or_times))))


def dipole_leading_order(p: HhgParams, init: Populations, grid_or_times) -> np.ndarray:
    """Dipole of the leading-order state e^{-iσ1θ}ψ0: constant in time."""
    t = _as_times(grid_or_times)
    state = (_sigma1_rotation(_theta(p, t)) @ init.vector()[:, None])[..., 0]
    return -p.dipole * np.real(np.einsum("ki,ij,kj->k", np.conj(state), pauli(1), state))


def analytic_lines(p: HhgParams, init: Populations, max_frequency: float) -> List[PredictedLine]:
    """Line table of the closed-form x(t): cosine amplitude per spectral line."""
    c1, c2 = init.c1, init.c2
    w0r = renormalized_gap(p)
    j = bessel_terms(p.z)
    d = abs(p.dipole)
    mixed = abs(c1 * c2)
    lines = []
    if mixed > 0:
        lines.append(PredictedLine(abs(w0r), 2.0 * d * mixed, LineKind.RENORMALIZED_GAP, 0))
    weight = abs(abs(c1) ** 2 - abs(c2) ** 2)
    for k in range(1, len(j)):
        if k % 2 == 1 and weight > 0:
            freq = k * p.omegaL
            if freq <= max_frequency:
                amp = d * weight * abs(p.omega0 * j[k]) / (0.5 * k * p.omegaL)
                lines.append(PredictedLine(freq, amp, LineKind.ODD_HARMONIC, k))
        elif k % 2 == 0 and mixed > 0:
            n = k // 2
            amp = d * mixed * abs(p.omega0 * j[k]) / (n * p.omegaL)
            for sign in (1, -1):
                freq = abs(w0r + sign * k * p.omegaL)
                if freq <= max_frequency:
                    lines.append(PredictedLine(freq, amp, LineKind.HYPER_RAMAN, n, sign))
    return sorted(lines, key=lambda line: line.frequency)
