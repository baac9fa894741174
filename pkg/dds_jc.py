#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Jaynes-Cummings Sector Dynamics
===============================

Closed forms for one excitation sector of the resonant-wave Jaynes-Cummings
model in the interaction picture, ordered basis (|1,n+1>, |2,n>):

    H = [[0, G e^{-iΔt}], [G e^{iΔt}, 0]],   G = g√(n+1) = R_n/2

Exact amplitudes, the λ = R_n/Δ expansion (Dyson side, with optional removal
of the secular term) and the 1/λ expansion (dual side, as operators U0, U1,
U2) serve as benchmarks for the numerical series engine.

All functions accept a scalar time or a numpy array of times.
"""

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np
import structlog

from dds_errors import ValidationError, ZeroCoupling, ZeroDetuning
from dds_linalg import pauli

logger = structlog.get_logger(__name__)

TimeLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class JcParams:
    omega: float
    omega0: float
    g: float
    n: int = 0

    def __post_init__(self):
        for name in ("omega", "omega0", "g"):
            if not np.isfinite(getattr(self, name)):
                raise ValidationError(f"jc.{name}", "must be finite")
        if int(self.n) != self.n or self.n < 0:
            raise ValidationError("jc.n", f"photon number must be a non-negative integer, got {self.n}")

    @property
    def detuning(self) -> float:
        return self.omega0 - self.omega

    @property
    def coupling(self) -> float:
        """G = g√(n+1), the off-diagonal magnitude."""
        return self.g * np.sqrt(self.n + 1)

    @property
    def rabi(self) -> float:
        return 2.0 * self.coupling

    @property
    def omega_n(self) -> float:
        return float(np.hypot(self.detuning, self.rabi))

    @property
    def lam(self) -> float:
        if self.detuning == 0.0:
            raise ZeroDetuning("λ = R_n/Δ needs a non-zero detuning")
        return self.rabi / self.detuning

    @classmethod
    def from_ratio(cls, lam: float, rabi: float = 1.0, omega: float = 1.0, n: int = 0) -> "JcParams":
        """Parameters with R_n = rabi and Δ = rabi/lam."""
        if lam == 0.0:
            raise ZeroCoupling("λ = 0 means no coupling")
        return cls(omega=omega, omega0=omega + rabi / lam,
                   g=rabi / (2.0 * np.sqrt(n + 1)), n=n)


@dataclass
class JcAmplitudes:
    """c1 on |1,n+1>, c2 on |2,n>; arrays when evaluated on many times."""
    c1: Union[complex, np.ndarray]
    c2: Union[complex, np.ndarray]

    def vector(self) -> np.ndarray:
        return np.stack([np.asarray(self.c1, dtype=complex),
                         np.asarray(self.c2, dtype=complex)], axis=-1)

    def norm(self):
        return np.sqrt(np.abs(self.c1) ** 2 + np.abs(self.c2) ** 2)

    @classmethod
    def from_vector(cls, v) -> "JcAmplitudes":
        v = np.asarray(v, dtype=complex)
        return cls(v[..., 0], v[..., 1])


def _stack2(a, b, c, d) -> np.ndarray:
    a, b, c, d = np.broadcast_arrays(*(np.asarray(x, dtype=complex) for x in (a, b, c, d)))
    return np.moveaxis(np.array([[a, b], [c, d]]), (0, 1), (-2, -1))


# ============================================================================
# HAMILTONIAN AND DRESSED STATES
# ============================================================================

def jc_sector_hamiltonian(p: JcParams, t: TimeLike) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * p.detuning * t)
    zero = np.zeros_like(phase)
    return _stack2(zero, p.coupling * phase, p.coupling * np.conj(phase), zero)


def jc_dressed_states(p: JcParams, t: TimeLike) -> Tuple[np.ndarray, np.ndarray]:
    """
    (|a,n,t>, |b,n,t>) for eigenvalues +G and -G.

    |a> = (e^{-iΔt}|1,n+1> + |2,n>)/√2,  |b> = (|1,n+1> - e^{iΔt}|2,n>)/√2
    """
    t = np.asarray(t, dtype=float)
    phase = np.exp(-1j * p.detuning * t)
    one = np.ones_like(phase)
    a = np.stack([phase, one], axis=-1) / np.sqrt(2.0)
    b = np.stack([one, -np.conj(phase)], axis=-1) / np.sqrt(2.0)
    return a, b


def jc_berry_connections(p: JcParams) -> Tuple[float, float]:
    """<a|i∂t|a> and <b|i∂t|b>."""
    return 0.5 * p.detuning, -0.5 * p.detuning


# ============================================================================
# EXACT SOLUTION
# ============================================================================

def jc_exact(p: JcParams, init: JcAmplitudes, t: TimeLike) -> JcAmplitudes:
    t = np.asarray(t, dtype=float)
    c10, c20 = complex(init.c1), complex(init.c2)
    big = p.omega_n
    if big == 0.0:
        return JcAmplitudes(np.full(t.shape, c10), np.full(t.shape, c20))
    cos = np.cos(0.5 * big * t)
    sin = np.sin(0.5 * big * t)
    ratio = p.detuning / big
    mix = p.rabi / big
    c1 = (c10 * (cos + 1j * ratio * sin) - 1j * mix * c20 * sin) * np.exp(-0.5j * p.detuning * t)
    c2 = (c20 * (cos - 1j * ratio * sin) - 1j * mix * c10 * sin) * np.exp(0.5j * p.detuning * t)
    return JcAmplitudes(c1, c2)


def jc_exact_propagator(p: JcParams, t: TimeLike) -> np.ndarray:
    col1 = jc_exact(p, JcAmplitudes(1.0, 0.0), t).vector()
    col2 = jc_exact(p, JcAmplitudes(0.0, 1.0), t).vector()
    return np.stack([col1, col2], axis=-1)


# ============================================================================
# DYSON SIDE (SMALL λ)
# ============================================================================

def _check_order(order: int):
    if order not in (0, 1, 2):
        raise ValidationError("order", f"closed forms exist for orders 0, 1, 2, got {order!r}")


def jc_dyson_closed(p: JcParams, init: JcAmplitudes, t: TimeLike, order: int,
                    resummed: bool = False) -> JcAmplitudes:
    """
    Truncation of the exact amplitudes at order λ^order.

    With `resummed`, the second order is written with the shifted detuning
    Δ' = Δ + R_n²/(2Δ) in its inner exponentials, which absorbs the secular
    term iλ²Δt/4 into the phase e^{iδt}, δ = (Δ' - Δ)/2. Orders 0 and 1
    carry no secular term and are the same either way.
    """
    _check_order(order)
    if p.detuning == 0.0:
        raise ZeroDetuning("the λ expansion needs a non-zero detuning")
    t = np.asarray(t, dtype=float)
    lam, delta = p.lam, p.detuning
    c10, c20 = complex(init.c1), complex(init.c2)

    if order == 2 and resummed:
        shift = 0.25 * lam ** 2 * delta
        slow = np.exp(1j * shift * t)
        fast = np.exp(-1j * (delta + shift) * t)
        a, b, kappa = 1.0 - 0.25 * lam ** 2, 0.25 * lam ** 2, 0.5 * lam
        c1 = c10 * (a * slow + b * fast) - kappa * c20 * (slow - fast)
        c2 = c20 * (a * np.conj(slow) + b * np.conj(fast)) - kappa * c10 * (np.conj(fast) - np.conj(slow))
        return JcAmplitudes(c1, c2)

    down = np.exp(-1j * delta * t)
    c1 = np.full(t.shape, c10, dtype=complex)
    c2 = np.full(t.shape, c20, dtype=complex)
    if order >= 1:
        c1 = c1 - 0.5 * lam * c20 * (1.0 - down)
        c2 = c2 - 0.5 * lam * c10 * (np.conj(down) - 1.0)
    if order >= 2:
        c1 = c1 + c10 * 0.25j * lam ** 2 * (delta * t + 1j * (1.0 - down))
        c2 = c2 - c20 * 0.25j * lam ** 2 * (delta * t + 1j * (np.conj(down) - 1.0))
    return JcAmplitudes(c1, c2)


# ============================================================================
# DUAL SIDE (LARGE λ)
# ============================================================================

def _dual_pieces(p: JcParams, t: TimeLike):
    if p.rabi == 0.0:
        raise ZeroCoupling("the 1/λ expansion needs a non-zero Rabi frequency")
    t = np.asarray(t, dtype=float)
    inv_lam = p.detuning / p.rabi
    tau = 0.5 * p.rabi * t
    outer = np.exp(-0.5j * p.detuning * t)
    d = _stack2(outer, 0.0, 0.0, np.conj(outer))
    return t, inv_lam, tau, np.sin(tau), np.cos(tau), d


def jc_leading_propagator(p: JcParams, t: TimeLike) -> np.ndarray:
    """U0 = D(t)[cos(R_n t/2) I - i sin(R_n t/2) σx], D = diag(e^{-iΔt/2}, e^{iΔt/2})."""
    _, _, _, s, c, d = _dual_pieces(p, t)
    return d @ _stack2(c, -1j * s, -1j * s, c)


def jc_first_correction(p: JcParams, t: TimeLike) -> np.ndarray:
    """U1 = (i/λ) sin(R_n t/2) D(t) σz."""
    _, inv_lam, _, s, _, d = _dual_pieces(p, t)
    z = np.zeros_like(s)
    return d @ _stack2(1j * inv_lam * s, z, z, -1j * inv_lam * s)


def jc_second_correction(p: JcParams, t: TimeLike) -> np.ndarray:
    """
    U2 = (1/2λ²) D(t)[-τ sin τ I + i(sin τ - τ cos τ) σx], τ = R_n t/2.

    Equal to -U0 ∫H'∫H' and to the 1/λ² terms of the exact amplitudes.
    """
    _, inv_lam, tau, s, c, d = _dual_pieces(p, t)
    w = 0.5 * inv_lam ** 2
    diag = -w * tau * s
    off = 1j * w * (s - tau * c)
    return d @ _stack2(diag, off, off, diag)


def jc_dual_hamiltonian_closed(p: JcParams, t: TimeLike) -> np.ndarray:
    """H'(t) = -(Δ/2)[cos(R_n t) σz + sin(R_n t) σy]."""
    t = np.asarray(t, dtype=float)
    c, s = np.cos(p.rabi * t), np.sin(p.rabi * t)
    sz, sy = pauli(3), pauli(2)
    return -0.5 * p.detuning * (c[..., None, None] * sz + s[..., None, None] * sy)


def jc_dual_propagator(p: JcParams, t: TimeLike, order: int) -> np.ndarray:
    _check_order(order)
    u = jc_leading_propagator(p, t)
    if order >= 1:
        u = u + jc_first_correction(p, t)
    if order >= 2:
        u = u + jc_second_correction(p, t)
    return u


def jc_dual_closed(p: JcParams, init: JcAmplitudes, t: TimeLike, order: int) -> JcAmplitudes:
    """Apply U0 (+U1 (+U2)) to the initial amplitudes."""
    u = jc_dual_propagator(p, t, order)
    return JcAmplitudes.from_vector(u @ init.vector())


# ============================================================================
# ERROR METRICS
# ============================================================================

def max_amplitude_error(a: JcAmplitudes, b: JcAmplitudes) -> float:
    return float(np.max(np.abs(a.vector() - b.vector())))


def amplitude_error_series(a: JcAmplitudes, b: JcAmplitudes) -> np.ndarray:
    """Per-time max-norm of the amplitude difference."""
    return np.max(np.abs(a.vector() - b.vector()), axis=-1)


def population_error(a: JcAmplitudes, b: JcAmplitudes) -> float:
    """Largest deviation of |c1|² or |c2|² over all times."""
    return float(max(np.max(np.abs(np.abs(a.c1) ** 2 - np.abs(b.c1) ** 2)),
                     np.max(np.abs(np.abs(a.c2) ** 2 - np.abs(b.c2) ** 2))))
