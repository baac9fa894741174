#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Small Dense Complex Linear Algebra
==================================

Operators are complex numpy arrays of shape (N, N), states are complex arrays
of shape (N,). The two-level basis is |2> = (1, 0), |1> = (0, 1) everywhere.
"""

from typing import Tuple

import numpy as np
import structlog

from dds_errors import BadIndex, NoConvergence, NotHermitian

logger = structlog.get_logger(__name__)

DEFAULT_HERMITIAN_TOL = 1e-10

_PAULI = {
    1: np.array([[0, 1], [1, 0]], dtype=complex),
    2: np.array([[0, -1j], [1j, 0]], dtype=complex),
    3: np.array([[1, 0], [0, -1]], dtype=complex),
}


def pauli(k: int) -> np.ndarray:
    """Pauli matrix sigma_k, k in {1, 2, 3}."""
    if k not in _PAULI:
        raise BadIndex(f"Pauli index must be 1, 2 or 3, got {k!r}")
    return _PAULI[k].copy()


def identity(dim: int = 2) -> np.ndarray:
    return np.eye(dim, dtype=complex)


def as_operator(a) -> np.ndarray:
    """Coerce to a finite square complex matrix."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"operator must be square, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("operator has non-finite entries")
    return m


def as_state(v) -> np.ndarray:
    s = np.asarray(v, dtype=complex)
    if s.ndim != 1:
        raise ValueError(f"state must be one-dimensional, got shape {s.shape}")
    if not np.all(np.isfinite(s)):
        raise ValueError("state has non-finite amplitudes")
    return s


def dagger(a: np.ndarray) -> np.ndarray:
    """Conjugate transpose over the last two axes (works on stacks)."""
    return np.conj(np.swapaxes(a, -1, -2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def max_norm(a) -> float:
    """Largest entry modulus; 0.0 for empty input."""
    a = np.asarray(a)
    return float(np.max(np.abs(a))) if a.size else 0.0


def norm(v) -> float:
    return float(np.linalg.norm(np.asarray(v)))


def is_hermitian(a, tol: float = DEFAULT_HERMITIAN_TOL) -> bool:
    m = np.asarray(a, dtype=complex)
    scale = max(1.0, max_norm(m))
    return max_norm(m - dagger(m)) <= tol * scale


def is_unitary(u, tol: float = 1e-10) -> bool:
    m = np.asarray(u, dtype=complex)
    return max_norm(dagger(m) @ m - np.eye(m.shape[-1])) <= tol


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """
    Make the largest-modulus component of every column real positive.

    Ties go to the lowest index; the result is deterministic for a given
    input matrix.
    """
    v = np.array(vectors, dtype=complex)
    mags = np.abs(v)
    for n in range(v.shape[1]):
        col = mags[:, n]
        k = int(np.flatnonzero(col >= col.max() * (1.0 - 1e-12))[0])
        v[:, n] *= np.exp(-1j * np.angle(v[k, n]))
    return v


def hermitian_eigensystem(a, tol: float = DEFAULT_HERMITIAN_TOL) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a Hermitian operator.

    Args:
        a: Square Hermitian operator
        tol: Relative tolerance of the Hermiticity check

    Returns:
        (eigenvalues ascending, eigenvectors as columns with fixed phases)
    """
    m = as_operator(a)
    if not is_hermitian(m, tol):
        raise NotHermitian(f"operator is not Hermitian within {tol:g}")
    h = 0.5 * (m + dagger(m))
    try:
        values, vectors = np.linalg.eigh(h)
    except np.linalg.LinAlgError as e:
        raise NoConvergence(f"eigensolver did not converge: {e}") from e
    return values, fix_phases(vectors)


def unitary_exponential(h, t: float) -> np.ndarray:
    """exp(-i H t) for Hermitian H, built from the eigensystem."""
    values, vectors = hermitian_eigensystem(h)
    phases = np.exp(-1j * values * t)
    return (vectors * phases) @ dagger(vectors)
