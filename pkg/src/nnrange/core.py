"""Matrices, unit vectors and the three maps f_N, g, h."""
from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .errors import DimensionMismatch, KernelVector, ZeroLevel

KERNEL_TOL = 1e-14
LEVEL_TOL = 1e-14
UNIT_TOL = 1e-12
SAMPLE_BLOCK = 8192


class ShellPoint(NamedTuple):
    v1: float
    v2: float
    v3: float


def as_matrix(A) -> np.ndarray:
    """Coerce to a finite square complex128 array."""
    M = np.asarray(A, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] < 1:
        raise DimensionMismatch(f"expected a square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix entries must be finite")
    return M


def as_unit_vector(x, n: int | None = None) -> np.ndarray:
    v = np.asarray(x, dtype=complex).reshape(-1)
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"vector of length {v.shape[0]} for an n={n} matrix")
    if abs(np.linalg.norm(v) - 1.0) > UNIT_TOL:
        raise ValueError("x must be a unit vector")
    return v


def kernel_threshold(A: np.ndarray) -> float:
    return KERNEL_TOL * max(np.linalg.norm(A), 1e-300)


def f_n_map(A, x) -> complex:
    """Normalized quadratic form x*Ax / ||Ax|| for a unit vector x."""
    M = as_matrix(A)
    v = as_unit_vector(x, M.shape[0])
    Ax = M @ v
    nrm = np.linalg.norm(Ax)
    if nrm <= kernel_threshold(M):
        raise KernelVector("x lies in the kernel of A")
    return complex(np.vdot(v, Ax) / nrm)


def g_map(A, x) -> ShellPoint:
    """Lift x to (Re x*Ax, Im x*Ax, ||Ax||^2)."""
    M = as_matrix(A)
    v = as_unit_vector(x, M.shape[0])
    Ax = M @ v
    q = np.vdot(v, Ax)
    return ShellPoint(float(q.real), float(q.imag), float(np.vdot(Ax, Ax).real))


def h_map(v) -> complex:
    v1, v2, v3 = (float(c) for c in v)
    if v3 <= LEVEL_TOL:
        raise ZeroLevel("h is undefined at v3 = 0")
    return complex(v1, v2) / np.sqrt(v3)


# Vectorised forms: X holds one unit vector per row.

def g_values(A, X) -> np.ndarray:
    """Rows (v1, v2, v3) of g at every row of X."""
    M = as_matrix(A)
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    AX = X @ M.T
    q = np.einsum("ij,ij->i", X.conj(), AX)
    v3 = np.einsum("ij,ij->i", AX.conj(), AX).real
    return np.column_stack([q.real, q.imag, v3])


def h_values(V) -> np.ndarray:
    V = np.atleast_2d(np.asarray(V, dtype=float))
    if np.any(V[:, 2] <= LEVEL_TOL):
        raise ZeroLevel("h is undefined at v3 = 0")
    return (V[:, 0] + 1j * V[:, 1]) / np.sqrt(V[:, 2])


def f_n_values(A, X) -> tuple[np.ndarray, np.ndarray]:
    """f_N at every row of X; returns (values, keep mask), kernel rows dropped."""
    M = as_matrix(A)
    X = np.atleast_2d(np.asarray(X, dtype=complex))
    AX = X @ M.T
    q = np.einsum("ij,ij->i", X.conj(), AX)
    nrm = np.linalg.norm(AX, axis=1)
    keep = nrm > kernel_threshold(M)
    vals = q[keep] / nrm[keep]
    # Cauchy-Schwarz bounds the modulus by 1; pull rounding overshoot back
    over = np.abs(vals) > 1.0
    vals[over] /= np.abs(vals[over])
    return vals, keep


def _block_rng(seed: int, block: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & 0xFFFFFFFFFFFFFFFF, block])


def sample_unit_vectors(n: int, count: int, seed: int) -> np.ndarray:
    """count x n array of uniform points on the complex unit sphere.

    Block k of SAMPLE_BLOCK rows comes from its own substream keyed by
    (seed, k), so any prefix and any split of the work is reproducible.
    """
    if n < 1 or count < 1:
        raise ValueError("n and count must be positive")
    out = np.empty((count, n), dtype=complex)
    for k, start in enumerate(range(0, count, SAMPLE_BLOCK)):
        stop = min(start + SAMPLE_BLOCK, count)
        rng = _block_rng(seed, k)
        # always draw a full block so every prefix of the stream is stable
        z = rng.standard_normal((SAMPLE_BLOCK, n)) + 1j * rng.standard_normal((SAMPLE_BLOCK, n))
        z = z[: stop - start]
        out[start:stop] = z / np.linalg.norm(z, axis=1, keepdims=True)
    return out


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    """Haar unitary from QR of a complex Gaussian with the phase fix on R."""
    Z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))


def is_normal(A, rtol: float = 1e-12) -> bool:
    M = as_matrix(A)
    H = M.conj().T
    return np.linalg.norm(H @ M - M @ H) <= rtol * max(np.linalg.norm(M) ** 2, 1e-300)
