"""Small dense linear algebra on numpy arrays.

Matrices are 2-D ``float64`` arrays, coefficient vectors are 1-D.  The
systems solved here are at most 17 x 17, so a plain LU with partial
pivoting is used; its singularity test is relative to the magnitude of
each pivot column in the input matrix.
"""

from __future__ import annotations

import numpy as np

from .errors import DimensionError, SingularMatrixError

SINGULAR_RTOL = 1e-13


def _as_matrix(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise DimensionError(f"expected a 2-D matrix, got shape {a.shape}")
    return a


def identity(n: int) -> np.ndarray:
    return np.eye(n)


def transpose(a) -> np.ndarray:
    return _as_matrix(a).T.copy()


def mat_add(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape != b.shape:
        raise DimensionError(f"cannot add {a.shape} and {b.shape}")
    return a + b


def mat_mul(a, b) -> np.ndarray:
    a, b = _as_matrix(a), _as_matrix(b)
    if a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    return a @ b


def mat_pow(a, m: int) -> np.ndarray:
    """``a**m`` by repeated left multiplication; ``a**0`` is the identity."""
    a = _as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"matrix power needs a square matrix, got {a.shape}")
    if m < 0:
        raise ValueError("negative matrix powers are not supported")
    out = np.eye(a.shape[0])
    for _ in range(m):
        out = a @ out
    return out


def lu_factor(a) -> tuple[np.ndarray, np.ndarray]:
    """Doolittle LU with partial pivoting.

    Returns ``(lu, perm)`` with unit-lower ``L`` below the diagonal of
    ``lu``, ``U`` on and above it, and ``a[perm] == L @ U``.
    """
    a = _as_matrix(a)
    n, m = a.shape
    if n != m:
        raise DimensionError(f"LU needs a square matrix, got {a.shape}")
    col_scale = np.abs(a).max(axis=0) if n else np.zeros(0)
    lu = a.copy()
    perm = np.arange(n)
    for j in range(n):
        p = j + int(np.argmax(np.abs(lu[j:, j])))
        pivot = lu[p, j]
        if pivot == 0.0 or abs(pivot) < SINGULAR_RTOL * col_scale[j]:
            raise SingularMatrixError(
                f"pivot {pivot:.3e} in column {j} is below {SINGULAR_RTOL:g} x column scale"
            )
        if p != j:
            lu[[j, p]] = lu[[p, j]]
            perm[[j, p]] = perm[[p, j]]
        lu[j + 1 :, j] /= pivot
        lu[j + 1 :, j + 1 :] -= np.outer(lu[j + 1 :, j], lu[j, j + 1 :])
    return lu, perm


def lu_solve(lu: np.ndarray, perm: np.ndarray, b) -> np.ndarray:
    b = np.asarray(b, dtype=float)
    n = lu.shape[0]
    y = b[perm].copy()
    for i in range(n):
        y[i] -= lu[i, :i] @ y[:i]
    for i in range(n - 1, -1, -1):
        y[i] = (y[i] - lu[i, i + 1 :] @ y[i + 1 :]) / lu[i, i]
    return y


def solve(a, b) -> np.ndarray:
    a = _as_matrix(a)
    b = np.asarray(b, dtype=float)
    if b.shape != (a.shape[0],):
        raise DimensionError(f"right-hand side of shape {b.shape} does not match {a.shape}")
    return lu_solve(*lu_factor(a), b)


def solve_transposed(m, r) -> np.ndarray:
    """Solve ``C^T M = r^T`` for ``C``, i.e. ``M^T C = r``."""
    return solve(transpose(m), r)


def condition_estimate(m) -> float:
    """1-norm condition number of ``m`` (``inf`` when singular)."""
    m = _as_matrix(m)
    try:
        return float(np.linalg.cond(m, 1))
    except np.linalg.LinAlgError:
        return float("inf")
