"""Operational matrices acting on the basis vector ``phi(x)``.

``theta`` integrates, ``convolution_matrix`` applies a Cauchy kernel
``(x - t)**(m - 1)``, ``product_matrix`` multiplies by a coefficient
function and ``kernel_matrix`` applies a weighted general Volterra kernel.
Each returns ``J`` with ``(J phi)_j`` the best approximation in the span
of ``phi`` of the operator applied to ``phi_j``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Context
from functools import lru_cache
from typing import Callable

import numpy as np

from .basis import BasisSet
from .errors import QuadratureError
from .project import QuadratureRule, RealFunction, default_rule, sample

KernelFunction = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class OperationalMatrix:
    n: int
    theta: np.ndarray

    @property
    def size(self) -> int:
        return self.n + 1


_CTX = Context(prec=40)


@lru_cache(maxsize=None)
def _half_rsqrt(p: int) -> float:
    # 1 / (2 sqrt(p)) rounded once; the float formula can be off by an ulp
    return float(_CTX.divide(1, _CTX.multiply(2, _CTX.sqrt(p))))


def theta_entries(n: int) -> np.ndarray:
    t = np.zeros((n + 1, n + 1))
    t[0, 0] = 0.5
    for i in range(n + 1):
        if i >= 1:
            t[i, i - 1] = -_half_rsqrt((2 * i - 1) * (2 * i + 1))
        if i < n:
            t[i, i + 1] = _half_rsqrt((2 * i + 1) * (2 * i + 3))
    return t


def theta(n: int) -> OperationalMatrix:
    """Tridiagonal integration matrix, ``int_0^x phi(t) dt ~ Theta phi(x)``.

    Row ``n`` drops the ``phi_{n+1}`` component of ``int_0^x phi_n``; every
    other row is exact.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    t = theta_entries(n)
    t.setflags(write=False)
    return OperationalMatrix(n, t)


def truncation_defect(n: int) -> float:
    """Coefficient of ``phi_{n+1}`` dropped from row ``n`` of ``theta(n)``."""
    return _half_rsqrt((2 * n + 1) * (2 * n + 3))


def convolution_matrix(m: int, op: OperationalMatrix) -> np.ndarray:
    """Matrix for ``int_0^x (x - t)**(m - 1) phi(t) dt``.

    Equals ``(m-1)! Theta**m`` except in the last ``m - 1`` rows: the power
    is taken in a basis enlarged by ``m - 1`` degrees and then truncated, so
    contributions routed through ``phi_{n+1}, ...`` are kept.  The result is
    the exact orthogonal projection of the Cauchy integral of each
    ``phi_j``.
    """
    if m < 1:
        raise ValueError("convolution order m must be >= 1")
    n = op.n
    big = theta_entries(n + m - 1)
    power = np.linalg.matrix_power(big, m)[: n + 1, : n + 1]
    return math.factorial(m - 1) * power


def product_matrix(a: RealFunction, basis: BasisSet, quad: QuadratureRule | None = None) -> np.ndarray:
    """``A[j, k] = <a phi_j, phi_k>`` so that ``a(x) phi(x) ~ A phi(x)``."""
    quad = quad or default_rule(basis.n)
    v = basis.evaluate(quad.nodes)
    wa = quad.weights * sample(a, quad.nodes)
    return (v * wa) @ v.T


def kernel_matrix(
    f: RealFunction,
    kernel: KernelFunction,
    basis: BasisSet,
    quad: QuadratureRule | None = None,
) -> np.ndarray:
    """Row ``j`` is the projection of ``f(x) int_0^x K(x, t) phi_j(t) dt``.

    The inner integral at each outer node ``x`` uses the same rule mapped
    onto [0, x].
    """
    quad = quad or default_rule(basis.n)
    x, w = quad.nodes, quad.weights
    q = len(x)
    xx = np.repeat(x[:, None], q, axis=1)
    tt = xx * x[None, :]
    k = np.broadcast_to(np.asarray(kernel(xx, tt), dtype=float), xx.shape)
    if not np.all(np.isfinite(k)):
        raise QuadratureError("non-finite kernel sample on 0 <= t <= x <= 1")
    inner_w = xx * w[None, :] * k
    phi_t = basis.evaluate(tt.ravel()).reshape(basis.size, q, q)
    inner = np.einsum("ab,jab->aj", inner_w, phi_t)
    g = inner * sample(f, x)[:, None]
    v = basis.evaluate(x)
    return (g.T * w) @ v.T
