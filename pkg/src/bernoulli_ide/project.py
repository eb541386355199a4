"""Quadrature, inner products and projection onto the orthonormal basis.

A *real function* throughout the package is any callable that accepts a
1-D float array of points in [0, 1] and returns values of the same shape
(a scalar is broadcast).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .basis import BasisSet
from .errors import DimensionError, QuadratureError
from .poly import Polynomial

RealFunction = Callable[[np.ndarray], np.ndarray]

MAX_ORDER = 128
SUP_SAMPLES = 1001


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes strictly increasing in (0, 1); weights sum to one."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def order(self) -> int:
        return len(self.nodes)

    def integrate(self, f: RealFunction) -> float:
        return float(self.weights @ sample(f, self.nodes))

    def mapped(self, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Nodes and weights of the same rule on [0, b]."""
        return self.nodes * b, self.weights * b


def _legendre_with_derivative(q: int, x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    p0, p1 = np.ones_like(x), x.copy()
    for j in range(1, q):
        p0, p1 = p1, ((2 * j + 1) * x * p1 - j * p0) / (j + 1)
    dp = q * (x * p1 - p0) / (x * x - 1.0)
    return p1, dp


@lru_cache(maxsize=None)
def gauss_legendre(q: int) -> QuadratureRule:
    """``q``-point Gauss-Legendre rule on [0, 1], exact to degree ``2q - 1``.

    Roots of ``P_q`` are found by Newton's method from the Tricomi-style
    initial guess ``cos(pi (i + 3/4) / (q + 1/2))``.
    """
    if not 1 <= q <= MAX_ORDER:
        raise ValueError(f"quadrature order must lie in [1, {MAX_ORDER}], got {q}")
    if q == 1:
        nodes, weights = np.array([0.5]), np.array([1.0])
    else:
        x = np.cos(np.pi * (np.arange(q) + 0.75) / (q + 0.5))
        for _ in range(100):
            p, dp = _legendre_with_derivative(q, x)
            dx = p / dp
            x = x - dx
            if np.max(np.abs(dx)) <= 1e-15:
                break
        _, dp = _legendre_with_derivative(q, x)
        w = 2.0 / ((1.0 - x * x) * dp * dp)
        order = np.argsort(x)
        x, w = x[order], w[order]
        # enforce the exact symmetry of the rule
        x = 0.5 * (x - x[::-1])
        w = 0.5 * (w + w[::-1])
        nodes, weights = 0.5 * (x + 1.0), 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes, weights)


def default_order(n: int) -> int:
    return max(40, 2 * n + 20)


def default_rule(n: int) -> QuadratureRule:
    return gauss_legendre(default_order(n))


def sample(f: RealFunction, x: np.ndarray) -> np.ndarray:
    """Evaluate ``f`` at ``x``, broadcasting scalars and rejecting non-finite values."""
    values = np.broadcast_to(np.asarray(f(x), dtype=float), np.shape(x))
    if not np.all(np.isfinite(values)):
        bad = np.asarray(x)[~np.isfinite(values)]
        raise QuadratureError(f"non-finite integrand sample at x = {float(bad.flat[0])!r}")
    return values


def inner_product(f: RealFunction, g: RealFunction, quad: QuadratureRule) -> float:
    return float(np.sum(quad.weights * sample(f, quad.nodes) * sample(g, quad.nodes)))


def project(f: RealFunction, basis: BasisSet, quad: QuadratureRule | None = None) -> np.ndarray:
    """Coefficients ``c_k = <f, phi_k>`` of the best L2 approximation."""
    quad = quad or default_rule(basis.n)
    v = basis.evaluate(quad.nodes)
    return v @ (quad.weights * sample(f, quad.nodes))


def reconstruct(c, basis: BasisSet) -> Polynomial:
    """Monomial form of ``sum_k c_k phi_k``."""
    c = np.asarray(c, dtype=float)
    if c.shape != (basis.size,):
        raise DimensionError(f"coefficient vector of shape {c.shape} does not match basis of size {basis.size}")
    return Polynomial.from_array(basis.to_monomial @ c)


def sample_grid(count: int = SUP_SAMPLES) -> np.ndarray:
    return np.linspace(0.0, 1.0, count)


def sup_distance(f: RealFunction, g: RealFunction, count: int = SUP_SAMPLES) -> float:
    """``max |f - g|`` over ``count`` equispaced points of [0, 1]."""
    x = sample_grid(count)
    return float(np.max(np.abs(sample(f, x) - sample(g, x))))

