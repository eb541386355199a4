"""Bernoulli polynomials and the orthonormal basis built from them on [0, 1].

The basis is obtained by classical Gram-Schmidt on ``B_0 .. B_n`` carried out
in exact rational arithmetic; only the final normalisation introduces a
floating-point square root.  :func:`shifted_legendre` is an independent
construction of the same family used as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import BasisError
from .poly import Polynomial, RationalPolynomial

MAX_DEGREE = 16


@lru_cache(maxsize=None)
def _bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    out = [Fraction(1)]
    for m in range(1, n + 1):
        s = sum(math.comb(m + 1, k) * out[k] for k in range(m))
        out.append(-s / (m + 1))
    return tuple(out)


def bernoulli_numbers(n: int) -> list[Fraction]:
    """Return ``B_0(0) .. B_n(0)`` (convention ``B_1 = -1/2``)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    return list(_bernoulli_numbers(n))


def kronecker_bernoulli_number(n: int) -> Fraction:
    """Bernoulli number from Kronecker's double sum.

    The inner power sum stops at ``j - 1``; running it to ``j`` (with
    ``0**0 == 1``) gives ``B_0 = 2`` and contradicts ``B_1(x) = x - 1/2``.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    total = Fraction(0)
    for j in range(1, n + 2):
        power_sum = sum(k**n for k in range(j))
        total += Fraction((-1) ** j * math.comb(n + 1, j) * power_sum, j)
    return -total


def bernoulli_poly(m: int) -> RationalPolynomial:
    """Exact ``B_m(x) = sum_j C(m, j) B_j(0) x**(m - j)``."""
    if m < 0:
        raise ValueError("m must be non-negative")
    b = _bernoulli_numbers(m)
    coeffs = [Fraction(0)] * (m + 1)
    for j in range(m + 1):
        coeffs[m - j] = math.comb(m, j) * b[j]
    return RationalPolynomial(coeffs)


def inner(p: RationalPolynomial, q: RationalPolynomial) -> Fraction:
    """Exact L2[0, 1] inner product of two rational polynomials."""
    return p.mul(q).definite_integral()


@dataclass(frozen=True, eq=False)
class BasisSet:
    """Orthonormal polynomials ``phi_0 .. phi_n`` on [0, 1].

    ``phis[k] == scales[k] * orthogonal[k]`` where ``orthogonal[k]`` is the
    exact monic Gram-Schmidt output and ``scales[k] = 1/sqrt(norms_sq[k])``.
    ``to_monomial @ c`` gives monomial coefficients of ``sum c_k phi_k``;
    ``from_monomial`` is its inverse on polynomials of degree <= n.
    """

    n: int
    phis: tuple[Polynomial, ...]
    orthogonal: tuple[RationalPolynomial, ...]
    norms_sq: tuple[Fraction, ...]
    to_monomial: np.ndarray
    from_monomial: np.ndarray

    @property
    def size(self) -> int:
        return self.n + 1

    @property
    def scales(self) -> np.ndarray:
        return np.array([1.0 / math.sqrt(nsq) for nsq in self.norms_sq])

    def __len__(self) -> int:
        return self.n + 1

    def __getitem__(self, k: int) -> Polynomial:
        return self.phis[k]

    def evaluate(self, x) -> np.ndarray:
        """Matrix ``V`` with ``V[k, i] = phi_k(x_i)``."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        # Three-term recurrence of P_k(2x - 1); Horner on the monomial
        # coefficients cancels badly once they reach ~1e4 and beyond.
        s = 2.0 * x - 1.0
        p = np.empty((self.size,) + x.shape)
        p[0] = 1.0
        if self.n >= 1:
            p[1] = s
        for k in range(1, self.n):
            p[k + 1] = ((2 * k + 1) * s * p[k] - k * p[k - 1]) / (k + 1)
        return p * np.sqrt(2.0 * np.arange(self.size) + 1.0).reshape((-1,) + (1,) * x.ndim)

    def gram_matrix(self) -> np.ndarray:
        """``<phi_i, phi_j>`` with exact integration of the products.

        Orthogonal pairs are exactly zero; diagonal entries carry only the
        rounding of the final square root.
        """
        g = np.zeros((self.size, self.size))
        s = self.scales
        for i in range(self.size):
            for j in range(i, self.size):
                v = float(inner(self.orthogonal[i], self.orthogonal[j])) * s[i] * s[j]
                g[i, j] = g[j, i] = v
        return g


def _monomial_moment(a: int, p: RationalPolynomial) -> Fraction:
    # <x**a, p> on [0, 1]
    return sum((c / (a + i + 1) for i, c in enumerate(p.coeffs)), Fraction(0))


@lru_cache(maxsize=None)
def orthonormal_basis(n: int) -> BasisSet:
    """Gram-Schmidt orthonormalisation of ``B_0 .. B_n`` under ``int_0^1 f g``.

    Leading coefficients come out positive because every ``B_k`` is monic.
    """
    if not 0 <= n <= MAX_DEGREE:
        raise BasisError(f"basis degree must lie in [0, {MAX_DEGREE}], got {n}")
    ortho: list[RationalPolynomial] = []
    norms: list[Fraction] = []
    for k in range(n + 1):
        v = bernoulli_poly(k)
        b = v
        for u, nsq in zip(ortho, norms):
            v = v.sub(u.scale(inner(b, u) / nsq))
        ortho.append(v)
        norms.append(inner(v, v))

    scales = [1.0 / math.sqrt(nsq) for nsq in norms]
    phis = tuple(Polynomial([float(c) * s for c in v.coeffs]) for v, s in zip(ortho, scales))

    size = n + 1
    to_mono = np.zeros((size, size))
    from_mono = np.zeros((size, size))
    for k, phi in enumerate(phis):
        to_mono[: len(phi), k] = phi.coeffs
        for a in range(size):
            from_mono[k, a] = float(_monomial_moment(a, ortho[k])) * scales[k]
    to_mono.setflags(write=False)
    from_mono.setflags(write=False)
    return BasisSet(n, phis, tuple(ortho), tuple(norms), to_mono, from_mono)


def shifted_legendre_exact(k: int) -> RationalPolynomial:
    """``P_k(2x - 1)`` from the three-term recurrence, exact coefficients."""
    if k < 0:
        raise ValueError("k must be non-negative")
    y = RationalPolynomial([-1, 2])
    p_prev, p = RationalPolynomial([1]), y
    if k == 0:
        return p_prev
    for j in range(1, k):
        # (j+1) P_{j+1} = (2j+1) y P_j - j P_{j-1}
        p_prev, p = p, y.mul(p).scale(Fraction(2 * j + 1, j + 1)).sub(p_prev.scale(Fraction(j, j + 1)))
    return p


def shifted_legendre(k: int) -> Polynomial:
    """Normalised shifted Legendre polynomial ``sqrt(2k+1) P_k(2x - 1)``."""
    s = math.sqrt(2 * k + 1)
    return Polynomial([float(c) * s for c in shifted_legendre_exact(k).coeffs])
