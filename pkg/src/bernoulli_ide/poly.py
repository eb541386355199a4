"""Dense univariate polynomials in the monomial basis.

Index ``i`` of ``coeffs`` holds the coefficient of ``x**i``.  Two carriers
share one implementation: :class:`Polynomial` (floats, used at run time) and
:class:`RationalPolynomial` (exact :class:`fractions.Fraction`, used while
building the basis).
"""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Sequence

import numpy as np


def _trim(coeffs: Sequence) -> tuple:
    n = len(coeffs)
    while n and coeffs[n - 1] == 0:
        n -= 1
    return tuple(coeffs[:n])


class _PolyBase:
    __slots__ = ("coeffs",)

    _zero = 0

    def __init__(self, coeffs: Iterable = ()):
        object.__setattr__(self, "coeffs", _trim([self._coerce(c) for c in coeffs]))

    @staticmethod
    def _coerce(c):
        return c

    def __setattr__(self, name, value):
        raise AttributeError(f"{type(self).__name__} is immutable")

    # -- structure -------------------------------------------------------
    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self) -> int:
        return len(self.coeffs)

    def __iter__(self):
        return iter(self.coeffs)

    def __getitem__(self, i: int):
        if i < len(self.coeffs):
            return self.coeffs[i]
        return self._zero

    def __eq__(self, other) -> bool:
        if isinstance(other, _PolyBase):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.coeffs))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({list(self.coeffs)!r})"

    # -- arithmetic ------------------------------------------------------
    def __call__(self, x):
        return self.eval(x)

    def eval(self, x):
        """Horner evaluation; ``x`` may be a scalar or a numpy array."""
        acc = self._zero * x if isinstance(x, np.ndarray) else self._zero
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def add(self, other: _PolyBase) -> _PolyBase:
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] = out[i] + c
        return type(self)(out)

    def scale(self, c) -> _PolyBase:
        return type(self)([c * a for a in self.coeffs])

    def sub(self, other: _PolyBase) -> _PolyBase:
        return self.add(other.scale(-1))

    def mul(self, other: _PolyBase) -> _PolyBase:
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return type(self)()
        out = [self._zero] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai == 0:
                continue
            for j, bj in enumerate(b):
                out[i + j] = out[i + j] + ai * bj
        return type(self)(out)

    __add__ = add
    __sub__ = sub

    def __mul__(self, other):
        if isinstance(other, _PolyBase):
            return self.mul(other)
        return self.scale(other)

    __rmul__ = __mul__

    def __neg__(self):
        return self.scale(-1)

    def integrate(self) -> _PolyBase:
        """Antiderivative vanishing at 0, i.e. ``x -> int_0^x p(t) dt``."""
        if not self.coeffs:
            return type(self)()
        return type(self)([self._zero] + [self._div(c, i + 1) for i, c in enumerate(self.coeffs)])

    def differentiate(self, times: int = 1) -> _PolyBase:
        p = self
        for _ in range(times):
            p = type(self)([i * c for i, c in enumerate(p.coeffs)][1:])
        return p

    def definite_integral(self):
        """Integral over [0, 1]."""
        return sum((self._div(c, i + 1) for i, c in enumerate(self.coeffs)), self._zero)

    @staticmethod
    def _div(c, k: int):
        return c / k


class Polynomial(_PolyBase):
    """Float polynomial; canonical form has a nonzero trailing coefficient."""

    __slots__ = ()
    _zero = 0.0

    @staticmethod
    def _coerce(c):
        return float(c)

    def to_array(self, length: int | None = None) -> np.ndarray:
        out = np.zeros(max(len(self.coeffs), length or 0))
        out[: len(self.coeffs)] = self.coeffs
        return out

    @classmethod
    def from_array(cls, a) -> Polynomial:
        return cls(np.asarray(a, dtype=float).tolist())


class RationalPolynomial(_PolyBase):
    """Exact polynomial with :class:`~fractions.Fraction` coefficients."""

    __slots__ = ()
    _zero = Fraction(0)

    @staticmethod
    def _coerce(c):
        if isinstance(c, (int, Rational)):
            return Fraction(c)
        raise TypeError(f"rational coefficient required, got {type(c).__name__}")

    @staticmethod
    def _div(c, k: int):
        return c / Fraction(k)

    def to_float(self) -> Polynomial:
        return Polynomial([float(c) for c in self.coeffs])


# Functional aliases for the operation names used across the package.

def eval(p: _PolyBase, x):  # noqa: A001 - deliberate module-level name
    return p.eval(x)


def add(p: _PolyBase, q: _PolyBase) -> _PolyBase:
    return p.add(q)


def scale(p: _PolyBase, c) -> _PolyBase:
    return p.scale(c)


def mul(p: _PolyBase, q: _PolyBase) -> _PolyBase:
    return p.mul(q)


def integrate(p: _PolyBase) -> _PolyBase:
    return p.integrate()


def differentiate(p: _PolyBase) -> _PolyBase:
    return p.differentiate()
