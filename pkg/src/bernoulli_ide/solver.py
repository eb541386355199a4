"""Spectral solution of linear Volterra integro-differential equations.

The problem solved on [0, 1] is ::

    sum_i a_i(x) y^(i)(x) + sum_terms w(x) int_0^x K(x, t) y^(j)(t) dt = r(x)

with ``y^(i)(0) = y_i`` for ``i < k``.  Writing ``y^(k) = C^T phi`` makes
``y^(i) ~ C^T Theta^(k-i) phi + (Taylor polynomial of the ICs)^(i)``.  All
IC contributions are moved to the right-hand side, which is then projected,
giving the square system ``C^T M = R^T``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Iterable, Union

import numpy as np

from . import linalg
from .basis import MAX_DEGREE, BasisSet, orthonormal_basis
from .errors import IdeError, ProblemError
from .expr import Function, Kernel, to_string
from .opmat import convolution_matrix, kernel_matrix, product_matrix, theta
from .poly import Polynomial
from .project import (
    QuadratureRule,
    RealFunction,
    default_rule,
    project,
    reconstruct,
    sample,
    sample_grid,
)

Coefficient = Union[float, Function]


@dataclass(frozen=True)
class Convolution:
    """Cauchy kernel ``(x - t)**(m - 1)``."""

    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ProblemError(f"convolution kernel needs m >= 1, got {self.m}")

    def __call__(self, x, t):
        return (np.asarray(x) - np.asarray(t)) ** (self.m - 1)


@dataclass(frozen=True)
class IntegralTerm:
    """``weight(x) * int_0^x kernel(x, t) y^(deriv)(t) dt``.

    ``weight`` is either a constant multiplier or a function of ``x``.
    """

    weight: Coefficient
    kernel: Union[Convolution, Kernel]
    deriv: int = 0

    @property
    def has_constant_weight(self) -> bool:
        return not isinstance(self.weight, Function)

    def weight_function(self) -> RealFunction:
        return _as_function(self.weight)


def _as_function(a: Coefficient) -> RealFunction:
    if isinstance(a, Function):
        return a
    value = float(a)
    return lambda x: np.full(np.shape(x), value)


@dataclass(frozen=True)
class IdeProblem:
    order: int
    coeffs: tuple[Coefficient, ...]
    integrals: tuple[IntegralTerm, ...]
    initial: tuple[float, ...]
    rhs: Function
    exact: Function | None = None
    name: str = "problem"

    def __post_init__(self):
        k = self.order
        if k < 1:
            raise ProblemError(f"order k must satisfy k >= 1, got {k}")
        if len(self.coeffs) != k + 1:
            raise ProblemError(f"expected {k + 1} differential coefficients a_0..a_{k}, got {len(self.coeffs)}")
        if len(self.initial) != k:
            raise ProblemError(f"expected exactly {k} initial conditions, got {len(self.initial)}")
        for idx, term in enumerate(self.integrals):
            if not 0 <= term.deriv < k:
                raise ProblemError(f"integral term {idx}: derivative order j={term.deriv} must satisfy 0 <= j < k={k}")
        lead = self.coeffs[k]
        if isinstance(lead, Function):
            if not np.any(lead(sample_grid()) != 0):
                raise ProblemError(f"leading coefficient a_{k} vanishes on [0, 1]")
        elif float(lead) == 0.0:
            raise ProblemError(f"leading coefficient a_{k} must be nonzero")

    @property
    def has_constant_coefficients(self) -> bool:
        return not any(isinstance(a, Function) for a in self.coeffs)

    def scaled(self, c: float) -> IdeProblem:
        """Same problem with every coefficient, weight and the RHS scaled by ``c``."""

        def sc(a):
            if isinstance(a, Function):
                return Function(f"({c!r})*({_text(a)})")
            return c * float(a)

        return IdeProblem(
            self.order,
            tuple(sc(a) for a in self.coeffs),
            tuple(IntegralTerm(sc(t.weight), t.kernel, t.deriv) for t in self.integrals),
            self.initial,
            Function(f"({c!r})*({_text(self.rhs)})"),
            self.exact,
            self.name,
        )


def _text(f: Function) -> str:
    return to_string(f.expr)


@dataclass(frozen=True)
class Diagnostics:
    max_residual: float
    max_error: float | None
    condition_estimate: float


@dataclass(frozen=True, eq=False)
class SpectralSolution:
    n: int
    C: np.ndarray
    y_poly: Polynomial
    ic_poly: Polynomial
    diagnostics: Diagnostics
    elapsed_ms: float = field(default=0.0, compare=False)

    def __call__(self, x):
        return self.y_poly.eval(np.asarray(x, dtype=float))


# -- building blocks -------------------------------------------------------------

def ic_polynomial(p: IdeProblem) -> Polynomial:
    """Taylor polynomial ``sum_i y_i x**i / i!`` of the initial conditions."""
    return Polynomial([y / math.factorial(i) for i, y in enumerate(p.initial)])


def _cauchy_integral(m: int, q: Polynomial) -> Polynomial:
    # int_0^x (x - t)^(m-1) t^p dt = (m-1)! p! / (m+p)! x^(m+p)
    out = [0.0] * (len(q) + m)
    for p_, c in enumerate(q.coeffs):
        out[p_ + m] = c * math.factorial(m - 1) * math.factorial(p_) / math.factorial(m + p_)
    return Polynomial(out)


def _volterra_quadrature(kernel, g: RealFunction, x: np.ndarray, quad: QuadratureRule) -> np.ndarray:
    """``int_0^x K(x, t) g(t) dt`` at each point of ``x`` by the rule mapped to [0, x]."""
    x = np.asarray(x, dtype=float)
    xx = x[:, None]
    tt = xx * quad.nodes[None, :]
    ww = xx * quad.weights[None, :]
    k = np.broadcast_to(np.asarray(kernel(np.broadcast_to(xx, tt.shape), tt), dtype=float), tt.shape)
    gv = sample(g, tt.ravel()).reshape(tt.shape)
    return np.sum(ww * k * gv, axis=1)


def effective_rhs(p: IdeProblem, quad: QuadratureRule | None = None) -> RealFunction:
    """Right-hand side after moving every initial-condition contribution across.

    Convolution integrals of the IC polynomial are done in closed form;
    general kernels use the rule ``quad`` mapped to [0, x].
    """
    quad = quad or default_rule(7)
    q = ic_polynomial(p)
    derivs = [q.differentiate(i) for i in range(p.order + 1)]
    coeff_terms = [(_as_function(a), derivs[i]) for i, a in enumerate(p.coeffs) if not derivs[i].is_zero()]
    closed, numeric = [], []
    for term in p.integrals:
        qj = derivs[term.deriv]
        if qj.is_zero():
            continue
        if isinstance(term.kernel, Convolution):
            closed.append((term.weight_function(), _cauchy_integral(term.kernel.m, qj)))
        else:
            numeric.append((term.weight_function(), term.kernel, qj))
    rhs = p.rhs

    def r_tilde(x):
        x = np.asarray(x, dtype=float)
        out = np.array(sample(rhs, x), dtype=float)
        for a, d in coeff_terms:
            out -= sample(a, x) * d.eval(x)
        for w, poly in closed:
            out -= sample(w, x) * poly.eval(x)
        for w, kern, qj in numeric:
            out -= sample(w, x) * _volterra_quadrature(kern, qj.eval, x, quad)
        return out

    return r_tilde


def _check_degree(p: IdeProblem, n: int) -> None:
    if n < p.order:
        raise ProblemError(f"basis degree n={n} must be at least the order k={p.order}")
    if n > MAX_DEGREE:
        raise ProblemError(f"basis degree n={n} exceeds the supported maximum {MAX_DEGREE}")


def assemble(
    p: IdeProblem,
    n: int,
    method: str = "auto",
    quad: QuadratureRule | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Build ``M`` and ``R`` with ``C^T M phi = R^T phi``.

    ``method="auto"`` uses powers of Theta for constant coefficients and
    constant-weight convolution kernels; ``method="general"`` routes every
    term through product and kernel matrices.
    """
    if method not in ("auto", "general"):
        raise ValueError(f"unknown assembly method {method!r}")
    _check_degree(p, n)
    k = p.order
    basis = orthonormal_basis(n)
    quad = quad or default_rule(n)
    op = theta(n)
    powers = [linalg.mat_pow(op.theta, e) for e in range(k + 1)]
    general = method == "general"

    m = np.zeros((n + 1, n + 1))
    for i, a in enumerate(p.coeffs):
        if isinstance(a, Function) or general:
            m += powers[k - i] @ product_matrix(_as_function(a), basis, quad)
        elif float(a) != 0.0:
            m += float(a) * powers[k - i]
    for term in p.integrals:
        lift = powers[k - term.deriv]
        if term.has_constant_weight and isinstance(term.kernel, Convolution) and not general:
            m += float(term.weight) * (lift @ convolution_matrix(term.kernel.m, op))
        else:
            m += lift @ kernel_matrix(term.weight_function(), term.kernel, basis, quad)
    r = project(effective_rhs(p, quad), basis, quad)
    return m, r


def residual(p: IdeProblem, y: Polynomial, x: np.ndarray, quad: QuadratureRule) -> np.ndarray:
    """Left side minus right side of the IDE for the polynomial ``y`` at ``x``.

    Derivatives are exact; integrals use ``quad`` mapped to [0, x].
    """
    x = np.asarray(x, dtype=float)
    out = -np.array(sample(p.rhs, x), dtype=float)
    for i, a in enumerate(p.coeffs):
        out += sample(_as_function(a), x) * y.differentiate(i).eval(x)
    for term in p.integrals:
        yj = y.differentiate(term.deriv)
        out += sample(term.weight_function(), x) * _volterra_quadrature(term.kernel, yj.eval, x, quad)
    return out


def lift_solution(p: IdeProblem, c: np.ndarray, reconstruction: str = "integrate") -> Polynomial:
    """Recover ``y`` from the coefficients ``c`` of ``y^(k)``.

    ``"integrate"`` integrates ``c^T phi`` exactly ``k`` times (degree
    ``n + k``, initial conditions hold exactly).  ``"theta"`` applies the
    truncated ``Theta**k`` instead and stays at degree ``n``.
    """
    n = len(c) - 1
    basis: BasisSet = orthonormal_basis(n)
    if reconstruction == "integrate":
        y = reconstruct(c, basis)
        for _ in range(p.order):
            y = y.integrate()
    elif reconstruction == "theta":
        lift = linalg.mat_pow(theta(n).theta, p.order)
        y = reconstruct(lift.T @ c, basis)
    else:
        raise ValueError(f"unknown reconstruction {reconstruction!r}")
    return ic_polynomial(p).add(y)


def solve(
    p: IdeProblem,
    n: int = 7,
    method: str = "auto",
    quad: QuadratureRule | None = None,
    reconstruction: str = "integrate",
) -> SpectralSolution:
    """Solve ``p`` with the degree-``n`` basis and fill in diagnostics."""
    start = time.perf_counter()
    quad = quad or default_rule(n)
    m, r = assemble(p, n, method, quad)
    c = linalg.solve_transposed(m, r)
    y = lift_solution(p, c, reconstruction)
    ic = ic_polynomial(p)

    max_res = float(np.max(np.abs(residual(p, y, quad.nodes, quad))))
    max_err = None
    if p.exact is not None:
        xs = sample_grid()
        max_err = float(np.max(np.abs(y.eval(xs) - sample(p.exact, xs))))
    diag = Diagnostics(max_res, max_err, linalg.condition_estimate(m))
    elapsed = (time.perf_counter() - start) * 1e3
    return SpectralSolution(n, c, y, ic, diag, elapsed)


@dataclass(frozen=True)
class SweepRow:
    n: int
    max_error: float | None
    max_residual: float | None
    failure: str | None = None


def convergence_sweep(p: IdeProblem, n_list: Iterable[int], method: str = "auto") -> list[SweepRow]:
    """Solve once per degree; failures are recorded and the sweep continues."""
    rows = []
    for n in n_list:
        try:
            sol = solve(p, n, method)
        except IdeError as exc:
            rows.append(SweepRow(n, None, None, f"{type(exc).__name__}: {exc}"))
            continue
        rows.append(SweepRow(n, sol.diagnostics.max_error, sol.diagnostics.max_residual))
    return rows
