"""Line-oriented ``key = value`` problem files.

Recognised keys::

    name                      free text
    order                     highest derivative k (integer >= 1)
    coeff.<i>                 a_i, number or expression in x (i = 0..k; missing -> 0)
    integral.<idx>.weight     multiplier b or weight f(x)
    integral.<idx>.kernel     conv:<m>  or an expression in x and t
    integral.<idx>.deriv      j with 0 <= j < k (default 0)
    ic.<i>                    y^(i)(0) for i = 0..k-1
    rhs                       r(x)
    exact                     optional exact solution y(x)
    n                         default basis degree
    sweep                     comma-separated degrees for ``sweep``

``#`` starts a comment.  Unknown or repeated keys are errors.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

from .errors import ExprError, ProblemError
from .expr import Function, Kernel, eval_expr, parse, to_string, variables
from .solver import Convolution, IdeProblem, IntegralTerm

DEFAULT_N = 7

BUILTIN = ("example1", "example2", "population")

_KEY = re.compile(
    r"^(?:name|order|rhs|exact|n|sweep"
    r"|coeff\.(?P<coeff>\d+)"
    r"|ic\.(?P<ic>\d+)"
    r"|integral\.(?P<idx>\d+)\.(?P<field>weight|kernel|deriv))$"
)


class ProblemFileError(ProblemError):
    """A problem file is malformed; ``line`` is 1-based (0 if not line-specific)."""

    def __init__(self, message: str, line: int = 0, source: str = "<problem>"):
        where = f"{source}:{line}: " if line else f"{source}: "
        super().__init__(where + message)
        self.line = line
        self.source = source


@dataclass(frozen=True)
class ProblemFile:
    problem: IdeProblem
    n: int = DEFAULT_N
    sweep: tuple[int, ...] = ()


def _number_or_function(text: str, allowed: str) -> float | Function:
    e = parse(text)
    extra = variables(e) - {allowed}
    if extra:
        raise ProblemError(f"expression may only use {allowed!r}, found {sorted(extra)}")
    if not variables(e):
        return float(eval_expr(e))
    return Function(e, allowed)


def _constant(text: str) -> float:
    e = parse(text)
    if variables(e):
        raise ProblemError("a constant is required here")
    return float(eval_expr(e))


def _integer(text: str, what: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ProblemError(f"{what} must be an integer, got {text!r}") from None


def _int_list(text: str) -> tuple[int, ...]:
    items = [s.strip() for s in text.split(",") if s.strip()]
    if not items:
        raise ProblemError("expected a comma-separated list of integers")
    return tuple(_integer(s, "degree") for s in items)


def parse_problem(text: str, source: str = "<problem>") -> ProblemFile:
    """Parse problem-file text; errors carry the source name and line number."""
    entries: dict[str, tuple[str, int]] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ProblemFileError("expected 'key = value'", lineno, source)
        key, value = (s.strip() for s in line.split("=", 1))
        if not _KEY.match(key):
            raise ProblemFileError(f"unknown key {key!r}", lineno, source)
        if key in entries:
            raise ProblemFileError(f"duplicate key {key!r}", lineno, source)
        if not value:
            raise ProblemFileError(f"empty value for {key!r}", lineno, source)
        entries[key] = (value, lineno)

    def field(key: str, convert, *args):
        value, lineno = entries[key]
        try:
            return convert(value, *args)
        except ExprError as exc:
            raise ProblemFileError(f"{key}: {exc}", lineno, source) from exc
        except ProblemError as exc:
            raise ProblemFileError(f"{key}: {exc}", lineno, source) from exc

    for required in ("order", "rhs"):
        if required not in entries:
            raise ProblemFileError(f"missing required key {required!r}", 0, source)
    order = field("order", _integer, "order")

    coeffs: list = [0.0] * (max(order, 0) + 1)
    initial: list = [None] * max(order, 0)
    integrals: dict[int, dict[str, str]] = {}
    for key, (value, lineno) in entries.items():
        m = _KEY.match(key)
        if m["coeff"] is not None:
            i = int(m["coeff"])
            if i > order:
                raise ProblemFileError(f"coefficient index {i} exceeds order {order}", lineno, source)
            coeffs[i] = field(key, _number_or_function, "x")
        elif m["ic"] is not None:
            i = int(m["ic"])
            if i >= max(order, 0):
                raise ProblemFileError(f"initial condition ic.{i} needs i < order {order}", lineno, source)
            initial[i] = field(key, _constant)
        elif m["idx"] is not None:
            integrals.setdefault(int(m["idx"]), {})[m["field"]] = key

    terms = []
    for idx in sorted(integrals):
        keys = integrals[idx]
        if "kernel" not in keys:
            raise ProblemFileError(f"integral.{idx} has no kernel", 0, source)
        kernel_text, kernel_line = entries[keys["kernel"]]
        if kernel_text.startswith("conv:"):
            m = field(keys["kernel"], lambda s: _integer(s[5:].strip(), "convolution order"))
            try:
                kernel = Convolution(m)
            except ProblemError as exc:
                raise ProblemFileError(f"{keys['kernel']}: {exc}", kernel_line, source) from exc
        else:
            kernel = field(keys["kernel"], Kernel)
        weight = field(keys["weight"], _number_or_function, "x") if "weight" in keys else 1.0
        deriv = field(keys["deriv"], _integer, "derivative order") if "deriv" in keys else 0
        terms.append(IntegralTerm(weight, kernel, deriv))

    if order >= 1:
        missing = [i for i, v in enumerate(initial) if v is None]
        if missing:
            raise ProblemFileError(f"missing initial condition ic.{missing[0]}", 0, source)

    rhs = field("rhs", Function, "x")
    exact = field("exact", Function, "x") if "exact" in entries else None
    name = entries["name"][0] if "name" in entries else Path(source).stem
    try:
        problem = IdeProblem(order, tuple(coeffs), tuple(terms), tuple(initial), rhs, exact, name)
    except ProblemError as exc:
        line = entries["order"][1] if order < 1 else 0
        raise ProblemFileError(str(exc), line, source) from exc

    n = field("n", _integer, "n") if "n" in entries else DEFAULT_N
    sweep = field("sweep", _int_list) if "sweep" in entries else ()
    return ProblemFile(problem, n, sweep)


def load_problem(path: str | Path) -> ProblemFile:
    path = Path(path)
    return parse_problem(path.read_text(encoding="utf-8"), str(path))


def _value(a) -> str:
    if isinstance(a, (Function, Kernel)):
        return to_string(a.expr)
    return repr(float(a))


def dump_problem(pf: ProblemFile) -> str:
    """Serialise back to problem-file text (``parse_problem`` inverts it)."""
    p = pf.problem
    lines = [f"name = {p.name}", f"order = {p.order}"]
    for i, a in enumerate(p.coeffs):
        if isinstance(a, Function) or float(a) != 0.0:
            lines.append(f"coeff.{i} = {_value(a)}")
    for idx, term in enumerate(p.integrals):
        lines.append(f"integral.{idx}.weight = {_value(term.weight)}")
        if isinstance(term.kernel, Convolution):
            lines.append(f"integral.{idx}.kernel = conv:{term.kernel.m}")
        else:
            lines.append(f"integral.{idx}.kernel = {_value(term.kernel)}")
        lines.append(f"integral.{idx}.deriv = {term.deriv}")
    for i, y in enumerate(p.initial):
        lines.append(f"ic.{i} = {float(y)!r}")
    lines.append(f"rhs = {_value(p.rhs)}")
    if p.exact is not None:
        lines.append(f"exact = {_value(p.exact)}")
    lines.append(f"n = {pf.n}")
    if pf.sweep:
        lines.append("sweep = " + ",".join(str(v) for v in pf.sweep))
    return "\n".join(lines) + "\n"


def builtin_text(name: str) -> str:
    if name not in BUILTIN:
        raise ProblemFileError(f"unknown built-in example {name!r}; choose from {', '.join(BUILTIN)}")
    return resources.files(__package__).joinpath("problems", f"{name}.ide").read_text(encoding="utf-8")


def load_builtin(name: str) -> ProblemFile:
    return parse_problem(builtin_text(name), f"{name}.ide")
