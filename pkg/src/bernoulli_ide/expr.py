"""Expression dialect for coefficients, kernels and right-hand sides.

Grammar (whitespace insensitive, implicit multiplication rejected)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?          # right associative, exponent constant
    atom    := number | 'x' | 't' | 'pi' | 'e'
             | func '(' expr ')' | '(' expr ')'
    func    := sin | cos | tan | exp | log | sqrt

Evaluation is vectorised over numpy arrays.  Leaving the real domain raises
:class:`~bernoulli_ide.errors.DomainError` rather than producing ``nan``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import BindingError, DomainError, ParseError

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt")
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("x", "t")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class BinOp:
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call:
    func: str
    arg: Expr


Expr = Union[Num, Const, Var, Neg, BinOp, Call]


# -- tokenizer ---------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:"
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^(),])"
    r")"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # 'num', 'name', 'op', 'end'
    text: str
    offset: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    stripped = len(text.rstrip())
    while pos < stripped:
        m = _TOKEN.match(text, pos)
        if m is None or m.lastgroup is None:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise ParseError(f"unexpected character {text[bad]!r}", bad, text)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    # end-of-input errors point at the last character of the input
    toks.append(_Tok("end", "", max(stripped - 1, 0)))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, message: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        if tok.kind == "end":
            message = f"{message}, found end of input"
        else:
            message = f"{message}, found {tok.text!r}"
        return ParseError(message, tok.offset, self.text)

    def accept(self, op: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == op:
            self.i += 1
            return True
        return False

    def expect(self, op: str) -> None:
        if not self.accept(op):
            raise self.error(f"expected {op!r}")

    def parse(self) -> Expr:
        node = self.expr()
        if self.tok.kind != "end":
            raise self.error("expected operator or end of input")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "op" and self.tok.text in "+-":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Expr:
        node = self.unary()
        while self.tok.kind == "op" and self.tok.text in "*/":
            op = self.tok.text
            self.i += 1
            node = BinOp(op, node, self.unary())
        return node

    def unary(self) -> Expr:
        if self.accept("-"):
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.accept("^"):
            start = self.tok
            exponent = self.unary()
            if variables(exponent):
                raise ParseError("exponent must be constant", start.offset, self.text)
            return BinOp("^", base, exponent)
        return base

    def atom(self) -> Expr:
        tok = self.tok
        if tok.kind == "num":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "name":
            self.i += 1
            name = tok.text
            is_call = self.tok.kind == "op" and self.tok.text == "("
            if name in FUNCTIONS:
                if not is_call:
                    raise self.error(f"expected '(' after function {name!r}")
                self.i += 1
                arg = self.expr()
                if self.tok.kind == "op" and self.tok.text == ",":
                    raise ParseError(f"function {name!r} takes exactly one argument", self.tok.offset, self.text)
                self.expect(")")
                return Call(name, arg)
            if is_call:
                raise ParseError(f"unknown function {name!r}", tok.offset, self.text)
            if name in VARIABLES:
                return Var(name)
            if name in CONSTANTS:
                return Const(name)
            raise ParseError(f"unknown identifier {name!r}", tok.offset, self.text)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        raise self.error("expected a number, variable, function or '('")


def parse(text: str) -> Expr:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


# -- inspection and printing ---------------------------------------------------

def variables(e: Expr) -> frozenset[str]:
    if isinstance(e, Var):
        return frozenset({e.name})
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    if isinstance(e, Call):
        return variables(e.arg)
    return frozenset()


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _PREC["neg"]
    return 5


def _fmt_num(v: float) -> str:
    if v.is_integer() and abs(v) < 1e15:
        return str(int(v))
    return repr(v)


def to_string(e: Expr) -> str:
    """Canonical text; ``parse(to_string(e)) == e``."""
    if isinstance(e, Num):
        return _fmt_num(e.value)
    if isinstance(e, (Const, Var)):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_string(e.arg)})"
    if isinstance(e, Neg):
        inner = to_string(e.operand)
        return f"-({inner})" if _prec(e.operand) < _PREC["neg"] else f"-{inner}"
    p = _PREC[e.op]
    left, right = to_string(e.left), to_string(e.right)
    if e.op == "^":
        if _prec(e.left) <= p:
            left = f"({left})"
        if _prec(e.right) < p:
            right = f"({right})"
        return f"{left}^{right}"
    if _prec(e.left) < p:
        left = f"({left})"
    if _prec(e.right) <= p:
        right = f"({right})"
    return f"{left} {e.op} {right}"


# -- evaluation ----------------------------------------------------------------

def _finite(v, what: str):
    if not np.all(np.isfinite(v)):
        raise DomainError(f"{what} produced a non-finite value")
    return v


def _eval(e: Expr, env: dict):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Var):
        try:
            return env[e.name]
        except KeyError:
            raise BindingError(f"variable {e.name!r} is not bound") from None
    if isinstance(e, Neg):
        return -_eval(e.operand, env)
    if isinstance(e, Call):
        a = _eval(e.arg, env)
        if e.func == "log" and np.any(np.asarray(a) <= 0):
            raise DomainError("log of a non-positive number")
        if e.func == "sqrt" and np.any(np.asarray(a) < 0):
            raise DomainError("sqrt of a negative number")
        with np.errstate(all="ignore"):
            return _finite(getattr(np, e.func)(a), e.func)
    a, b = _eval(e.left, env), _eval(e.right, env)
    if e.op == "+":
        return _finite(a + b, "addition")
    if e.op == "-":
        return _finite(a - b, "subtraction")
    if e.op == "*":
        return _finite(a * b, "multiplication")
    if e.op == "/":
        if np.any(np.asarray(b) == 0):
            raise DomainError("division by zero")
        return _finite(a / b, "division")
    # '^': exponent is constant by construction
    b = float(b)
    if not b.is_integer() and np.any(np.asarray(a) < 0):
        raise DomainError("negative base raised to a non-integer power")
    if b < 0 and np.any(np.asarray(a) == 0):
        raise DomainError("zero raised to a negative power")
    with np.errstate(all="ignore"):
        return _finite(np.power(np.asarray(a, dtype=float), b), "power")


def eval_expr(e: Expr, x=None, t=None):
    """Evaluate ``e`` at scalar or array arguments.

    Raises :class:`BindingError` if ``e`` uses a variable that is not given.
    """
    env = {}
    if x is not None:
        env["x"] = np.asarray(x, dtype=float) if not np.isscalar(x) else float(x)
    if t is not None:
        env["t"] = np.asarray(t, dtype=float) if not np.isscalar(t) else float(t)
    out = _eval(e, env)
    if isinstance(out, np.ndarray) and out.ndim == 0:
        return float(out)
    return out


class Function:
    """Callable wrapper used wherever a real function of ``x`` is expected."""

    def __init__(self, e: Expr | str, name: str = "x"):
        self.expr = parse(e) if isinstance(e, str) else e
        self.name = name
        extra = variables(self.expr) - {name}
        if extra:
            raise BindingError(f"expression may only use {name!r}, also uses {sorted(extra)}")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = eval_expr(self.expr, **{self.name: x})
        return np.broadcast_to(np.asarray(v, dtype=float), x.shape)

    def is_constant(self) -> bool:
        return not variables(self.expr)

    def __eq__(self, other):
        if isinstance(other, Function):
            return (self.expr, self.name) == (other.expr, other.name)
        return NotImplemented

    def __hash__(self):
        return hash((self.expr, self.name))

    def __repr__(self) -> str:
        return f"Function({to_string(self.expr)!r})"


class Kernel:
    """Callable wrapper for a kernel ``K(x, t)``."""

    def __init__(self, e: Expr | str):
        self.expr = parse(e) if isinstance(e, str) else e

    def __call__(self, x, t):
        x = np.asarray(x, dtype=float)
        t = np.asarray(t, dtype=float)
        v = eval_expr(self.expr, x, t)
        return np.broadcast_to(np.asarray(v, dtype=float), np.broadcast_shapes(x.shape, t.shape))

    def __eq__(self, other):
        if isinstance(other, Kernel):
            return self.expr == other.expr
        return NotImplemented

    def __hash__(self):
        return hash(self.expr)

    def __repr__(self) -> str:
        return f"Kernel({to_string(self.expr)!r})"
