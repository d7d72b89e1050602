"""Expressions for phases and amplitudes: parsing, printing, differentiation,
evaluation, and Taylor expansion into TruncatedSeries.

Grammar (EBNF; `-` may additionally open an expression):

    expr   := ['-'] term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' ['-'] integer)?
    base   := number | name | '(' expr ')' | func '(' expr ')'
    func   := 'exp' | 'log' | 'sqrt' | 'sin' | 'cos'

Numbers may carry an immediate `i` suffix (e.g. `2.5i`); bare `i` is the
imaginary unit. Juxtaposition is not multiplication; write `2*x`. Variables
range over real values on the chain of integration, but all arithmetic is
complex and log/sqrt take principal branches of the value at the expansion
point.
"""
from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass

import numpy as np

from . import multiseries as ms
from ._kernels import eval_program as _kernel_eval
from ._kernels.opcodes import (OP_ADD, OP_CONST, OP_COS, OP_DIV, OP_EXP,
                               OP_LOG, OP_MUL, OP_NEG, OP_POWI, OP_SIN,
                               OP_SQRT, OP_SUB, OP_VAR)
from .errors import ParseError, SingularPointError
from .multiseries import TruncatedSeries

FUNCTIONS = ("exp", "log", "sqrt", "sin", "cos")


# ---------------------------------------------------------------------------
# AST

@dataclass(frozen=True)
class Const:
    value: complex


@dataclass(frozen=True)
class Var:
    index: int


@dataclass(frozen=True)
class Add:
    a: object
    b: object


@dataclass(frozen=True)
class Sub:
    a: object
    b: object


@dataclass(frozen=True)
class Mul:
    a: object
    b: object


@dataclass(frozen=True)
class Div:
    a: object
    b: object


@dataclass(frozen=True)
class Pow:
    base: object
    exponent: int


@dataclass(frozen=True)
class Neg:
    a: object


@dataclass(frozen=True)
class Call:
    fn: str
    arg: object


@dataclass(frozen=True)
class ExpansionPoint:
    coordinates: tuple
    order: int

    def __post_init__(self):
        object.__setattr__(self, "coordinates",
                           tuple(complex(z) for z in self.coordinates))
        if self.order < 0:
            raise ValueError("order must be >= 0")


# ---------------------------------------------------------------------------
# Lexer / parser

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?i?)"
    r"|(?P<name>[A-Za-z_][A-Za-z_0-9]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.end() == pos:
            stripped = text[pos:].lstrip()
            at = len(text) - len(stripped)
            raise ParseError(f"unexpected character {stripped[0]!r}", at)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num")))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, tokens, var_index, bindings):
        self.toks = tokens
        self.k = 0
        self.vars = var_index
        self.bindings = bindings

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect_op(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.take()

    def parse_expr(self):
        negate = False
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.take()
            negate = True
        node = self.parse_term()
        if negate:
            node = Neg(node)
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.take()
                rhs = self.parse_term()
                node = Add(node, rhs) if val == "+" else Sub(node, rhs)
            else:
                return node

    def parse_term(self):
        node = self.parse_factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.take()
                rhs = self.parse_factor()
                node = Mul(node, rhs) if val == "*" else Div(node, rhs)
            else:
                return node

    def parse_factor(self):
        node = self.parse_base()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.take()
            sign = 1
            kind, val, pos = self.peek()
            if kind == "op" and val == "-":
                self.take()
                sign = -1
                kind, val, pos = self.peek()
            if kind != "num" or not re.fullmatch(r"\d+", val):
                raise ParseError("exponent must be an integer", pos)
            self.take()
            node = Pow(node, sign * int(val))
        return node

    def parse_base(self):
        kind, val, pos = self.take()
        if kind == "num":
            if val.endswith("i"):
                return Const(complex(0.0, float(val[:-1] or "1")))
            return Const(complex(float(val)))
        if kind == "name":
            if val == "i":
                return Const(1j)
            nk, nv, _ = self.peek()
            if nk == "op" and nv == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", pos)
                self.take()
                arg = self.parse_expr()
                self.expect_op(")")
                return Call(val, arg)
            if val in self.vars:
                return Var(self.vars[val])
            if val in self.bindings:
                return self.bindings[val]
            raise ParseError(f"unknown identifier {val!r}", pos)
        if kind == "op" and val == "(":
            node = self.parse_expr()
            self.expect_op(")")
            return node
        what = repr(val) if val else "end of input"
        raise ParseError(f"expected a value, found {what}", pos)


def parse(text: str, dim: int, variable_names, bindings=None):
    """Parse an infix expression over the declared variable names.

    bindings maps extra identifiers to already-built Expr subtrees (spliced in
    place); their variable indices must refer to the same dim-sized space.
    """
    variable_names = list(variable_names)
    if len(variable_names) != dim:
        raise ValueError(f"got {len(variable_names)} names for dim {dim}")
    for name in variable_names:
        if name in FUNCTIONS or name == "i":
            raise ValueError(f"variable name {name!r} is reserved")
    var_index = {name: j for j, name in enumerate(variable_names)}
    p = _Parser(_tokenize(text), var_index, dict(bindings or {}))
    node = p.parse_expr()
    kind, val, pos = p.peek()
    if kind != "end":
        raise ParseError(f"unexpected trailing input {val!r}", pos)
    _check_indices(node, dim)
    return node


def _check_indices(e, dim):
    for sub in walk(e):
        if isinstance(sub, Var) and not 0 <= sub.index < dim:
            raise ValueError(f"variable index {sub.index} out of range for dim {dim}")


def walk(e):
    yield e
    if isinstance(e, (Add, Sub, Mul, Div)):
        yield from walk(e.a)
        yield from walk(e.b)
    elif isinstance(e, Neg):
        yield from walk(e.a)
    elif isinstance(e, Pow):
        yield from walk(e.base)
    elif isinstance(e, Call):
        yield from walk(e.arg)


# ---------------------------------------------------------------------------
# Printer

def _fmt_real(x: float) -> str:
    if x == int(x) and abs(x) < 1e15:
        return repr(x)
    return repr(x)


def _fmt_const(z: complex) -> str:
    re_, im_ = z.real, z.imag
    if im_ == 0:
        return _fmt_real(re_) if re_ >= 0 else f"(0 - {_fmt_real(-re_)})"
    if re_ == 0:
        if im_ >= 0:
            return "i" if im_ == 1 else f"{_fmt_real(im_)}i"
        return f"(0 - {_fmt_real(-im_)}i)"
    sign = "+" if im_ > 0 else "-"
    head = _fmt_real(re_) if re_ >= 0 else f"0 - {_fmt_real(-re_)}"
    return f"({head} {sign} {_fmt_real(abs(im_))}i)"


def _prec(e) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, Neg):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Pow):
        return 3
    return 4


def to_text(e, variable_names) -> str:
    """Print an Expr so that parse(to_text(e)) rebuilds the same tree for any
    tree that itself came from parse."""
    names = list(variable_names)

    def wrap(sub, minimum):
        s = rec(sub)
        return f"({s})" if _prec(sub) < minimum else s

    def rec(n):
        if isinstance(n, Const):
            return _fmt_const(n.value)
        if isinstance(n, Var):
            return names[n.index]
        if isinstance(n, Add):
            return f"{wrap(n.a, 1)} + {wrap(n.b, 2)}"
        if isinstance(n, Sub):
            return f"{wrap(n.a, 1)} - {wrap(n.b, 2)}"
        if isinstance(n, Mul):
            return f"{wrap(n.a, 2)}*{wrap(n.b, 3)}"
        if isinstance(n, Div):
            return f"{wrap(n.a, 2)}/{wrap(n.b, 4)}"
        if isinstance(n, Neg):
            return f"-{wrap(n.a, 2)}"
        if isinstance(n, Pow):
            return f"{wrap(n.base, 4)}^{n.exponent}"
        if isinstance(n, Call):
            return f"{n.fn}({rec(n.arg)})"
        raise TypeError(f"not an Expr node: {n!r}")

    return rec(e)


# ---------------------------------------------------------------------------
# Structural helpers

def substitute(e, replacements: dict):
    """Replace Var(j) with replacements[j] where present."""
    if isinstance(e, Var):
        return replacements.get(e.index, e)
    if isinstance(e, (Add, Sub, Mul, Div)):
        return type(e)(substitute(e.a, replacements), substitute(e.b, replacements))
    if isinstance(e, Neg):
        return Neg(substitute(e.a, replacements))
    if isinstance(e, Pow):
        return Pow(substitute(e.base, replacements), e.exponent)
    if isinstance(e, Call):
        return Call(e.fn, substitute(e.arg, replacements))
    return e


def _is_zero(e):
    return isinstance(e, Const) and e.value == 0


def _is_one(e):
    return isinstance(e, Const) and e.value == 1


def _add(a, b):
    if _is_zero(a):
        return b
    if _is_zero(b):
        return a
    return Add(a, b)


def _mul(a, b):
    if _is_zero(a) or _is_zero(b):
        return Const(0j)
    if _is_one(a):
        return b
    if _is_one(b):
        return a
    return Mul(a, b)


def diff_expr(e, axis: int):
    """Expression-level partial derivative with respect to variable axis."""
    if isinstance(e, Const):
        return Const(0j)
    if isinstance(e, Var):
        return Const(1.0 + 0j) if e.index == axis else Const(0j)
    if isinstance(e, Add):
        return _add(diff_expr(e.a, axis), diff_expr(e.b, axis))
    if isinstance(e, Sub):
        da, db = diff_expr(e.a, axis), diff_expr(e.b, axis)
        if _is_zero(db):
            return da
        if _is_zero(da):
            return Neg(db)
        return Sub(da, db)
    if isinstance(e, Mul):
        return _add(_mul(diff_expr(e.a, axis), e.b), _mul(e.a, diff_expr(e.b, axis)))
    if isinstance(e, Div):
        num = Sub(_mul(diff_expr(e.a, axis), e.b), _mul(e.a, diff_expr(e.b, axis)))
        return Div(num, Pow(e.b, 2))
    if isinstance(e, Neg):
        da = diff_expr(e.a, axis)
        return da if _is_zero(da) else Neg(da)
    if isinstance(e, Pow):
        if e.exponent == 0:
            return Const(0j)
        db = diff_expr(e.base, axis)
        inner = Pow(e.base, e.exponent - 1) if e.exponent != 1 else Const(1.0 + 0j)
        return _mul(_mul(Const(complex(e.exponent)), inner), db)
    if isinstance(e, Call):
        da = diff_expr(e.arg, axis)
        if _is_zero(da):
            return Const(0j)
        if e.fn == "exp":
            return _mul(e, da)
        if e.fn == "log":
            return Div(da, e.arg)
        if e.fn == "sqrt":
            return Div(da, _mul(Const(2.0 + 0j), e))
        if e.fn == "sin":
            return _mul(Call("cos", e.arg), da)
        if e.fn == "cos":
            return Neg(_mul(Call("sin", e.arg), da))
    raise TypeError(f"not an Expr node: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation

def eval_expr(e, point) -> complex:
    """Tree-walk evaluation at one complex point, with singularity reporting."""
    point = [complex(z) for z in point]

    def rec(n):
        if isinstance(n, Const):
            return n.value
        if isinstance(n, Var):
            return point[n.index]
        if isinstance(n, Add):
            return rec(n.a) + rec(n.b)
        if isinstance(n, Sub):
            return rec(n.a) - rec(n.b)
        if isinstance(n, Mul):
            return rec(n.a) * rec(n.b)
        if isinstance(n, Div):
            den = rec(n.b)
            if den == 0:
                raise SingularPointError(
                    f"division by zero in subexpression '{to_text(n, _anon_names(n))}'")
            return rec(n.a) / den
        if isinstance(n, Neg):
            return -rec(n.a)
        if isinstance(n, Pow):
            base = rec(n.base)
            if n.exponent < 0 and base == 0:
                raise SingularPointError(
                    f"zero raised to negative power in '{to_text(n, _anon_names(n))}'")
            return _cpow_int(base, n.exponent)
        if isinstance(n, Call):
            v = rec(n.arg)
            if n.fn == "exp":
                return cmath.exp(v)
            if n.fn == "log":
                if v == 0:
                    raise SingularPointError(
                        f"log of zero in subexpression '{to_text(n, _anon_names(n))}'")
                return cmath.log(v)
            if n.fn == "sqrt":
                return cmath.sqrt(v)
            if n.fn == "sin":
                return cmath.sin(v)
            if n.fn == "cos":
                return cmath.cos(v)
        raise TypeError(f"not an Expr node: {n!r}")

    return rec(e)


def _anon_names(e):
    top = max((s.index for s in walk(e) if isinstance(s, Var)), default=-1)
    return [f"x{j}" for j in range(top + 1)]


def _cpow_int(z, n):
    if n == 0:
        return 1.0 + 0j
    m = abs(n)
    result = 1.0 + 0j
    b = z
    while m:
        if m & 1:
            result *= b
        m >>= 1
        if m:
            b *= b
    return result if n > 0 else 1.0 / result


def gradient_at(e, point):
    """Gradient via expression-level differentiation, evaluated at point."""
    d = len(list(point))
    return [eval_expr(diff_expr(e, j), point) for j in range(d)]


# ---------------------------------------------------------------------------
# Taylor expansion

def taylor(e, at: ExpansionPoint, dim=None) -> TruncatedSeries:
    """Series of e in re-centred coordinates u = x - at.coordinates.

    Built bottom-up by series composition at each node; log and sqrt use the
    principal branch of their value at the point.
    """
    coords = at.coordinates
    d = dim if dim is not None else len(coords)
    if len(coords) != d:
        raise ValueError("expansion point length mismatch")
    N = at.order

    def maclaurin(fn):
        if fn == "exp":
            return [1.0 / math.factorial(k) for k in range(N + 1)]
        if fn == "sin":
            return [0.0 if k % 2 == 0 else (-1.0) ** ((k - 1) // 2) / math.factorial(k)
                    for k in range(N + 1)]
        if fn == "cos":
            return [(-1.0) ** (k // 2) / math.factorial(k) if k % 2 == 0 else 0.0
                    for k in range(N + 1)]
        raise ValueError(fn)

    def rec(n) -> TruncatedSeries:
        if isinstance(n, Const):
            return TruncatedSeries.constant(d, N, n.value)
        if isinstance(n, Var):
            return TruncatedSeries.variable(d, N, n.index) + coords[n.index]
        if isinstance(n, Add):
            return rec(n.a) + rec(n.b)
        if isinstance(n, Sub):
            return rec(n.a) - rec(n.b)
        if isinstance(n, Mul):
            return rec(n.a) * rec(n.b)
        if isinstance(n, Div):
            den = rec(n.b)
            if den.constant_term == 0:
                raise SingularPointError(
                    f"division by zero at the expansion point in "
                    f"'{to_text(n, _anon_names(n))}'")
            return rec(n.a) * ms.reciprocal(den)
        if isinstance(n, Neg):
            return -rec(n.a)
        if isinstance(n, Pow):
            base = rec(n.base)
            if n.exponent >= 0:
                return base.power(n.exponent)
            if base.constant_term == 0:
                raise SingularPointError(
                    f"negative power of zero at the expansion point in "
                    f"'{to_text(n, _anon_names(n))}'")
            return ms.reciprocal(base).power(-n.exponent)
        if isinstance(n, Call):
            f = rec(n.arg)
            c = f.constant_term
            g = f - c
            if n.fn == "exp":
                return ms._unit_compose(maclaurin("exp"), g).scale(cmath.exp(c))
            if n.fn == "log":
                if c == 0:
                    raise SingularPointError(
                        f"log of zero at the expansion point in "
                        f"'{to_text(n, _anon_names(n))}'")
                u = g.scale(1.0 / c)
                coeffs = [0.0] + [(-1.0) ** (k + 1) / k for k in range(1, N + 1)]
                return ms._unit_compose(coeffs, u) + cmath.log(c)
            if n.fn == "sqrt":
                if c == 0:
                    raise SingularPointError(
                        f"sqrt branch point at the expansion point in "
                        f"'{to_text(n, _anon_names(n))}'")
                return ms.sqrt_series(f)
            if n.fn == "sin":
                return (ms._unit_compose(maclaurin("cos"), g).scale(cmath.sin(c))
                        + ms._unit_compose(maclaurin("sin"), g).scale(cmath.cos(c)))
            if n.fn == "cos":
                return (ms._unit_compose(maclaurin("cos"), g).scale(cmath.cos(c))
                        - ms._unit_compose(maclaurin("sin"), g).scale(cmath.sin(c)))
        raise TypeError(f"not an Expr node: {n!r}")

    return rec(e).clean()


# ---------------------------------------------------------------------------
# Compiled programs

@dataclass(frozen=True)
class Program:
    """Postfix form of an Expr for batch evaluation over point arrays."""
    ops: np.ndarray
    args: np.ndarray
    consts: np.ndarray
    dim: int

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.ascontiguousarray(points, dtype=np.complex128)
        if points.ndim != 2 or points.shape[1] != self.dim:
            raise ValueError(f"points must have shape (n, {self.dim})")
        return np.asarray(_kernel_eval(self.ops, self.args, self.consts, points))


def compile_program(e, dim: int) -> Program:
    ops, args, consts = [], [], []
    pool = {}

    def const_index(z):
        z = complex(z)
        if z not in pool:
            pool[z] = len(consts)
            consts.append(z)
        return pool[z]

    def emit(n):
        if isinstance(n, Const):
            ops.append(OP_CONST)
            args.append(const_index(n.value))
        elif isinstance(n, Var):
            ops.append(OP_VAR)
            args.append(n.index)
        elif isinstance(n, (Add, Sub, Mul, Div)):
            emit(n.a)
            emit(n.b)
            ops.append({Add: OP_ADD, Sub: OP_SUB, Mul: OP_MUL, Div: OP_DIV}[type(n)])
            args.append(0)
        elif isinstance(n, Neg):
            emit(n.a)
            ops.append(OP_NEG)
            args.append(0)
        elif isinstance(n, Pow):
            emit(n.base)
            ops.append(OP_POWI)
            args.append(n.exponent)
        elif isinstance(n, Call):
            emit(n.arg)
            ops.append({"exp": OP_EXP, "log": OP_LOG, "sqrt": OP_SQRT,
                        "sin": OP_SIN, "cos": OP_COS}[n.fn])
            args.append(0)
        else:
            raise TypeError(f"not an Expr node: {n!r}")

    emit(e)
    return Program(
        ops=np.asarray(ops, dtype=np.int64),
        args=np.asarray(args, dtype=np.int64),
        consts=np.asarray(consts if consts else [0j], dtype=np.complex128),
        dim=dim,
    )
