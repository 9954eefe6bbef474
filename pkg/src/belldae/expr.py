"""Expression trees for right-hand sides, constraints and forcing functions.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``*`` and ``/``)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | factor
    factor := base ('^' INT)?
    base   := NUMBER | IDENT | IDENT '(' args ')' | '(' expr ')'

Function names are ``exp ln sin cos sqrt powr``; ``powr`` takes a second
rational argument, e.g. ``powr(w1, 3/2)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import ParseError

FUNCTIONS = ("exp", "ln", "sin", "cos", "sqrt", "powr")


class Expr:
    """Base class of all expression nodes."""

    def __str__(self):
        return pretty_print(self)


@dataclass(frozen=True)
class Const(Expr):
    value: float


@dataclass(frozen=True)
class IndepVar(Expr):
    name: str = "v"


@dataclass(frozen=True)
class StateRef(Expr):
    name: str


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class IntPow(Expr):
    base: Expr
    n: int


@dataclass(frozen=True)
class Func(Expr):
    kind: str
    arg: Expr
    exponent: Fraction | None = None

    def __post_init__(self):
        if self.kind not in FUNCTIONS:
            raise ValueError(f"unknown function {self.kind!r}")
        if (self.kind == "powr") != (self.exponent is not None):
            raise ValueError("powr needs an exponent; other functions take none")


def children(e: Expr):
    if isinstance(e, (Add, Sub, Mul, Div)):
        return (e.left, e.right)
    if isinstance(e, IntPow):
        return (e.base,)
    if isinstance(e, Func):
        return (e.arg,)
    return ()


def state_names(e: Expr) -> set[str]:
    """Names of all state variables referenced by ``e``."""
    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, StateRef):
            out.add(node.name)
        stack.extend(children(node))
    return out


# ---------------------------------------------------------------------------
# Lexer / parser

_TOKEN = re.compile(
    r"(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<id>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^(),])"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    n = len(text)
    while True:
        while pos < n and text[pos].isspace():
            pos += 1
        if pos == n:
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", _byte_offset(text, pos))
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    tokens.append(("end", "", n))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, text, variables, indep_var, definitions):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.variables = None if variables is None else set(variables)
        self.indep_var = indep_var
        self.definitions = definitions or {}

    def error(self, msg, tok=None):
        tok = tok or self.tokens[self.i]
        return ParseError(msg, _byte_offset(self.text, tok[2]))

    def peek(self):
        return self.tokens[self.i]

    def take(self, value=None):
        tok = self.tokens[self.i]
        if value is not None and tok[1] != value:
            want = "end of input" if value == "" else repr(value)
            got = "end of input" if tok[0] == "end" else repr(tok[1])
            raise self.error(f"expected {want}, found {got}", tok)
        self.i += 1
        return tok

    def parse(self):
        e = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return e

    def expr(self):
        e = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.term()
            e = Add(e, rhs) if op == "+" else Sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            rhs = self.unary()
            e = Mul(e, rhs) if op == "*" else Div(e, rhs)
        return e

    def unary(self):
        if self.peek()[1] == "-" and self.peek()[0] == "op":
            self.take()
            operand = self.unary()
            if isinstance(operand, Const):
                return Const(-operand.value)
            return Mul(Const(-1.0), operand)
        return self.factor()

    def factor(self):
        base = self.base()
        if self.peek()[1] == "^":
            self.take()
            tok = self.peek()
            if tok[0] != "num" or not tok[1].isdigit():
                raise self.error("exponent after '^' must be a non-negative integer")
            self.take()
            return IntPow(base, int(tok[1]))
        return base

    def base(self):
        tok = self.peek()
        kind, value, _ = tok
        if kind == "num":
            self.take()
            return Const(float(value))
        if value == "(":
            self.take()
            e = self.expr()
            self.take(")")
            return e
        if kind == "id":
            self.take()
            if value in FUNCTIONS:
                return self.call(value, tok)
            if self.peek()[1] == "(":
                raise self.error(f"unknown function {value!r}", tok)
            return self.identifier(value, tok)
        if kind == "end":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected token {value!r}")

    def call(self, name, tok):
        if self.peek()[1] != "(":
            raise self.error(f"function {name!r} must be called", tok)
        self.take("(")
        arg = self.expr()
        exponent = None
        if name == "powr":
            if self.peek()[1] != ",":
                raise self.error("powr takes two arguments: powr(expr, p/q)")
            self.take(",")
            exponent = self.rational()
        elif self.peek()[1] == ",":
            raise self.error(f"{name} takes exactly one argument")
        self.take(")")
        return Func(name, arg, exponent)

    def rational(self):
        sign = 1
        if self.peek()[1] == "-":
            self.take()
            sign = -1
        tok = self.peek()
        if tok[0] != "num":
            raise self.error("powr exponent must be a rational literal")
        self.take()
        r = Fraction(tok[1])
        if self.peek()[1] == "/":
            self.take()
            den = self.peek()
            if den[0] != "num":
                raise self.error("expected denominator")
            self.take()
            r /= Fraction(den[1])
        return sign * r

    def identifier(self, name, tok):
        if name == self.indep_var:
            return IndepVar(name)
        if name in self.definitions:
            return self.definitions[name]
        if self.variables is None or name in self.variables:
            return StateRef(name)
        raise self.error(f"unknown identifier {name!r}", tok)


def parse(text: str, variables=None, indep_var: str = "v", definitions=None) -> Expr:
    """Parse expression text into a tree.

    ``variables`` restricts which identifiers are state references; when it is
    ``None`` every unknown identifier is accepted as one.  ``definitions``
    maps names of forcing functions to already-parsed trees, which are
    substituted in place (the same object at every use).
    """
    return _Parser(text, variables, indep_var, definitions).parse()


# ---------------------------------------------------------------------------
# Printer

def _prec(e: Expr) -> int:
    if isinstance(e, (Add, Sub)):
        return 1
    if isinstance(e, (Mul, Div)):
        return 2
    if isinstance(e, Const) and (e.value < 0 or str(e.value).startswith("-")):
        return 3
    if isinstance(e, IntPow):
        return 4
    return 5


def _wrap(e: Expr, min_prec: int) -> str:
    s = pretty_print(e)
    return f"({s})" if _prec(e) < min_prec else s


def _format_rational(r: Fraction) -> str:
    return str(r.numerator) if r.denominator == 1 else f"{r.numerator}/{r.denominator}"


def pretty_print(e: Expr) -> str:
    """Text that :func:`parse` maps back to a structurally equal tree."""
    if isinstance(e, Const):
        return repr(float(e.value))
    if isinstance(e, (IndepVar, StateRef)):
        return e.name
    if isinstance(e, (Add, Sub)):
        op = "+" if isinstance(e, Add) else "-"
        return f"{_wrap(e.left, 1)} {op} {_wrap(e.right, 2)}"
    if isinstance(e, (Mul, Div)):
        op = "*" if isinstance(e, Mul) else "/"
        return f"{_wrap(e.left, 2)}{op}{_wrap(e.right, 3)}"
    if isinstance(e, IntPow):
        return f"{_wrap(e.base, 5)}^{e.n}"
    if isinstance(e, Func):
        if e.kind == "powr":
            return f"powr({pretty_print(e.arg)}, {_format_rational(e.exponent)})"
        return f"{e.kind}({pretty_print(e.arg)})"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Pointwise evaluation

_NUMPY_FUNCS = {"exp": np.exp, "ln": np.log, "sin": np.sin, "cos": np.cos, "sqrt": np.sqrt}


def evaluate_expr(e: Expr, v, values=None):
    """Evaluate ``e`` pointwise at ``v`` (scalar, array, real or complex).

    ``values`` maps state names to values broadcastable against ``v``.
    """
    values = values or {}
    cache = {}

    def ev(node):
        key = id(node)
        if key in cache:
            return cache[key]
        if isinstance(node, Const):
            out = node.value
        elif isinstance(node, IndepVar):
            out = v
        elif isinstance(node, StateRef):
            try:
                out = values[node.name]
            except KeyError:
                raise KeyError(f"no value supplied for {node.name!r}") from None
        elif isinstance(node, Add):
            out = ev(node.left) + ev(node.right)
        elif isinstance(node, Sub):
            out = ev(node.left) - ev(node.right)
        elif isinstance(node, Mul):
            out = ev(node.left) * ev(node.right)
        elif isinstance(node, Div):
            out = ev(node.left) / ev(node.right)
        elif isinstance(node, IntPow):
            out = ev(node.base) ** node.n
        elif isinstance(node, Func):
            x = ev(node.arg)
            if node.kind == "powr":
                out = np.power(x, float(node.exponent))
            else:
                out = _NUMPY_FUNCS[node.kind](x)
        else:
            raise TypeError(f"not an expression node: {node!r}")
        cache[key] = out
        return out

    return ev(e)
