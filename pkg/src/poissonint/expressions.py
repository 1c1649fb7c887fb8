"""Small symbolic expressions over the scalar rings.

The grammar (in order of loosening precedence):

    power  := atom ['^' factor]          right-associative exponent
    factor := '-' factor | power
    term   := factor (('*' | '/') factor)*
    expr   := term (('+' | '-') term)*
    atom   := NUMBER | NAME | NAME '(' expr ')' | '(' expr ')'

Known function names: exp, log, sin, cos, sqrt.  Identifiers are
``[A-Za-z][A-Za-z0-9_]*`` and must appear in the variable list passed to
``parse``.  Evaluation is generic over the coefficient ring (floats,
``Dual``, ``TJet`` and their nestings), ``diff`` produces a new
expression with only constant folding applied, and ``to_text`` prints a
form that re-parses to a structurally equal tree.
"""

import re

from .errors import ParseError, UsageError
from .rings import rcos, rexp, rlog, rpow, rrecip, rsin, rsqrt

__all__ = [
    "Expr",
    "Const",
    "Var",
    "Neg",
    "Bin",
    "Call",
    "parse",
    "evaluate",
    "diff",
    "to_text",
    "free_variables",
    "FUNCTIONS",
]

FUNCTIONS = ("exp", "log", "sin", "cos", "sqrt")

_ATOM = 9
_POW = 4
_NEG = 3
_MUL = 2
_ADD = 1


class Expr:
    """Base node; concrete kinds are Const, Var, Neg, Bin, Call."""

    __slots__ = ()

    def __repr__(self):
        return f"<expr {to_text(self)}>"

    def __eq__(self, other):
        if type(self) is not type(other):
            return NotImplemented
        return all(getattr(self, s) == getattr(other, s) for s in self.__slots__)

    def __hash__(self):
        return hash((type(self),) + tuple(getattr(self, s) for s in self.__slots__))


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = float(value)


class Var(Expr):
    __slots__ = ("index", "name")

    def __init__(self, index, name):
        self.index = index
        self.name = name


class Neg(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg):
        self.arg = arg


class Bin(Expr):
    __slots__ = ("op", "lhs", "rhs")

    def __init__(self, op, lhs, rhs):
        self.op = op
        self.lhs = lhs
        self.rhs = rhs


class Call(Expr):
    __slots__ = ("fn", "arg")

    def __init__(self, fn, arg):
        self.fn = fn
        self.arg = arg


# Folding constructors.  Only constants fold; no other rewriting happens,
# so diff output stays within predictable shapes.

def _is_const(e, value=None):
    return isinstance(e, Const) and (value is None or e.value == value)


def mk_neg(a):
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def mk_add(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value + b.value)
    if _is_const(a, 0.0):
        return b
    if _is_const(b, 0.0):
        return a
    return Bin("+", a, b)


def mk_sub(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value - b.value)
    if _is_const(b, 0.0):
        return a
    if _is_const(a, 0.0):
        return mk_neg(b)
    return Bin("-", a, b)


def mk_mul(a, b):
    if _is_const(a) and _is_const(b):
        return Const(a.value * b.value)
    if _is_const(a, 0.0) or _is_const(b, 0.0):
        return Const(0.0)
    if _is_const(a, 1.0):
        return b
    if _is_const(b, 1.0):
        return a
    return Bin("*", a, b)


def mk_div(a, b):
    if _is_const(a) and _is_const(b) and b.value != 0.0:
        return Const(a.value / b.value)
    if _is_const(a, 0.0):
        return Const(0.0)
    if _is_const(b, 1.0):
        return a
    return Bin("/", a, b)


def mk_pow(a, b):
    if _is_const(a) and _is_const(b):
        try:
            return Const(rpow(a.value, b.value))
        except Exception:
            pass
    if _is_const(b, 1.0):
        return a
    if _is_const(b, 0.0):
        return Const(1.0)
    return Bin("^", a, b)


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>[A-Za-z][A-Za-z0-9_]*)"
    r"|(?P<op>[-+*/^()]))"
)


def _tokenize(text):
    tokens = []
    pos = 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            stripped = text[pos:].lstrip()
            bad_at = n - len(stripped)
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", bad_at + 1)
        if m.lastgroup == "num":
            tokens.append(("num", m.group("num"), m.start("num") + 1))
        elif m.lastgroup == "name":
            tokens.append(("name", m.group("name"), m.start("name") + 1))
        else:
            tokens.append(("op", m.group("op"), m.start("op") + 1))
        pos = m.end()
    tokens.append(("end", "", n + 1))
    return tokens


class _Parser:
    def __init__(self, text, variables):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0
        self.varmap = {name: idx for idx, name in enumerate(variables)}
        if len(self.varmap) != len(tuple(variables)):
            raise UsageError("duplicate variable names")

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise ParseError(f"expected {op!r}", pos)
        return self.advance()

    def parse(self):
        e = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise ParseError(f"unexpected trailing input {val!r}", pos)
        return e

    def expr(self):
        e = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                rhs = self.term()
                e = mk_add(e, rhs) if val == "+" else mk_sub(e, rhs)
            else:
                return e

    def term(self):
        e = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "*/":
                self.advance()
                rhs = self.factor()
                e = mk_mul(e, rhs) if val == "*" else mk_div(e, rhs)
            else:
                return e

    def factor(self):
        kind, val, _ = self.peek()
        if kind == "op" and val == "-":
            self.advance()
            return mk_neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        kind, val, _ = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            return mk_pow(base, self.factor())
        return base

    def atom(self):
        kind, val, pos = self.advance()
        if kind == "num":
            return Const(float(val))
        if kind == "name":
            nkind, nval, _ = self.peek()
            if nkind == "op" and nval == "(":
                if val not in FUNCTIONS:
                    raise ParseError(f"unknown function {val!r}", pos)
                self.advance()
                arg = self.expr()
                self.expect_op(")")
                return Call(val, arg)
            if val not in self.varmap:
                raise ParseError(f"unknown variable {val!r}", pos)
            return Var(self.varmap[val], val)
        if kind == "op" and val == "(":
            e = self.expr()
            self.expect_op(")")
            return e
        if kind == "end":
            raise ParseError("unexpected end of input", pos)
        raise ParseError(f"unexpected token {val!r}", pos)


def parse(text, variables):
    """Parse expression text against an ordered variable name list.

    Raises
    ------
    ParseError
        With a 1-based character offset on malformed input.
    """
    return _Parser(text, variables).parse()


def evaluate(expr, point):
    """Evaluate over any coefficient ring; point entries may be floats,
    Dual or TJet values (nested freely)."""
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Var):
        return point[expr.index]
    if isinstance(expr, Neg):
        return -evaluate(expr.arg, point)
    if isinstance(expr, Bin):
        a = evaluate(expr.lhs, point)
        b = evaluate(expr.rhs, point)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if expr.op == "/":
            return a * rrecip(b)
        return rpow(a, b)
    fn = {"exp": rexp, "log": rlog, "sin": rsin, "cos": rcos, "sqrt": rsqrt}[expr.fn]
    return fn(evaluate(expr.arg, point))


def diff(expr, var):
    """Partial derivative with respect to variable index ``var``."""
    if isinstance(expr, Const):
        return Const(0.0)
    if isinstance(expr, Var):
        return Const(1.0 if expr.index == var else 0.0)
    if isinstance(expr, Neg):
        return mk_neg(diff(expr.arg, var))
    if isinstance(expr, Bin):
        a, b = expr.lhs, expr.rhs
        da, db = diff(a, var), diff(b, var)
        if expr.op == "+":
            return mk_add(da, db)
        if expr.op == "-":
            return mk_sub(da, db)
        if expr.op == "*":
            return mk_add(mk_mul(da, b), mk_mul(a, db))
        if expr.op == "/":
            return mk_div(mk_sub(mk_mul(da, b), mk_mul(a, db)), mk_mul(b, b))
        # power: constant exponents keep the polynomial form
        if isinstance(b, Const):
            return mk_mul(mk_mul(b, mk_pow(a, Const(b.value - 1.0))), da)
        logterm = mk_mul(db, Call("log", a))
        ratio = mk_div(mk_mul(b, da), a)
        return mk_mul(expr, mk_add(logterm, ratio))
    a = expr.arg
    da = diff(a, var)
    if expr.fn == "exp":
        return mk_mul(expr, da)
    if expr.fn == "log":
        return mk_div(da, a)
    if expr.fn == "sin":
        return mk_mul(Call("cos", a), da)
    if expr.fn == "cos":
        return mk_neg(mk_mul(Call("sin", a), da))
    return mk_div(da, mk_mul(Const(2.0), expr))


def free_variables(expr):
    """Set of variable indices appearing in the expression."""
    if isinstance(expr, Const):
        return set()
    if isinstance(expr, Var):
        return {expr.index}
    if isinstance(expr, Neg):
        return free_variables(expr.arg)
    if isinstance(expr, Bin):
        return free_variables(expr.lhs) | free_variables(expr.rhs)
    return free_variables(expr.arg)


def _prec(expr):
    if isinstance(expr, (Var, Call)):
        return _ATOM
    if isinstance(expr, Const):
        return _NEG if expr.value < 0 else _ATOM
    if isinstance(expr, Neg):
        return _NEG
    return {"+": _ADD, "-": _ADD, "*": _MUL, "/": _MUL, "^": _POW}[expr.op]


def _render(expr, required):
    if isinstance(expr, Const):
        text = repr(expr.value)
    elif isinstance(expr, Var):
        text = expr.name
    elif isinstance(expr, Call):
        text = f"{expr.fn}({_render(expr.arg, 0)})"
    elif isinstance(expr, Neg):
        text = "-" + _render(expr.arg, _POW)
    elif expr.op in "+-":
        text = _render(expr.lhs, _ADD) + expr.op + _render(expr.rhs, _ADD + 1)
    elif expr.op in "*/":
        text = _render(expr.lhs, _MUL) + expr.op + _render(expr.rhs, _MUL + 1)
    else:
        text = _render(expr.lhs, _POW + 1) + "^" + _render(expr.rhs, _POW)
    if _prec(expr) < required:
        return "(" + text + ")"
    return text


def to_text(expr):
    """Canonical text form; parse(to_text(e), vars) equals e structurally."""
    return _render(expr, 0)
