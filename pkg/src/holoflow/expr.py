"""Holomorphic expression trees: parsing, evaluation, symbolic differentiation.

Expressions are immutable trees over the variable z, complex constants
(including the literals i and e), the four arithmetic operations, powers with
a real constant exponent, and exp / log / sqrt (principal branch everywhere).
Evaluation accepts either a scalar complex or a numpy array of points and is
pure, so trees can be shared freely between workers.
"""

from __future__ import annotations

import math
import re

import numpy as np

__all__ = [
    "HoloExpr",
    "ParseDiagnostic",
    "EvalDomainError",
    "parse",
    "evaluate",
    "evaluate_array",
    "differentiate",
    "precompose_mobius",
    "to_source",
]


class ParseDiagnostic(Exception):
    """Raised on malformed input; carries the byte offset of the problem."""

    def __init__(self, offset, message, expected=None):
        self.offset = offset
        self.message = message
        self.expected = expected or []
        detail = " (expected %s)" % ", ".join(self.expected) if self.expected else ""
        super().__init__("at offset %d: %s%s" % (offset, message, detail))


class EvalDomainError(Exception):
    """Evaluation hit a pole or branch point; the sample should be excluded."""


# ---------------------------------------------------------------------------
# tree nodes
# ---------------------------------------------------------------------------

class HoloExpr:
    """Base class for all expression nodes."""

    __slots__ = ()

    def _ev(self, z):
        raise NotImplementedError

    def _d(self):
        raise NotImplementedError

    def __repr__(self):
        return "HoloExpr(%s)" % to_source(self)

    def __call__(self, z):
        return evaluate(self, z) if np.isscalar(z) else evaluate_array(self, z)


class Const(HoloExpr):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = complex(value)

    def _ev(self, z):
        return np.full_like(z, self.value)

    def _d(self):
        return Const(0.0)


class Var(HoloExpr):
    __slots__ = ()

    def _ev(self, z):
        return z

    def _d(self):
        return Const(1.0)


class Add(HoloExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def _ev(self, z):
        return self.a._ev(z) + self.b._ev(z)

    def _d(self):
        return add(self.a._d(), self.b._d())


class Sub(HoloExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def _ev(self, z):
        return self.a._ev(z) - self.b._ev(z)

    def _d(self):
        return sub(self.a._d(), self.b._d())


class Mul(HoloExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def _ev(self, z):
        return self.a._ev(z) * self.b._ev(z)

    def _d(self):
        return add(mul(self.a._d(), self.b), mul(self.a, self.b._d()))


class Div(HoloExpr):
    __slots__ = ("a", "b")

    def __init__(self, a, b):
        self.a, self.b = a, b

    def _ev(self, z):
        return self.a._ev(z) / self.b._ev(z)

    def _d(self):
        num = sub(mul(self.a._d(), self.b), mul(self.a, self.b._d()))
        return div(num, mul(self.b, self.b))


class Neg(HoloExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def _ev(self, z):
        return -self.a._ev(z)

    def _d(self):
        return neg(self.a._d())


class Pow(HoloExpr):
    """base ** p with a fixed real exponent, principal branch."""

    __slots__ = ("a", "p")

    def __init__(self, a, p):
        self.a, self.p = a, float(p)

    def _ev(self, z):
        return np.power(self.a._ev(z), self.p)

    def _d(self):
        # d(u^p) = p * u^(p-1) * u'
        return mul(mul(Const(self.p), Pow(self.a, self.p - 1.0)), self.a._d())


class Exp(HoloExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def _ev(self, z):
        return np.exp(self.a._ev(z))

    def _d(self):
        return mul(Exp(self.a), self.a._d())


class Log(HoloExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def _ev(self, z):
        return np.log(self.a._ev(z))

    def _d(self):
        return div(self.a._d(), self.a)


class Sqrt(HoloExpr):
    __slots__ = ("a",)

    def __init__(self, a):
        self.a = a

    def _ev(self, z):
        return np.sqrt(self.a._ev(z))

    def _d(self):
        return div(self.a._d(), mul(Const(2.0), Sqrt(self.a)))


# ---------------------------------------------------------------------------
# smart constructors (light constant folding, keeps derivative trees readable)
# ---------------------------------------------------------------------------

def _const_of(e):
    return e.value if isinstance(e, Const) else None


def add(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if ca is not None and cb is not None:
        return Const(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    return Add(a, b)


def sub(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if ca is not None and cb is not None:
        return Const(ca - cb)
    if cb == 0:
        return a
    if ca == 0:
        return neg(b)
    return Sub(a, b)


def mul(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if ca is not None and cb is not None:
        return Const(ca * cb)
    if ca == 0 or cb == 0:
        return Const(0.0)
    if ca == 1:
        return b
    if cb == 1:
        return a
    return Mul(a, b)


def div(a, b):
    ca, cb = _const_of(a), _const_of(b)
    if ca == 0:
        return Const(0.0)
    if cb == 1:
        return a
    if ca is not None and cb is not None and cb != 0:
        return Const(ca / cb)
    return Div(a, b)


def neg(a):
    ca = _const_of(a)
    if ca is not None:
        return Const(-ca)
    if isinstance(a, Neg):
        return a.a
    return Neg(a)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

def evaluate(expr, z):
    """Evaluate at a single point; raises EvalDomainError on poles/branch hits."""
    arr = evaluate_array(expr, np.asarray([complex(z)]))
    v = complex(arr[0])
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise EvalDomainError("expression not finite at %r" % (z,))
    return v


def evaluate_array(expr, z):
    """Vectorized evaluation; non-finite entries mark excluded samples."""
    z = np.asarray(z, dtype=complex)
    with np.errstate(all="ignore"):
        out = expr._ev(z)
    return np.asarray(out, dtype=complex)


def differentiate(expr):
    """Exact symbolic derivative tree."""
    return expr._d()


def substitute(expr, replacement):
    """Replace the variable z by another expression tree."""
    if isinstance(expr, Var):
        return replacement
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, (Add, Sub, Mul, Div)):
        cls = type(expr)
        return cls(substitute(expr.a, replacement), substitute(expr.b, replacement))
    if isinstance(expr, Pow):
        return Pow(substitute(expr.a, replacement), expr.p)
    if isinstance(expr, (Neg, Exp, Log, Sqrt)):
        return type(expr)(substitute(expr.a, replacement))
    raise TypeError("unknown node %r" % expr)


def precompose_mobius(expr, m):
    """Return the tree computing expr(m(z)) for a disc automorphism m."""
    a, u = complex(m.a), complex(m.rot)
    # m(z) = u * (a - z) / (1 - conj(a) z)
    num = mul(Const(u), sub(Const(a), Var()))
    den = sub(Const(1.0), mul(Const(a.conjugate()), Var()))
    return substitute(expr, div(num, den))


# ---------------------------------------------------------------------------
# printing
# ---------------------------------------------------------------------------

def _fmt_real(x):
    if x == int(x) and abs(x) < 1e15:
        return repr(int(x))
    return repr(x)


def _fmt_const(c):
    if c.imag == 0:
        x = c.real
        return "(%s)" % _fmt_real(x) if x < 0 else _fmt_real(x)
    if c.real == 0:
        if c.imag == 1:
            return "i"
        if c.imag == -1:
            return "(-i)"
        return "(%s*i)" % _fmt_real(c.imag)
    op = "+" if c.imag >= 0 else "-"
    return "(%s%s%s*i)" % (_fmt_real(c.real), op, _fmt_real(abs(c.imag)))


_PREC = {"add": 1, "mul": 2, "unary": 3, "pow": 4, "atom": 5}


def _src(e):
    # returns (text, precedence level)
    if isinstance(e, Const):
        if e.value == math.e:
            return "e", _PREC["atom"]
        return _fmt_const(e.value), _PREC["atom"]
    if isinstance(e, Var):
        return "z", _PREC["atom"]
    if isinstance(e, Neg):
        t, p = _src(e.a)
        if p < _PREC["unary"]:
            t = "(%s)" % t
        return "-%s" % t, _PREC["unary"]
    if isinstance(e, (Add, Sub)):
        lt, lp = _src(e.a)
        rt, rp = _src(e.b)
        if lp < _PREC["add"]:
            lt = "(%s)" % lt
        # right operand of '-' binds tighter
        need = _PREC["add"] + (1 if isinstance(e, Sub) else 0)
        if rp < need:
            rt = "(%s)" % rt
        return "%s %s %s" % (lt, "+" if isinstance(e, Add) else "-", rt), _PREC["add"]
    if isinstance(e, (Mul, Div)):
        lt, lp = _src(e.a)
        rt, rp = _src(e.b)
        if lp < _PREC["mul"]:
            lt = "(%s)" % lt
        need = _PREC["mul"] + (1 if isinstance(e, Div) else 0)
        if rp < need:
            rt = "(%s)" % rt
        return "%s%s%s" % (lt, "*" if isinstance(e, Mul) else "/", rt), _PREC["mul"]
    if isinstance(e, Pow):
        bt, bp = _src(e.a)
        if bp < _PREC["atom"]:
            bt = "(%s)" % bt
        p = e.p
        ps = _fmt_real(p) if p >= 0 else "(%s)" % _fmt_real(p)
        return "%s^%s" % (bt, ps), _PREC["pow"]
    for cls, name in ((Exp, "exp"), (Log, "log"), (Sqrt, "sqrt")):
        if isinstance(e, cls):
            return "%s(%s)" % (name, _src(e.a)[0]), _PREC["atom"]
    raise TypeError("unknown node %r" % e)


def to_source(expr):
    """Canonical printed form; parse(to_source(e)) reproduces the values."""
    return _src(expr)[0]


# ---------------------------------------------------------------------------
# parser  (recursive descent over the grammar:
#   expr   := term { ("+"|"-") term }
#   term   := unary { ("*"|"/") unary }
#   unary  := ["-"] factor
#   factor := base [ "^" number ]
#   base   := "z" | "i" | "e" | number | "(" expr ")" | ident "(" expr ")"
#   ident  in {exp, log, sqrt} )
# ---------------------------------------------------------------------------

_NUMBER_RE = re.compile(r"\d+(?:\.\d*)?|\.\d+")
_IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")
_FUNCTIONS = {"exp": Exp, "log": Log, "sqrt": Sqrt}


class _Parser:
    def __init__(self, text):
        self.text = text
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self):
        self._skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expect(self, ch):
        if self._peek() != ch:
            raise ParseDiagnostic(self.pos, "unexpected %r" % (self._peek() or "end of input"),
                                  expected=[repr(ch)])
        self.pos += 1

    def _number(self, signed=False):
        self._skip_ws()
        start = self.pos
        sign = 1.0
        if signed and self._peek() == "-":
            sign = -1.0
            self.pos += 1
            self._skip_ws()
        m = _NUMBER_RE.match(self.text, self.pos)
        if not m:
            raise ParseDiagnostic(self.pos, "malformed number", expected=["decimal literal"])
        self.pos = m.end()
        try:
            return sign * float(m.group(0))
        except ValueError:
            raise ParseDiagnostic(start, "malformed number", expected=["decimal literal"])

    def parse_expr(self):
        node = self.parse_term()
        while self._peek() and self._peek() in "+-":
            op = self._peek()
            self.pos += 1
            rhs = self.parse_term()
            node = Add(node, rhs) if op == "+" else Sub(node, rhs)
        return node

    def parse_term(self):
        node = self.parse_unary()
        while self._peek() and self._peek() in "*/":
            op = self._peek()
            self.pos += 1
            rhs = self.parse_unary()
            node = Mul(node, rhs) if op == "*" else Div(node, rhs)
        return node

    def parse_unary(self):
        if self._peek() == "-":
            self.pos += 1
            return Neg(self.parse_unary())
        return self.parse_factor()

    def parse_factor(self):
        node = self.parse_base()
        if self._peek() == "^":
            self.pos += 1
            p = self._number(signed=True)
            node = Pow(node, p)
        return node

    def parse_base(self):
        ch = self._peek()
        if ch == "":
            raise ParseDiagnostic(self.pos, "unexpected end of input",
                                  expected=["z", "i", "e", "number", "(", "function"])
        if ch == "(":
            self.pos += 1
            node = self.parse_expr()
            self._expect(")")
            return node
        if ch.isdigit() or ch == ".":
            return Const(self._number())
        m = _IDENT_RE.match(self.text, self.pos)
        if not m:
            raise ParseDiagnostic(self.pos, "unexpected %r" % ch,
                                  expected=["z", "i", "e", "number", "(", "function"])
        name = m.group(0)
        if name == "z":
            self.pos = m.end()
            return Var()
        if name == "i":
            self.pos = m.end()
            return Const(1j)
        if name == "e":
            self.pos = m.end()
            return Const(math.e)
        if name in _FUNCTIONS:
            self.pos = m.end()
            self._expect("(")
            inner = self.parse_expr()
            self._expect(")")
            return _FUNCTIONS[name](inner)
        raise ParseDiagnostic(self.pos, "unknown identifier %r" % name,
                              expected=sorted(_FUNCTIONS) + ["z", "i", "e"])


def parse(text):
    """Parse an expression source string into a HoloExpr tree."""
    if not text or not text.strip():
        raise ParseDiagnostic(0, "empty input")
    p = _Parser(text)
    node = p.parse_expr()
    p._skip_ws()
    if p.pos != len(text):
        raise ParseDiagnostic(p.pos, "trailing input %r" % text[p.pos:],
                              expected=["end of input"])
    return node
