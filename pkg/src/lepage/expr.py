"""Immutable scalar expression trees.

Nodes are built through the smart constructors (:func:`add`, :func:`mul`,
:func:`div`, :func:`power`, :func:`neg`, :func:`func`), which fold constants,
flatten nested sums/products and apply the 0/1 identities.  Nothing more
aggressive happens at construction time; full normalisation lives in
:mod:`lepage.poly`.
"""

from __future__ import annotations

import cmath
from fractions import Fraction
from typing import Callable, Iterable, Mapping

import numpy as np

from .errors import DivisionByZero, DomainError, UnboundName
from .gaussian import Gauss

FUNCTIONS = ("sin", "cos", "exp", "log")

# printing precedences
_ADD, _MUL, _NEG, _POW, _ATOM = 1, 2, 3, 4, 5


class Expr:
    __slots__ = ("_hash", "_names")

    def _init(self, key, names: frozenset):
        object.__setattr__(self, "_hash", hash((type(self).__name__, key)))
        object.__setattr__(self, "_names", names)

    def __setattr__(self, name, value):
        raise AttributeError("Expr nodes are immutable")

    def _key(self):
        raise NotImplementedError

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Expr) or type(self) is not type(other):
            return NotImplemented if not isinstance(other, Expr) else False
        return self._hash == other._hash and self._key() == other._key()

    def __hash__(self):
        return self._hash

    @property
    def names(self) -> frozenset:
        """Every Var and Param name occurring in the tree."""
        return self._names

    def __repr__(self):
        return f"Expr({to_text(self)!r})"

    def __str__(self):
        return to_text(self)

    # arithmetic sugar
    def __add__(self, o):
        return add(self, as_expr(o))

    def __radd__(self, o):
        return add(as_expr(o), self)

    def __sub__(self, o):
        return sub(self, as_expr(o))

    def __rsub__(self, o):
        return sub(as_expr(o), self)

    def __mul__(self, o):
        return mul(self, as_expr(o))

    def __rmul__(self, o):
        return mul(as_expr(o), self)

    def __truediv__(self, o):
        return div(self, as_expr(o))

    def __rtruediv__(self, o):
        return div(as_expr(o), self)

    def __neg__(self):
        return neg(self)

    def __pow__(self, k):
        return power(self, k)


class Const(Expr):
    __slots__ = ("value",)

    def __init__(self, value):
        object.__setattr__(self, "value", Gauss.coerce(value))
        self._init(self._key(), frozenset())

    def _key(self):
        return (self.value.re, self.value.im)


class Var(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._init(name, frozenset((name,)))

    def _key(self):
        return self.name


class Param(Expr):
    __slots__ = ("name",)

    def __init__(self, name: str):
        object.__setattr__(self, "name", name)
        self._init(name, frozenset((name,)))

    def _key(self):
        return self.name


class Neg(Expr):
    __slots__ = ("arg",)

    def __init__(self, arg: Expr):
        object.__setattr__(self, "arg", arg)
        self._init(self._key(), arg.names)

    def _key(self):
        return (self.arg,)


class Add(Expr):
    __slots__ = ("terms",)

    def __init__(self, terms: tuple):
        object.__setattr__(self, "terms", tuple(terms))
        self._init(self.terms, frozenset().union(*(t.names for t in self.terms)))

    def _key(self):
        return self.terms


class Mul(Expr):
    __slots__ = ("factors",)

    def __init__(self, factors: tuple):
        object.__setattr__(self, "factors", tuple(factors))
        self._init(self.factors, frozenset().union(*(f.names for f in self.factors)))

    def _key(self):
        return self.factors


class Div(Expr):
    __slots__ = ("num", "den")

    def __init__(self, num: Expr, den: Expr):
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)
        self._init(self._key(), num.names | den.names)

    def _key(self):
        return (self.num, self.den)


class Pow(Expr):
    __slots__ = ("base", "exp")

    def __init__(self, base: Expr, exp: int):
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "exp", int(exp))
        self._init(self._key(), base.names)

    def _key(self):
        return (self.base, self.exp)


class Func(Expr):
    __slots__ = ("kind", "arg")

    def __init__(self, kind: str, arg: Expr):
        if kind not in FUNCTIONS:
            raise ValueError(f"unsupported function {kind!r}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "arg", arg)
        self._init(self._key(), arg.names)

    def _key(self):
        return (self.kind, self.arg)


ZERO = Const(0)
ONE = Const(1)
IM = Const(Gauss(0, 1))


def as_expr(x) -> Expr:
    if isinstance(x, Expr):
        return x
    if isinstance(x, (int, Fraction, Gauss, complex)):
        return Const(x)
    if isinstance(x, float):
        return Const(Fraction(x))
    raise TypeError(f"cannot convert {type(x).__name__} to Expr")


def const(x) -> Const:
    return Const(x)


def is_zero(e: Expr) -> bool:
    return isinstance(e, Const) and e.value.is_zero()


def is_one(e: Expr) -> bool:
    return isinstance(e, Const) and e.value.is_one()


# ----------------------------------------------------------------------------
# smart constructors


def neg(e: Expr) -> Expr:
    if isinstance(e, Const):
        return Const(-e.value)
    if isinstance(e, Neg):
        return e.arg
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        return mul(Const(-e.factors[0].value), *e.factors[1:])
    return Neg(e)


def add(*terms) -> Expr:
    flat: list[Expr] = []
    c = Gauss(0)
    stack = [as_expr(t) for t in reversed(terms)]
    while stack:
        t = stack.pop()
        if isinstance(t, Add):
            stack.extend(reversed(t.terms))
        elif isinstance(t, Const):
            c = c + t.value
        else:
            flat.append(t)
    if not c.is_zero():
        flat.append(Const(c))
    if not flat:
        return ZERO
    if len(flat) == 1:
        return flat[0]
    return Add(tuple(flat))


def sub(a, b) -> Expr:
    return add(a, neg(as_expr(b)))


def mul(*factors) -> Expr:
    flat: list[Expr] = []
    c = Gauss(1)
    stack = [as_expr(f) for f in reversed(factors)]
    while stack:
        f = stack.pop()
        if isinstance(f, Mul):
            stack.extend(reversed(f.factors))
        elif isinstance(f, Neg):
            c = -c
            stack.append(f.arg)
        elif isinstance(f, Const):
            if f.value.is_zero():
                return ZERO
            c = c * f.value
        else:
            flat.append(f)
    if not flat:
        return Const(c)
    if c.is_one():
        return flat[0] if len(flat) == 1 else Mul(tuple(flat))
    if c == -1:
        return Neg(flat[0] if len(flat) == 1 else Mul(tuple(flat)))
    return Mul((Const(c), *flat))


def div(a, b) -> Expr:
    a, b = as_expr(a), as_expr(b)
    if isinstance(b, Const):
        if b.value.is_zero():
            raise DivisionByZero("division by the zero constant")
        return mul(Const(b.value.reciprocal()), a)
    if is_zero(a):
        return ZERO
    if a == b:
        return ONE
    if isinstance(a, Neg):
        return Neg(div(a.arg, b))
    if isinstance(a, Const) and _neg_gauss(a.value):
        return Neg(div(Const(-a.value), b))
    if isinstance(a, Mul) and isinstance(a.factors[0], Const):
        return mul(a.factors[0], div(mul(*a.factors[1:]), b))
    return Div(a, b)


def power(base, k: int) -> Expr:
    base = as_expr(base)
    if isinstance(k, Expr):
        if isinstance(k, Const) and k.value.is_integer():
            k = int(k.value.re)
        else:
            raise TypeError("exponent must be an integer")
    if not isinstance(k, int):
        raise TypeError("exponent must be an integer")
    if k == 0:
        return ONE
    if k == 1:
        return base
    if isinstance(base, Const):
        if base.value.is_zero() and k < 0:
            raise DivisionByZero("zero raised to a negative power")
        return Const(base.value**k)
    if isinstance(base, Pow):
        return power(base.base, base.exp * k)
    return Pow(base, k)


def func(kind: str, arg) -> Expr:
    arg = as_expr(arg)
    if is_zero(arg):
        if kind == "sin":
            return ZERO
        if kind in ("cos", "exp"):
            return ONE
    if kind == "log" and is_one(arg):
        return ZERO
    return Func(kind, arg)


def sin(a) -> Expr:
    return func("sin", a)


def cos(a) -> Expr:
    return func("cos", a)


def exp(a) -> Expr:
    return func("exp", a)


def log(a) -> Expr:
    return func("log", a)


def sum_exprs(items: Iterable) -> Expr:
    return add(*items)


# ----------------------------------------------------------------------------
# calculus and substitution


def differentiate(e: Expr, v: str) -> Expr:
    """Exact partial derivative of ``e`` with respect to the symbol ``v``."""
    if v not in e.names:
        return ZERO
    if isinstance(e, (Var, Param)):
        return ONE
    if isinstance(e, Neg):
        return neg(differentiate(e.arg, v))
    if isinstance(e, Add):
        return add(*(differentiate(t, v) for t in e.terms))
    if isinstance(e, Mul):
        fs = e.factors
        terms = []
        for k, f in enumerate(fs):
            if v in f.names:
                terms.append(mul(*fs[:k], differentiate(f, v), *fs[k + 1 :]))
        return add(*terms)
    if isinstance(e, Div):
        dn, dd = differentiate(e.num, v), differentiate(e.den, v)
        if is_zero(dd):
            return div(dn, e.den)
        return div(sub(mul(dn, e.den), mul(e.num, dd)), power(e.den, 2))
    if isinstance(e, Pow):
        return mul(Const(e.exp), power(e.base, e.exp - 1), differentiate(e.base, v))
    if isinstance(e, Func):
        da = differentiate(e.arg, v)
        if e.kind == "sin":
            return mul(cos(e.arg), da)
        if e.kind == "cos":
            return neg(mul(sin(e.arg), da))
        if e.kind == "exp":
            return mul(e, da)
        return div(da, e.arg)
    raise TypeError(f"unknown node {type(e).__name__}")


def substitute(e: Expr, bindings: Mapping[str, Expr]) -> Expr:
    """Simultaneous replacement of Var/Param symbols by expressions."""
    if not bindings or not (e.names & bindings.keys()):
        return e
    memo: dict = {}

    def go(x: Expr) -> Expr:
        if not (x.names & bindings.keys()):
            return x
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, (Var, Param)):
            out = as_expr(bindings[x.name])
        elif isinstance(x, Neg):
            out = neg(go(x.arg))
        elif isinstance(x, Add):
            out = add(*(go(t) for t in x.terms))
        elif isinstance(x, Mul):
            out = mul(*(go(f) for f in x.factors))
        elif isinstance(x, Div):
            out = div(go(x.num), go(x.den))
        elif isinstance(x, Pow):
            out = power(go(x.base), x.exp)
        elif isinstance(x, Func):
            out = func(x.kind, go(x.arg))
        else:
            raise TypeError(type(x).__name__)
        memo[x] = out
        return out

    return go(e)


def contains_func(e: Expr) -> bool:
    if isinstance(e, Func):
        return True
    for child in children(e):
        if contains_func(child):
            return True
    return False


def children(e: Expr) -> tuple:
    if isinstance(e, (Neg, Func)):
        return (e.arg,)
    if isinstance(e, Add):
        return e.terms
    if isinstance(e, Mul):
        return e.factors
    if isinstance(e, Div):
        return (e.num, e.den)
    if isinstance(e, Pow):
        return (e.base,)
    return ()


def params_of(e: Expr) -> set[str]:
    out: set[str] = set()
    stack = [e]
    while stack:
        x = stack.pop()
        if isinstance(x, Param):
            out.add(x.name)
        else:
            stack.extend(children(x))
    return out


# ----------------------------------------------------------------------------
# numeric evaluation

_CMATH = {"sin": cmath.sin, "cos": cmath.cos, "exp": cmath.exp, "log": cmath.log}
_NUMPY = {"sin": np.sin, "cos": np.cos, "exp": np.exp, "log": np.log}


def evaluate(e: Expr, env: Mapping[str, complex]):
    """Evaluate in double-precision complex arithmetic.

    ``env`` values may be numpy arrays, in which case evaluation is
    elementwise and an array is returned.
    """
    return _compile(e)(env)


def compile_expr(e: Expr) -> Callable[[Mapping[str, complex]], complex]:
    """Closure-compiled evaluator; reuse it when evaluating one tree many times."""
    return _compile(e)


def _is_array(x) -> bool:
    return isinstance(x, np.ndarray)


def _check_den(d):
    if _is_array(d):
        if np.any(d == 0):
            raise DivisionByZero("division by zero during evaluation")
    elif d == 0:
        raise DivisionByZero("division by zero during evaluation")


def _compile(e: Expr):
    if isinstance(e, Const):
        val = complex(e.value)
        return lambda env: val
    if isinstance(e, (Var, Param)):
        name = e.name

        def look(env):
            try:
                return env[name]
            except KeyError:
                raise UnboundName(name) from None

        return look
    if isinstance(e, Neg):
        a = _compile(e.arg)
        return lambda env: -a(env)
    if isinstance(e, Add):
        parts = [_compile(t) for t in e.terms]

        def run_add(env):
            total = parts[0](env)
            for p in parts[1:]:
                total = total + p(env)
            return total

        return run_add
    if isinstance(e, Mul):
        parts = [_compile(f) for f in e.factors]

        def run_mul(env):
            total = parts[0](env)
            for p in parts[1:]:
                total = total * p(env)
            return total

        return run_mul
    if isinstance(e, Div):
        n, d = _compile(e.num), _compile(e.den)

        def run_div(env):
            dv = d(env)
            _check_den(dv)
            return n(env) / dv

        return run_div
    if isinstance(e, Pow):
        b, k = _compile(e.base), e.exp

        def run_pow(env):
            bv = b(env)
            if k < 0:
                _check_den(bv)
                return 1 / bv ** (-k)
            return bv**k

        return run_pow
    if isinstance(e, Func):
        a, kind = _compile(e.arg), e.kind

        def run_func(env):
            av = a(env)
            if kind == "log":
                _check_log(av)
            if _is_array(av):
                return _NUMPY[kind](av.astype(complex))
            return _CMATH[kind](complex(av))

        return run_func
    raise TypeError(type(e).__name__)


def _check_log(v):
    if (_is_array(v) and np.any(v == 0)) or (not _is_array(v) and v == 0):
        raise DomainError("log of zero")


# ----------------------------------------------------------------------------
# printing


def to_text(e: Expr) -> str:
    """Render in the grammar accepted by :func:`lepage.parser.parse`."""
    return _fmt(e)[0]


def _wrap(e: Expr, min_prec: int) -> str:
    s, p = _fmt(e)
    return f"({s})" if p < min_prec else s


def _const_fmt(g: Gauss) -> tuple[str, int]:
    s = g.to_text()
    if not g.is_real():
        if g.re != 0:
            return s, _ADD
        return s, (_NEG if s.startswith("-") else _MUL if "*" in s else _ATOM)
    if g.re < 0:
        return s, _NEG
    if g.re.denominator != 1:
        return s, _MUL
    return s, _ATOM


def _neg_gauss(c: Gauss) -> bool:
    return c.re < 0 or (c.re == 0 and c.im < 0)


def _is_negative(e: Expr) -> bool:
    if isinstance(e, Neg):
        return True
    if isinstance(e, Const):
        return _neg_gauss(e.value)
    if isinstance(e, Mul) and isinstance(e.factors[0], Const):
        return _neg_gauss(e.factors[0].value)
    return False


def _fmt(e: Expr) -> tuple[str, int]:
    if isinstance(e, Const):
        return _const_fmt(e.value)
    if isinstance(e, (Var, Param)):
        return e.name, _ATOM
    if isinstance(e, Neg):
        return "-" + _wrap(e.arg, _MUL), _NEG
    if isinstance(e, Add):
        out = _wrap(e.terms[0], _ADD + 1)
        for t in e.terms[1:]:
            if _is_negative(t):
                out += " - " + _wrap(neg(t), _ADD + 1)
            else:
                out += " + " + _wrap(t, _ADD + 1)
        return out, _ADD
    if isinstance(e, Mul):
        fs = list(e.factors)
        lead = ""
        if isinstance(fs[0], Const):
            c = fs.pop(0).value
            if c == -1:
                lead = "-"
            elif _neg_gauss(c):
                s, p = _const_fmt(-c)
                lead = "-" + (f"({s})" if p < _MUL else s) + "*"
            else:
                s, p = _const_fmt(c)
                lead = (f"({s})" if p < _MUL else s) + "*"
        body = "*".join(_wrap(f, _POW) for f in fs)
        return lead + body, (_NEG if lead.startswith("-") else _MUL)
    if isinstance(e, Div):
        return f"{_wrap(e.num, _MUL)}/{_wrap(e.den, _POW)}", _MUL
    if isinstance(e, Pow):
        k = str(e.exp) if e.exp >= 0 else f"({e.exp})"
        return f"{_wrap(e.base, _ATOM)}^{k}", _POW
    if isinstance(e, Func):
        return f"{e.kind}({_fmt(e.arg)[0]})", _ATOM
    raise TypeError(type(e).__name__)
