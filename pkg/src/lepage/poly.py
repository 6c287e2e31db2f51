"""Canonical sparse polynomials over Gaussian rationals, and symbolic equality.

A monomial is a tuple of ``(name, exponent)`` pairs sorted by name, so two
equal polynomials always have identical term dictionaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np

from . import expr as E
from .errors import DivisionByZero, DomainError, NotPolynomial
from .gaussian import Gauss

Monomial = tuple  # tuple[tuple[str, int], ...]

#: seed used by the probabilistic fallback of :func:`equals`
DEFAULT_SEED = 42
N_PROBES = 20


def set_default_seed(seed: int) -> None:
    global DEFAULT_SEED
    DEFAULT_SEED = int(seed)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    d = dict(a)
    for name, k in b:
        d[name] = d.get(name, 0) + k
    return tuple(sorted(d.items()))


class Polynomial:
    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[Monomial, Gauss] | None = None):
        clean = {}
        for mono, c in (terms or {}).items():
            c = Gauss.coerce(c)
            if not c.is_zero():
                clean[tuple(sorted((n, k) for n, k in mono if k != 0))] = c
        object.__setattr__(self, "terms", clean)

    def __setattr__(self, name, value):
        raise AttributeError("Polynomial is immutable")

    @classmethod
    def _raw(cls, terms: dict) -> "Polynomial":
        p = object.__new__(cls)
        object.__setattr__(p, "terms", terms)
        return p

    @classmethod
    def constant(cls, c) -> "Polynomial":
        c = Gauss.coerce(c)
        return cls._raw({} if c.is_zero() else {(): c})

    @classmethod
    def symbol(cls, name: str) -> "Polynomial":
        return cls._raw({((name, 1),): Gauss(1)})

    # -- inspection -----------------------------------------------------------
    @property
    def variables(self) -> tuple[str, ...]:
        return tuple(sorted({n for mono in self.terms for n, _ in mono}))

    def exponent_map(self) -> dict[tuple[int, ...], Gauss]:
        """Terms keyed by exponent vectors over :attr:`variables`."""
        vs = self.variables
        pos = {v: k for k, v in enumerate(vs)}
        out = {}
        for mono, c in self.terms.items():
            vec = [0] * len(vs)
            for n, k in mono:
                vec[pos[n]] = k
            out[tuple(vec)] = c
        return out

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not mono for mono in self.terms)

    def constant_value(self) -> Gauss:
        if not self.is_constant():
            raise ValueError("polynomial is not constant")
        return self.terms.get((), Gauss(0))

    def total_degree(self) -> int:
        return max((sum(k for _, k in mono) for mono in self.terms), default=0)

    def degree_in(self, names) -> int:
        names = set(names)
        return max((sum(k for n, k in mono if n in names) for mono in self.terms), default=0)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return f"Polynomial({E.to_text(self.to_expr())!r})"

    # -- arithmetic -----------------------------------------------------------
    def __add__(self, other: "Polynomial") -> "Polynomial":
        if not other.terms:
            return self
        out = dict(self.terms)
        for mono, c in other.terms.items():
            s = out.get(mono)
            s = c if s is None else s + c
            if s.is_zero():
                out.pop(mono, None)
            else:
                out[mono] = s
        return Polynomial._raw(out)

    def __neg__(self) -> "Polynomial":
        return Polynomial._raw({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def scale(self, c) -> "Polynomial":
        c = Gauss.coerce(c)
        if c.is_zero():
            return Polynomial._raw({})
        return Polynomial._raw({m: v * c for m, v in self.terms.items()})

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.terms or not other.terms:
            return Polynomial._raw({})
        out: dict = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                mono = _mono_mul(m1, m2)
                s = out.get(mono)
                out[mono] = c1 * c2 if s is None else s + c1 * c2
        return Polynomial._raw({m: c for m, c in out.items() if not c.is_zero()})

    def __pow__(self, k: int) -> "Polynomial":
        if k < 0:
            raise ValueError("negative polynomial power")
        out, base = Polynomial.constant(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def to_expr(self, params=()) -> E.Expr:
        """Rebuild an expression; names listed in ``params`` become Param nodes."""
        params = set(params)
        terms = []
        for mono in sorted(self.terms, key=lambda m: (-sum(k for _, k in m), m)):
            factors = [E.Const(self.terms[mono])]
            for n, k in mono:
                sym = E.Param(n) if n in params else E.Var(n)
                factors.append(E.power(sym, k))
            terms.append(E.mul(*factors))
        return E.add(*terms)


def canonical(e: E.Expr) -> Polynomial:
    """Unique expanded form of a polynomial expression.

    Raises :class:`NotPolynomial` on transcendental nodes and on division by a
    non-constant expression.
    """
    memo: dict = {}

    def go(x: E.Expr) -> Polynomial:
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, E.Const):
            out = Polynomial.constant(x.value)
        elif isinstance(x, (E.Var, E.Param)):
            out = Polynomial.symbol(x.name)
        elif isinstance(x, E.Neg):
            out = -go(x.arg)
        elif isinstance(x, E.Add):
            out = Polynomial._raw({})
            for t in x.terms:
                out = out + go(t)
        elif isinstance(x, E.Mul):
            out = go(x.factors[0])
            for f in x.factors[1:]:
                out = out * go(f)
        elif isinstance(x, E.Div):
            den = go(x.den)
            if not den.is_constant():
                raise NotPolynomial(f"division by non-constant {E.to_text(x.den)}")
            if den.is_zero():
                raise DivisionByZero("division by zero")
            out = go(x.num).scale(den.constant_value().reciprocal())
        elif isinstance(x, E.Pow):
            b = go(x.base)
            if x.exp >= 0:
                out = b**x.exp
            elif b.is_constant() and not b.is_zero():
                out = Polynomial.constant(b.constant_value() ** x.exp)
            else:
                raise NotPolynomial(f"negative power of {E.to_text(x.base)}")
        elif isinstance(x, E.Func):
            raise NotPolynomial(f"transcendental node {x.kind}")
        else:
            raise TypeError(type(x).__name__)
        memo[x] = out
        return out

    return go(e)


@dataclass(frozen=True)
class RationalForm:
    """``num / den`` with polynomial parts; not reduced."""

    num: Polynomial
    den: Polynomial

    def is_zero(self) -> bool:
        return self.num.is_zero()


def to_rational(e: E.Expr) -> RationalForm:
    """Numerator/denominator normal form.  Raises NotPolynomial on Func nodes."""
    one = Polynomial.constant(1)
    memo: dict = {}

    def norm(num: Polynomial, den: Polynomial) -> tuple:
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if den.is_constant():
            return num.scale(den.constant_value().reciprocal()), one
        return num, den

    def go(x: E.Expr) -> tuple:
        hit = memo.get(x)
        if hit is not None:
            return hit
        if isinstance(x, E.Const):
            out = (Polynomial.constant(x.value), one)
        elif isinstance(x, (E.Var, E.Param)):
            out = (Polynomial.symbol(x.name), one)
        elif isinstance(x, E.Neg):
            n, d = go(x.arg)
            out = (-n, d)
        elif isinstance(x, E.Add):
            n, d = go(x.terms[0])
            for t in x.terms[1:]:
                n2, d2 = go(t)
                if d2 == d:
                    n = n + n2
                else:
                    n, d = n * d2 + n2 * d, d * d2
            out = norm(n, d)
        elif isinstance(x, E.Mul):
            n, d = go(x.factors[0])
            for f in x.factors[1:]:
                n2, d2 = go(f)
                n, d = n * n2, d * d2
            out = norm(n, d)
        elif isinstance(x, E.Div):
            n1, d1 = go(x.num)
            n2, d2 = go(x.den)
            out = norm(n1 * d2, d1 * n2)
        elif isinstance(x, E.Pow):
            n, d = go(x.base)
            k = x.exp
            out = norm(n**k, d**k) if k >= 0 else norm(d ** (-k), n ** (-k))
        elif isinstance(x, E.Func):
            raise NotPolynomial(f"transcendental node {x.kind}")
        else:
            raise TypeError(type(x).__name__)
        memo[x] = out
        return out

    n, d = go(e)
    return RationalForm(n, d)


def is_polynomial(e: E.Expr) -> bool:
    try:
        canonical(e)
    except NotPolynomial:
        return False
    return True


@dataclass(frozen=True)
class Equality:
    """Verdict of :func:`equals`.  Truthiness is the verdict itself."""

    equal: bool
    exact: bool
    max_error: float = 0.0

    @property
    def method(self) -> str:
        return "exact" if self.exact else "probabilistic"

    def __bool__(self):
        return self.equal


def equals(e1: E.Expr, e2: E.Expr, seed: int | None = None) -> Equality:
    """Symbolic equality: exact when both sides are rational functions,
    otherwise a seeded evaluation test at :data:`N_PROBES` complex points."""
    e1, e2 = E.as_expr(e1), E.as_expr(e2)
    if e1 == e2:
        return Equality(True, True)
    diff = E.sub(e1, e2)
    if not E.contains_func(diff):
        return Equality(to_rational(diff).is_zero(), True)
    # with function nodes as opaque atoms a zero difference is a proof;
    # a nonzero one is inconclusive (e.g. sin^2 + cos^2 - 1)
    if to_rational(_atomize(diff)[0]).is_zero():
        return Equality(True, True)
    return _probabilistic(e1, e2, DEFAULT_SEED if seed is None else seed)


def _probabilistic(e1, e2, seed) -> Equality:
    names = sorted(e1.names | e2.names)
    rng = np.random.default_rng(seed)
    f1, f2 = E.compile_expr(e1), E.compile_expr(e2)
    worst_diff, worst_val, used, tries = 0.0, 0.0, 0, 0
    while used < N_PROBES and tries < 5 * N_PROBES:
        tries += 1
        pt = rng.uniform(-1, 1, (len(names), 2))
        env = {n: complex(a, b) for n, (a, b) in zip(names, pt)}
        try:
            a, b = f1(env), f2(env)
        except (DivisionByZero, DomainError, OverflowError, ZeroDivisionError):
            continue
        used += 1
        worst_diff = max(worst_diff, abs(a - b))
        worst_val = max(worst_val, abs(a))
    if used == 0:
        return Equality(False, False, float("inf"))
    return Equality(worst_diff <= 1e-9 * (1 + worst_val), False, worst_diff)


def cancel_monomial(num: Polynomial, den: Polynomial) -> tuple[Polynomial, Polynomial]:
    """Divide out the largest monomial common to ``num`` and ``den``; a
    one-term denominator also absorbs its coefficient into ``num``."""
    if num.is_zero():
        return num, Polynomial.constant(1)
    common = None
    for mono in list(num.terms) + list(den.terms):
        d = dict(mono)
        common = d if common is None else {k: min(v, d[k]) for k, v in common.items() if k in d}
    common = {k: v for k, v in (common or {}).items() if v}

    def strip(p: Polynomial) -> dict:
        return {tuple((n, k - common.get(n, 0)) for n, k in mono): c for mono, c in p.terms.items()}

    num, den = Polynomial(strip(num)), Polynomial(strip(den))
    if len(den.terms) == 1:
        c = next(iter(den.terms.values())).reciprocal()
        num, den = num.scale(c), den.scale(c)
    return num, den


def _atomize(e: E.Expr) -> tuple[E.Expr, dict[str, E.Expr]]:
    """Replace each distinct function node by a fresh variable ``_fK``;
    function arguments are simplified first."""
    table: dict[E.Expr, str] = {}

    def visit(x: E.Expr) -> E.Expr:
        if isinstance(x, E.Func):
            key = E.func(x.kind, simplify(x.arg))
            if not isinstance(key, E.Func):
                return visit(key)
            name = table.get(key)
            if name is None:
                name = table[key] = f"_f{len(table)}"
            return E.Var(name)
        kids = E.children(x)
        if not kids:
            return x
        return _rebuild(x, [visit(k) for k in kids])

    out = visit(e)
    return out, {v: k for k, v in table.items()}


def _rebuild(x: E.Expr, kids: list) -> E.Expr:
    if isinstance(x, E.Neg):
        return E.neg(kids[0])
    if isinstance(x, E.Add):
        return E.add(*kids)
    if isinstance(x, E.Mul):
        return E.mul(*kids)
    if isinstance(x, E.Div):
        return E.div(kids[0], kids[1])
    if isinstance(x, E.Pow):
        return E.power(kids[0], x.exp)
    raise TypeError(type(x).__name__)


def simplify(e: E.Expr) -> E.Expr:
    """Expanded canonical form for polynomials; ``num/den`` with expanded
    parts for rational functions whose denominator is a single monomial;
    otherwise ``e`` unchanged."""
    params = E.params_of(e)
    atoms: dict[str, E.Expr] = {}
    if E.contains_func(e):
        e, atoms = _atomize(e)
    try:
        out = canonical(e).to_expr(params)
    except NotPolynomial:
        try:
            r = to_rational(e)
        except DivisionByZero:
            out = e
        else:
            num, den = cancel_monomial(r.num, r.den)
            out = E.div(num.to_expr(params), den.to_expr(params)) if len(den.terms) == 1 else e
    return E.substitute(out, atoms) if atoms else out
