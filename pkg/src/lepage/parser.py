"""Recursive-descent parser for expression text.

Grammar (``^`` binds tighter than unary minus, which binds tighter than
``*``/``/``; everything is left-associative except ``^``)::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := '-' unary | power
    power   := atom ('^' unary)?
    atom    := NUMBER | NAME | FUNC '(' expr ')' | '(' expr ')'

Numbers are decimal literals and are kept exact; ``p/q`` folds to an exact
rational.  ``im`` is the imaginary unit.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable

from . import expr as E
from .chart import Chart
from .errors import ExprSyntaxError, NonIntegerExponent, UnknownIdentifier

_TOKEN = re.compile(r"(\d+(?:\.\d*)?|\.\d+)|([A-Za-z][A-Za-z0-9_]*)|(\S)")


def _tokenize(text: str):
    out = []
    for mt in _TOKEN.finditer(text):
        num, name, op = mt.groups()
        if num is not None:
            out.append(("num", num, mt.start()))
        elif name is not None:
            out.append(("name", name, mt.start()))
        else:
            if op not in "+-*/^()":
                raise ExprSyntaxError(f"unexpected character {op!r}", mt.start())
            out.append(("op", op, mt.start()))
    out.append(("end", "", len(text)))
    return out


class _Parser:
    def __init__(self, text: str, chart: Chart | None, params: Iterable[str], extra: Iterable[str]):
        self.toks = _tokenize(text)
        self.k = 0
        self.chart = chart
        self.params = set(params)
        self.extra = set(extra)

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value or t[0] != "op":
            found = "end of input" if t[0] == "end" else repr(t[1])
            raise ExprSyntaxError(f"expected {value!r}, found {found}", t[2])

    def parse(self) -> E.Expr:
        e = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ExprSyntaxError(f"unexpected {t[1]!r}", t[2])
        return e

    def expr(self):
        e = self.term()
        while self.peek()[:2] in (("op", "+"), ("op", "-")):
            op = self.take()[1]
            rhs = self.term()
            e = E.add(e, rhs) if op == "+" else E.sub(e, rhs)
        return e

    def term(self):
        e = self.unary()
        while self.peek()[:2] in (("op", "*"), ("op", "/")):
            _, op, pos = self.take()
            rhs = self.unary()
            if op == "*":
                e = E.mul(e, rhs)
            else:
                if E.is_zero(rhs):
                    raise ExprSyntaxError("division by literal zero", pos)
                e = E.div(e, rhs)
        return e

    def unary(self):
        if self.peek()[:2] == ("op", "-"):
            self.take()
            return E.neg(self.unary())
        return self.power()

    def power(self):
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            pos = self.take()[2]
            ex = self.unary()
            if not (isinstance(ex, E.Const) and ex.value.is_integer()):
                raise NonIntegerExponent(f"exponent at position {pos} is not an integer literal")
            k = int(ex.value.re)
            if E.is_zero(base) and k < 0:
                raise ExprSyntaxError("zero raised to a negative power", pos)
            return E.power(base, k)
        return base

    def atom(self):
        kind, val, pos = self.take()
        if kind == "num":
            return E.Const(Fraction(val))
        if kind == "name":
            if self.peek()[:2] == ("op", "("):
                if val not in E.FUNCTIONS:
                    raise UnknownIdentifier(val, pos)
                self.take()
                arg = self.expr()
                self.expect(")")
                return E.func(val, arg)
            return self.symbol(val, pos)
        if (kind, val) == ("op", "("):
            e = self.expr()
            self.expect(")")
            return e
        found = "end of input" if kind == "end" else repr(val)
        raise ExprSyntaxError(f"unexpected {found}", pos)

    def symbol(self, name, pos):
        if name == "im":
            return E.IM
        if name in self.params:
            return E.Param(name)
        if name in self.extra:
            return E.Var(name)
        if self.chart is not None:
            canon = self.chart.normalize(name)
            if canon is not None:
                return E.Var(canon)
        raise UnknownIdentifier(name, pos)


def parse(text: str, chart: Chart | None = None, params: Iterable[str] = (),
          extra_vars: Iterable[str] = ()) -> E.Expr:
    """Parse ``text`` into an :class:`~lepage.expr.Expr`.

    Identifiers must be coordinates of ``chart``, names in ``params``
    (which become Param nodes), names in ``extra_vars``, or ``im``.
    """
    if not isinstance(text, str):
        raise TypeError("expression text must be a string")
    return _Parser(text, chart, params, extra_vars).parse()
