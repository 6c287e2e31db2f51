"""First-order Lagrangians: quadratic coefficients, De Donder data,
standard regularity and Euler-Lagrange expressions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import expr as E
from . import linalg
from .chart import Chart, JetPoint, is_coordinate_like
from .errors import NotQuadraticInVelocities
from .gaussian import Gauss
from .poly import equals

Matrix = list  # list[list[E.Expr]]


@dataclass(frozen=True)
class GeneralLagrangian:
    chart: Chart
    expr: E.Expr
    params: tuple = ()
    defaults: Mapping[str, Gauss] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "defaults", {k: Gauss.coerce(v) for k, v in self.defaults.items()})
        for p in self.params:
            if is_coordinate_like(p) or p == "im":
                raise ValueError(f"parameter name {p!r} collides with a coordinate name")
        allowed = set(self.chart.x_names + self.chart.y_names + self.chart.jet_names) | set(self.params)
        stray = self.expr.names - allowed
        if stray:
            raise ValueError(f"Lagrangian uses names outside (x, y, y_j, params): {sorted(stray)}")

    @property
    def L(self) -> E.Expr:
        return self.expr

    def bindings(self, overrides: Mapping[str, complex] | None = None) -> dict[str, complex]:
        env = {k: complex(v) for k, v in self.defaults.items()}
        env.update(overrides or {})
        return env

    def with_expr(self, e: E.Expr) -> "GeneralLagrangian":
        return GeneralLagrangian(self.chart, e, self.params, self.defaults)


@dataclass(frozen=True)
class QuadraticLagrangian:
    """``L = a + b . v + v^T c v`` with ``c`` a symmetric matrix in flat indices,
    i.e. ``c[flat(s, j)][flat(nu, k)]`` is the coefficient c^{jk}_{s nu}."""

    chart: Chart
    a: E.Expr
    b: tuple
    c: tuple
    params: tuple = ()
    defaults: Mapping[str, Gauss] = field(default_factory=dict)

    def b_coef(self, s: int, j: int) -> E.Expr:
        return self.b[self.chart.flat_index(s, j)]

    def c_coef(self, s: int, nu: int, j: int, k: int) -> E.Expr:
        ch = self.chart
        return self.c[ch.flat_index(s, j)][ch.flat_index(nu, k)]

    @property
    def is_affine(self) -> bool:
        return all(E.is_zero(x) for row in self.c for x in row)

    def reassemble(self) -> E.Expr:
        v = [E.Var(n) for n in self.chart.jet_names]
        terms = [self.a]
        terms += [E.mul(bi, vi) for bi, vi in zip(self.b, v)]
        for r, row in enumerate(self.c):
            for s, crs in enumerate(row):
                if not E.is_zero(crs):
                    terms.append(E.mul(crs, v[r], v[s]))
        return E.add(*terms)

    def to_general(self) -> GeneralLagrangian:
        return GeneralLagrangian(self.chart, self.reassemble(), self.params, self.defaults)


@dataclass(frozen=True)
class DeDonderData:
    momenta: tuple  # flat order
    hamiltonian: E.Expr


@dataclass(frozen=True)
class RegularityReport:
    det: complex
    rank: int
    regular: bool


def as_general(L) -> GeneralLagrangian:
    if isinstance(L, GeneralLagrangian):
        return L
    if isinstance(L, QuadraticLagrangian):
        return L.to_general()
    raise TypeError(f"expected a Lagrangian, got {type(L).__name__}")


def _jets(chart: Chart) -> tuple[str, ...]:
    return chart.jet_names


def extract_quadratic(L) -> QuadraticLagrangian:
    if isinstance(L, QuadraticLagrangian):
        return L
    ch, e = L.chart, L.expr
    jets = _jets(ch)
    zero_jets = {n: E.ZERO for n in jets}
    grads = [E.differentiate(e, n) for n in jets]
    a = E.substitute(e, zero_jets)
    b = tuple(E.substitute(g, zero_jets) for g in grads)
    half = E.Const(Gauss(1, 0) / 2)
    c = tuple(
        tuple(E.mul(half, E.differentiate(g, n)) for n in jets) for g in grads
    )
    jet_set = set(jets)
    for row in c:
        for x in row:
            if x.names & jet_set:
                raise NotQuadraticInVelocities("second velocity derivatives depend on the velocities")
    q = QuadraticLagrangian(ch, a, b, c, L.params, L.defaults)
    if not equals(q.reassemble(), e):
        raise NotQuadraticInVelocities("Lagrangian is not a quadratic polynomial in the velocities")
    return q


def velocity_hessian(L) -> Matrix:
    L = as_general(L)
    jets = _jets(L.chart)
    grads = [E.differentiate(L.expr, n) for n in jets]
    return [[E.differentiate(g, n) for n in jets] for g in grads]


def evaluate_matrix(M: Matrix, env: Mapping[str, complex]) -> np.ndarray:
    return np.array([[complex(E.evaluate(x, env)) for x in row] for row in M], dtype=complex)


def standard_regularity_report(L, pt: JetPoint, overrides=None) -> RegularityReport:
    """Determinant and rank of the velocity Hessian at ``pt``."""
    L = as_general(L)
    env = L.bindings(overrides)
    env.update(pt.env())
    A = evaluate_matrix(velocity_hessian(L), env)
    return RegularityReport(
        det=complex(linalg.det(A)),
        rank=linalg.numeric_rank(A),
        regular=not linalg.is_singular(A),
    )


def dedonder(L) -> DeDonderData:
    L = as_general(L)
    p = tuple(E.differentiate(L.expr, n) for n in _jets(L.chart))
    v = [E.Var(n) for n in _jets(L.chart)]
    H = E.add(E.neg(L.expr), *(E.mul(pi, vi) for pi, vi in zip(p, v)))
    return DeDonderData(p, H)


def total_derivative(f: E.Expr, i: int, chart: Chart) -> E.Expr:
    """Formal total derivative along x^i on the second jet."""
    terms = [E.differentiate(f, chart.x(i))]
    for nu in range(1, chart.m + 1):
        yn = chart.y(nu)
        if yn in f.names:
            terms.append(E.mul(E.Var(chart.jet(nu, i)), E.differentiate(f, yn)))
        for j in range(1, chart.n + 1):
            yj = chart.jet(nu, j)
            if yj in f.names:
                terms.append(E.mul(E.Var(chart.jet2(nu, i, j)), E.differentiate(f, yj)))
    return E.add(*terms)


def euler_lagrange_exprs(L) -> list[E.Expr]:
    L = as_general(L)
    ch = L.chart
    out = []
    for s in range(1, ch.m + 1):
        terms = [E.differentiate(L.expr, ch.y(s))]
        for i in range(1, ch.n + 1):
            dL = E.differentiate(L.expr, ch.jet(s, i))
            terms.append(E.neg(total_derivative(dL, i, ch)))
        out.append(E.add(*terms))
    return out


def section_bindings(chart: Chart, fields: Sequence[E.Expr], order: int = 2) -> dict[str, E.Expr]:
    """Bindings replacing y, y_i (and y_ij) by a field section and its x-derivatives."""
    if len(fields) != chart.m:
        raise ValueError(f"section needs {chart.m} field expressions")
    out: dict[str, E.Expr] = {}
    for s, f in enumerate(fields, start=1):
        f = E.as_expr(f)
        out[chart.y(s)] = f
        if order >= 1:
            for i in range(1, chart.n + 1):
                d = E.differentiate(f, chart.x(i))
                out[chart.jet(s, i)] = d
                if order >= 2:
                    for j in range(i, chart.n + 1):
                        out[chart.jet2(s, i, j)] = E.differentiate(d, chart.x(j))
    return out


def el_residual_on_section(L, section: Sequence[E.Expr]) -> list[E.Expr]:
    L = as_general(L)
    b = section_bindings(L.chart, section, order=2)
    return [E.substitute(e, b) for e in euler_lagrange_exprs(L)]
