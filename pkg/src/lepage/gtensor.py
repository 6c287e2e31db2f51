"""The antisymmetric 2-contact coefficients g^{ij}_{s nu}(x, y).

Only components with ``s < nu`` and ``i < j`` are stored; every other
component is derived from them, so the symmetries
``g^{ij}_{s nu} = -g^{ij}_{nu s} = -g^{ji}_{s nu} = g^{ji}_{nu s}`` hold by
construction.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Mapping

from . import expr as E
from .chart import Chart
from .errors import DimensionTooSmall, IndexOutOfRange, NotQuadraticInVelocities
from .gaussian import Gauss
from .lagrangian import GeneralLagrangian, QuadraticLagrangian, as_general, velocity_hessian
from .poly import equals


@dataclass(frozen=True)
class GTensor:
    chart: Chart
    components: Mapping[tuple, E.Expr] = field(default_factory=dict)
    params: tuple = ()
    defaults: Mapping[str, Gauss] = field(default_factory=dict)

    def __post_init__(self):
        ch = self.chart
        clean = {}
        allowed = set(ch.x_names + ch.y_names) | set(self.params)
        for key, val in self.components.items():
            s, nu, i, j = key
            if not (1 <= s < nu <= ch.m and 1 <= i < j <= ch.n):
                raise IndexOutOfRange(f"stored component {key} must satisfy s < nu <= m, i < j <= n")
            val = E.as_expr(val)
            stray = val.names - allowed
            if stray:
                raise ValueError(f"g component {key} depends on {sorted(stray)}; only (x, y, params) allowed")
            if not E.is_zero(val):
                clean[(s, nu, i, j)] = val
        object.__setattr__(self, "components", clean)
        object.__setattr__(self, "params", tuple(self.params))
        object.__setattr__(self, "defaults", {k: Gauss.coerce(v) for k, v in self.defaults.items()})

    @property
    def free_count(self) -> int:
        m, n = self.chart.m, self.chart.n
        return m * (m - 1) // 2 * (n * (n - 1) // 2)

    @staticmethod
    def slots(chart: Chart) -> list[tuple]:
        """Storage keys (s, nu, i, j) in a fixed order."""
        return [
            (s, nu, i, j)
            for s, nu in combinations(range(1, chart.m + 1), 2)
            for i, j in combinations(range(1, chart.n + 1), 2)
        ]

    def component(self, s: int, nu: int, i: int, j: int) -> E.Expr:
        ch = self.chart
        for a in (s, nu):
            ch._check_fibre(a)
        for a in (i, j):
            ch._check_base(a)
        if s == nu or i == j:
            return E.ZERO
        sign = 1
        if s > nu:
            s, nu, sign = nu, s, -sign
        if i > j:
            i, j, sign = j, i, -sign
        val = self.components.get((s, nu, i, j), E.ZERO)
        return val if sign == 1 else E.neg(val)

    def matrix(self) -> list[list[E.Expr]]:
        """``g^{ij}_{s nu}`` at row flat(s, i), column flat(nu, j)."""
        P = self.chart.pairs
        return [[self.component(s, nu, i, j) for (nu, j) in P] for (s, i) in P]

    def is_constant(self) -> bool:
        return all(not (v.names - set(self.params)) for v in self.components.values())

    def bindings(self, overrides=None) -> dict[str, complex]:
        env = {k: complex(v) for k, v in self.defaults.items()}
        env.update(overrides or {})
        return env


def component(g: GTensor, s: int, nu: int, i: int, j: int) -> E.Expr:
    return g.component(s, nu, i, j)


def zero(chart: Chart) -> GTensor:
    return GTensor(chart, {})


def canonical_from_quadratic(L) -> GTensor:
    """``g^{ab}_{s nu} = d2L/dy^s_a dy^nu_b - d2L/dy^s_b dy^nu_a``."""
    Lg = as_general(L)
    ch = Lg.chart
    H = velocity_hessian(Lg)
    jets = set(ch.jet_names)
    comps = {}
    for s, nu, a, b in GTensor.slots(ch):
        val = E.sub(H[ch.flat_index(s, a)][ch.flat_index(nu, b)], H[ch.flat_index(s, b)][ch.flat_index(nu, a)])
        if val.names & jets:
            raise NotQuadraticInVelocities("canonical g needs a Hessian free of velocities")
        comps[(s, nu, a, b)] = val
    return GTensor(ch, comps, Lg.params, Lg.defaults)


def random_constant(chart: Chart, seed: int, amplitude: float = 1) -> GTensor:
    """Constant g with free components drawn uniformly from the nonzero
    multiples k/16, |k| <= 16 * amplitude."""
    if chart.m < 2 or chart.n < 2:
        raise DimensionTooSmall(f"no nonzero antisymmetric g exists for n={chart.n}, m={chart.m}")
    kmax = max(1, int(16 * amplitude))
    choices = [k for k in range(-kmax, kmax + 1) if k != 0]
    rng = random.Random(seed)
    comps = {key: E.Const(Fraction(rng.choice(choices), 16)) for key in GTensor.slots(chart)}
    return GTensor(chart, comps)


def satellite(g: GTensor) -> E.Expr:
    """``l = 2 g^{ij}_{s nu} y^s_i y^nu_j`` summed over all indices."""
    ch = g.chart
    terms = []
    for s, i in ch.pairs:
        for nu, j in ch.pairs:
            gc = g.component(s, nu, i, j)
            if not E.is_zero(gc):
                terms.append(E.mul(2, gc, E.Var(ch.jet(s, i)), E.Var(ch.jet(nu, j))))
    return E.add(*terms)


def dedonderize(L, g: GTensor) -> GeneralLagrangian:
    Lg = as_general(L)
    params = tuple(dict.fromkeys(Lg.params + g.params))
    defaults = {**g.defaults, **Lg.defaults}
    return GeneralLagrangian(Lg.chart, E.sub(Lg.expr, satellite(g)), params, defaults)


@dataclass(frozen=True)
class Violation:
    condition: str  # "C1" or "C2"
    indices: tuple
    residual: E.Expr


@dataclass(frozen=True)
class ClosednessReport:
    closed: bool
    violations: tuple

    def __bool__(self):
        return self.closed


def closedness_conditions(g: GTensor) -> list[Violation]:
    """Every coefficient of d(eta), zero or not.

    C1, indices (k, s, nu, i, j) with k < s < nu, i < j: coefficient of
    dy^k ^ dy^s ^ dy^nu ^ omega_ij, equal to
    4 (dg^{ij}_{s nu}/dy^k + dg^{ij}_{nu k}/dy^s + dg^{ij}_{k s}/dy^nu).

    C2, indices (s, nu, i) with s < nu: coefficient of dy^s ^ dy^nu ^ omega_i,
    equal to 4 sum_j dg^{ij}_{s nu}/dx^j.
    """
    ch = g.chart
    out = []
    for i, j in combinations(range(1, ch.n + 1), 2):
        for k, s, nu in combinations(range(1, ch.m + 1), 3):
            cyc = E.add(
                E.differentiate(g.component(s, nu, i, j), ch.y(k)),
                E.differentiate(g.component(nu, k, i, j), ch.y(s)),
                E.differentiate(g.component(k, s, i, j), ch.y(nu)),
            )
            out.append(Violation("C1", (k, s, nu, i, j), E.mul(4, cyc)))
    for s, nu in combinations(range(1, ch.m + 1), 2):
        for i in range(1, ch.n + 1):
            div = E.add(*(E.differentiate(g.component(s, nu, i, j), ch.x(j)) for j in range(1, ch.n + 1)))
            out.append(Violation("C2", (s, nu, i), E.mul(4, div)))
    return out


def closedness_check(g: GTensor) -> ClosednessReport:
    bad = tuple(v for v in closedness_conditions(g) if not equals(v.residual, E.ZERO))
    return ClosednessReport(not bad, bad)
