"""Hamilton p2-equations in Legendre coordinates and their residuals on sections.

Templates are expressions in ``x``, ``y``, the momenta ``ps_i`` and two kinds
of derivative placeholders: ``ps_i_xk`` for dp^i_s/dx^k and the jet names
``ys_i`` for dy^s/dx^i along the section.  Residuals are LHS - RHS:

    R_s   = dH/dy^s + dp^i_s/dx^i - 4 (dg^{ij}_{s nu}/dx^j) dy^nu/dx^i
            - 2 (dg^{ij}_{k nu}/dy^s + dg^{ij}_{s k}/dy^nu + dg^{ij}_{nu s}/dy^k)
                (dy^k/dx^i)(dy^nu/dx^j)
    R^i_s = dH/dp^i_s - dy^s/dx^i
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import expr as E
from .chart import Chart
from .errors import NotQuadraticInVelocities
from .gtensor import closedness_check
from .legendre import LegendreMap, LepageanSystem, legendre_map
from .poly import simplify


@dataclass(frozen=True)
class SectionPair:
    """Fields ``y^s(x)`` and momenta ``p^i_s(x)`` (flat order)."""

    chart: Chart
    y: tuple
    p: tuple
    params: tuple = ()

    def __post_init__(self):
        ch = self.chart
        y = tuple(E.as_expr(t) for t in self.y)
        p = tuple(E.as_expr(t) for t in self.p)
        if len(y) != ch.m or len(p) != ch.size:
            raise ValueError(f"section needs {ch.m} fields and {ch.size} momenta")
        allowed = set(ch.x_names) | set(self.params)
        for e in y + p:
            stray = e.names - allowed
            if stray:
                raise ValueError(f"section expressions may depend only on x and parameters, got {sorted(stray)}")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "params", tuple(self.params))


@dataclass(frozen=True)
class P2System:
    sys: LepageanSystem
    lmap: LegendreMap
    H: E.Expr
    first: tuple  # m templates
    second: tuple  # mn templates, flat order
    reduced: bool

    @property
    def chart(self) -> Chart:
        return self.sys.chart

    @property
    def templates(self) -> tuple:
        return self.first + self.second


def _g_terms(sys: LepageanSystem, s: int) -> list[E.Expr]:
    """The g-derivative contributions to R_s."""
    ch, g = sys.chart, sys.g
    rng_m, rng_n = range(1, ch.m + 1), range(1, ch.n + 1)
    out = []
    for i in rng_n:
        for j in rng_n:
            for nu in rng_m:
                d = E.differentiate(g.component(s, nu, i, j), ch.x(j))
                if not E.is_zero(d):
                    out.append(E.mul(-4, d, E.Var(ch.jet(nu, i))))
    for i in rng_n:
        for j in rng_n:
            if i == j:
                continue
            for k in rng_m:
                for nu in rng_m:
                    cyc = E.add(
                        E.differentiate(g.component(k, nu, i, j), ch.y(s)),
                        E.differentiate(g.component(s, k, i, j), ch.y(nu)),
                        E.differentiate(g.component(nu, s, i, j), ch.y(k)),
                    )
                    if not E.is_zero(cyc):
                        out.append(E.mul(-2, cyc, E.Var(ch.jet(k, i)), E.Var(ch.jet(nu, j))))
    return out


def first_family(sys: LepageanSystem, H: E.Expr, reduced: bool) -> tuple:
    ch = sys.chart
    out = []
    for s in range(1, ch.m + 1):
        terms = [E.differentiate(H, ch.y(s))]
        terms += [E.Var(ch.mom_dx(s, i, i)) for i in range(1, ch.n + 1)]
        if not reduced:
            terms += _g_terms(sys, s)
        out.append(simplify(E.add(*terms)))
    return tuple(out)


def second_family(sys: LepageanSystem, H: E.Expr) -> tuple:
    ch = sys.chart
    return tuple(
        simplify(E.sub(E.differentiate(H, ch.mom(s, i)), E.Var(ch.jet(s, i)))) for s, i in ch.pairs
    )


def p2_system(sys: LepageanSystem, reduced: bool | None = None, lmap: LegendreMap | None = None) -> P2System:
    """Residual templates.  ``reduced=None`` picks the short form exactly when
    the g-tensor passes the closedness check; ``False`` forces the full form."""
    lmap = lmap or legendre_map(sys)
    if lmap.H_leg is None:
        raise NotQuadraticInVelocities("p2 templates need a symbolic Legendre-coordinate Hamiltonian")
    if reduced is None:
        reduced = closedness_check(sys.g).closed
    H = lmap.H_leg
    return P2System(sys, lmap, H, first_family(sys, H, reduced), second_family(sys, H), reduced)


def prolong_section(sys: LepageanSystem, fields: Sequence, lmap: LegendreMap | None = None) -> SectionPair:
    """Push the holonomic prolongation of ``fields`` through the Legendre map."""
    ch = sys.chart
    lmap = lmap or legendre_map(sys, symbolic=False)
    fields = tuple(E.as_expr(f) for f in fields)
    if len(fields) != ch.m:
        raise ValueError(f"section needs {ch.m} fields")
    b = {ch.y(s): f for s, f in enumerate(fields, start=1)}
    for s, f in enumerate(fields, start=1):
        for i in range(1, ch.n + 1):
            b[ch.jet(s, i)] = E.differentiate(f, ch.x(i))
    p = tuple(simplify(E.substitute(pi, b)) for pi in lmap.p)
    return SectionPair(ch, fields, p, sys.params)


def section_bindings(chart: Chart, sec: SectionPair) -> dict[str, E.Expr]:
    b: dict[str, E.Expr] = {}
    for s, f in enumerate(sec.y, start=1):
        b[chart.y(s)] = f
        for i in range(1, chart.n + 1):
            b[chart.jet(s, i)] = E.differentiate(f, chart.x(i))
    for (s, i), pe in zip(chart.pairs, sec.p):
        b[chart.mom(s, i)] = pe
        for k in range(1, chart.n + 1):
            b[chart.mom_dx(s, i, k)] = E.differentiate(pe, chart.x(k))
    return b


def residuals_on_section(p2: P2System, sec: SectionPair, simplified: bool = True) -> list[E.Expr]:
    """The m first-family residuals followed by the mn second-family ones.
    Pass ``simplified=False`` when the result is only going to be evaluated."""
    b = section_bindings(p2.chart, sec)
    out = [E.substitute(t, b) for t in p2.templates]
    return [simplify(r) for r in out] if simplified else out


def holonomy_gap(p2: P2System, sec: SectionPair, simplified: bool = True) -> list[E.Expr]:
    """``dH/dp^i_s`` along the section minus ``dy^s/dx^i``."""
    b = section_bindings(p2.chart, sec)
    out = [E.substitute(t, b) for t in p2.second]
    return [simplify(r) for r in out] if simplified else out
