"""Equivalence suites and a finite-difference grid checker."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from . import expr as E
from .chart import Chart
from .errors import GridTooSmall, NotRegular
from .gtensor import closedness_check, dedonderize
from .hamilton import P2System, p2_system, prolong_section, residuals_on_section
from .lagrangian import el_residual_on_section, euler_lagrange_exprs, evaluate_matrix
from .legendre import LepageanSystem, dedonder_identities, legendre_map, regularity_matrix
from .linalg import is_singular
from .poly import equals

TOLERANCE = 1e-10


def probe_points(chart: Chart, seed: int, count: int) -> list[dict[str, float]]:
    """Seeded points of the unit box in the base coordinates."""
    rng = np.random.default_rng(seed)
    return [dict(zip(chart.x_names, row)) for row in rng.uniform(0.0, 1.0, (count, chart.n))]


def _sup(exprs: Sequence[E.Expr], points, env) -> float:
    worst = 0.0
    fs = [E.compile_expr(e) for e in exprs]
    for pt in points:
        local = {**env, **pt}
        for f in fs:
            worst = max(worst, abs(complex(f(local))))
    return worst


@dataclass
class SolutionReport:
    fields: tuple
    el_residual: float
    p2_residual: float
    el_exprs: list = field(default_factory=list, repr=False)

    @property
    def passed(self) -> bool:
        return self.el_residual <= TOLERANCE and self.p2_residual <= TOLERANCE


@dataclass
class EquivalenceReport:
    solutions: list
    identities: dict
    closed: bool
    same_euler_lagrange: bool | None  # only assessed for closed g

    @property
    def passed(self) -> bool:
        return (
            all(s.passed for s in self.solutions)
            and all(self.identities.values())
            and self.same_euler_lagrange is not False
        )


def equivalence_suite(sys: LepageanSystem, solutions: Sequence[Sequence[E.Expr]], overrides=None,
                      seed: int = 42, probes: int = 50, p2: P2System | None = None) -> EquivalenceReport:
    """Evaluate Euler-Lagrange and p2 residuals of each solution at seeded
    probes, together with the dedonderization identities and, for closed g,
    the equality of the Euler-Lagrange expressions of L and of L - l."""
    ch = sys.chart
    env = sys.bindings(overrides)
    points = probe_points(ch, seed, probes)
    K = regularity_matrix(sys)
    rng = np.random.default_rng(seed + 1)
    for pt in points:
        local = {**env, **pt}
        local.update(zip(ch.y_names, rng.uniform(-1, 1, ch.m)))
        local.update(zip(ch.jet_names, rng.uniform(-1, 1, ch.size)))
        if is_singular(evaluate_matrix(K, local)):
            raise NotRegular("regularity matrix is singular at a probe point")

    lmap = legendre_map(sys)
    p2 = p2 or p2_system(sys, lmap=lmap)
    reports = []
    for fields in solutions:
        fields = tuple(E.as_expr(f) for f in fields)
        el = el_residual_on_section(sys.lagrangian, fields)
        res = residuals_on_section(p2, prolong_section(sys, fields, lmap), simplified=False)
        reports.append(SolutionReport(
            tuple(E.to_text(f) for f in fields), _sup(el, points, env), _sup(res, points, env), el
        ))

    closed = closedness_check(sys.g).closed
    same = None
    if closed:
        Lbar = dedonderize(sys.lagrangian, sys.g)
        same = all(
            equals(a, b) for a, b in zip(euler_lagrange_exprs(sys.lagrangian), euler_lagrange_exprs(Lbar))
        )
    return EquivalenceReport(reports, dedonder_identities(sys, lmap), closed, same)


# -- grid checks ----------------------------------------------------------------


@dataclass(frozen=True)
class GridSection:
    """Field samples on a uniform grid of the unit square (n = 2 only).

    ``samples`` has shape ``(m, N1, N2)``.  When ``source`` holds the field
    expressions the grid can be refined for an order estimate.
    """

    chart: Chart
    samples: np.ndarray
    source: tuple | None = None
    env: Mapping[str, complex] = field(default_factory=dict)

    def __post_init__(self):
        if self.chart.n != 2:
            raise ValueError("grid sections are two-dimensional")
        s = np.asarray(self.samples, dtype=complex)
        if s.ndim != 3 or s.shape[0] != self.chart.m:
            raise ValueError(f"samples must have shape (m, N1, N2) with m={self.chart.m}")
        if min(s.shape[1:]) < 5:
            raise GridTooSmall(f"grid {s.shape[1]}x{s.shape[2]} is below the 5x5 minimum")
        object.__setattr__(self, "samples", s)

    @property
    def shape(self) -> tuple[int, int]:
        return self.samples.shape[1], self.samples.shape[2]

    @property
    def h(self) -> tuple[float, float]:
        n1, n2 = self.shape
        return 1.0 / (n1 - 1), 1.0 / (n2 - 1)

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        n1, n2 = self.shape
        return np.linspace(0.0, 1.0, n1), np.linspace(0.0, 1.0, n2)

    @classmethod
    def from_fields(cls, chart: Chart, fields: Sequence[E.Expr], N: int | tuple = 33,
                    env: Mapping[str, complex] | None = None) -> "GridSection":
        n1, n2 = (N, N) if isinstance(N, int) else N
        if min(n1, n2) < 5:
            raise GridTooSmall(f"grid {n1}x{n2} is below the 5x5 minimum")
        env = dict(env or {})
        X1, X2 = np.meshgrid(np.linspace(0.0, 1.0, n1), np.linspace(0.0, 1.0, n2), indexing="ij")
        local = {**env, chart.x(1): X1, chart.x(2): X2}
        fields = tuple(E.as_expr(f) for f in fields)
        samples = np.stack([np.broadcast_to(E.evaluate(f, local), X1.shape) for f in fields]).astype(complex)
        return cls(chart, samples, fields, env)

    def refined(self) -> "GridSection":
        if self.source is None:
            raise ValueError("refinement needs the source expressions")
        n1, n2 = self.shape
        return GridSection.from_fields(self.chart, self.source, (2 * n1 - 1, 2 * n2 - 1), self.env)


@dataclass(frozen=True)
class GridReport:
    sup_norm: float
    order_estimate: float | None
    sup_norm_refined: float | None = None


def _grid_sup(p2: P2System, gs: GridSection, env: Mapping[str, complex]) -> float:
    ch = p2.chart
    h1, h2 = gs.h
    a1, a2 = gs.axes()
    X1, X2 = np.meshgrid(a1, a2, indexing="ij")
    local = {**env, ch.x(1): X1, ch.x(2): X2}
    spacing = (h1, h2)
    for s in range(1, ch.m + 1):
        ys = gs.samples[s - 1]
        local[ch.y(s)] = ys
        for i in (1, 2):
            local[ch.jet(s, i)] = np.gradient(ys, spacing[i - 1], axis=i - 1, edge_order=2)
    for (s, i), pe in zip(ch.pairs, p2.lmap.p):
        pv = np.broadcast_to(E.evaluate(pe, local), X1.shape).astype(complex)
        local[ch.mom(s, i)] = pv
        for k in (1, 2):
            local[ch.mom_dx(s, i, k)] = np.gradient(pv, spacing[k - 1], axis=k - 1, edge_order=2)
    # two layers are skipped: the first interior ring differentiates momenta
    # built from one-sided edge jets, which costs an order of accuracy
    worst = 0.0
    for t in p2.templates:
        r = np.broadcast_to(E.evaluate(t, local), X1.shape)
        worst = max(worst, float(np.max(np.abs(r[2:-2, 2:-2]))))
    return worst


def grid_residual(p2: P2System, gs: GridSection, overrides=None, refine: bool = True) -> GridReport:
    """Sup norm of the reduced p2 residuals on interior nodes, and the observed
    order ``log2(sup(h) / sup(h/2))`` from one refinement."""
    if not p2.reduced:
        raise ValueError("grid residuals are defined for the reduced system")
    if p2.chart.n != 2:
        raise ValueError("grid residuals are two-dimensional")
    env = {**p2.sys.bindings(overrides), **gs.env}
    coarse = _grid_sup(p2, gs, env)
    if not refine or gs.source is None:
        return GridReport(coarse, None)
    fine = _grid_sup(p2, gs.refined(), env)
    if fine == 0.0 or coarse == 0.0:
        order = math.nan
    else:
        order = math.log2(coarse / fine)
    return GridReport(coarse, order, fine)
