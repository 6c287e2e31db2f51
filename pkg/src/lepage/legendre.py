"""Regularity matrix, generalized momenta and Hamiltonian, Legendre inversion.

A :class:`LepageanSystem` pairs a first-order Lagrangian with a 2-contact
tensor ``g``.  Everything here is derived from

    K[(s,i),(nu,j)] = d2L/dy^s_i dy^nu_j - 4 g^{ij}_{s nu}
    p^i_s           = dL/dy^s_i - 4 g^{ij}_{s nu} y^nu_j
    H               = -L + (dL/dy^s_i) y^s_i - 2 g^{ij}_{s nu} y^s_i y^nu_j
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

import numpy as np

from . import expr as E
from . import linalg
from .chart import Chart, JetPoint
from .errors import (
    DimensionTooSmall,
    NewtonDivergence,
    NotPolynomial,
    NotQuadraticInVelocities,
    SearchFailed,
    SingularMatrix,
    SizeLimitExceeded,
)
from .gtensor import GTensor, closedness_check, dedonderize, random_constant, satellite
from .lagrangian import (
    GeneralLagrangian,
    QuadraticLagrangian,
    as_general,
    dedonder,
    evaluate_matrix,
    extract_quadratic,
    velocity_hessian,
)
from .poly import equals, simplify


@dataclass(frozen=True)
class LepageanSystem:
    lagrangian: GeneralLagrangian
    g: GTensor

    def __post_init__(self):
        L = as_general(self.lagrangian)
        object.__setattr__(self, "lagrangian", L)
        if L.chart != self.g.chart:
            raise ValueError(f"Lagrangian chart {L.chart} differs from g chart {self.g.chart}")

    @property
    def chart(self) -> Chart:
        return self.lagrangian.chart

    @property
    def params(self) -> tuple:
        return tuple(dict.fromkeys(self.lagrangian.params + self.g.params))

    @property
    def defaults(self) -> dict:
        return {**self.g.defaults, **self.lagrangian.defaults}

    def bindings(self, overrides=None) -> dict[str, complex]:
        env = {k: complex(v) for k, v in self.defaults.items()}
        env.update(overrides or {})
        return env

    @cached_property
    def quadratic(self) -> QuadraticLagrangian | None:
        try:
            return extract_quadratic(self.lagrangian)
        except NotQuadraticInVelocities:
            return None

    def with_g(self, g: GTensor) -> "LepageanSystem":
        return LepageanSystem(self.lagrangian, g)


def regularity_matrix(sys: LepageanSystem) -> list[list[E.Expr]]:
    Hs = velocity_hessian(sys.lagrangian)
    G = sys.g.matrix()
    return [
        [simplify(E.sub(h, E.mul(4, gg))) for h, gg in zip(hrow, grow)]
        for hrow, grow in zip(Hs, G)
    ]


def krupka_matrix(L) -> list[list[E.Expr]]:
    """``d2L/dy^s_b dy^nu_a + d2L/dy^s_a dy^nu_b`` at row (s, a), column (nu, b)."""
    L = as_general(L)
    ch = L.chart
    Hs = velocity_hessian(L)
    out = []
    for s, a in ch.pairs:
        row = []
        for nu, b in ch.pairs:
            row.append(simplify(E.add(Hs[ch.flat_index(s, b)][ch.flat_index(nu, a)],
                                      Hs[ch.flat_index(s, a)][ch.flat_index(nu, b)])))
        out.append(row)
    return out


def matrix_regular_at(M, env: Mapping[str, complex]) -> bool:
    """Numeric regularity verdict for an expression matrix at one point."""
    return not linalg.is_singular(evaluate_matrix(M, env))


def is_regular_at(sys: LepageanSystem, pt: JetPoint | None = None, overrides=None) -> bool:
    env = sys.bindings(overrides)
    if pt is not None:
        env.update(pt.env())
    return matrix_regular_at(regularity_matrix(sys), env)


def regularize_affine(L, seed: int = 42, max_tries: int = 100) -> GTensor:
    """Constant g making ``K = -4 g`` invertible, drawn with sub-seeds
    ``seed, seed + 1, ...``."""
    q = extract_quadratic(as_general(L))
    if not q.is_affine:
        raise ValueError("regularize_affine needs a Lagrangian affine in the velocities")
    ch = q.chart
    if ch.m < 2 or ch.n < 2:
        raise DimensionTooSmall(f"affine Lagrangians need m >= 2 and n >= 2 to regularize (n={ch.n}, m={ch.m})")
    for t in range(max_tries):
        g = random_constant(ch, seed + t)
        K = [[E.mul(-4, x) for x in row] for row in g.matrix()]
        if not E.is_zero(linalg.det(K)):
            return g
    raise SearchFailed(f"no regular constant g found in {max_tries} tries")


# -- Legendre map -------------------------------------------------------------


class SolvedHamiltonian:
    """``H(x, y, p)`` evaluated by a linear solve per call; used when an
    exact symbolic inverse of K is out of reach."""

    def __init__(self, sys: LepageanSystem):
        q = sys.quadratic
        if q is None:
            raise NotQuadraticInVelocities("a solved Hamiltonian needs a quadratic Lagrangian")
        self.chart = sys.chart
        self._a = E.compile_expr(q.a)
        self._b = [E.compile_expr(x) for x in q.b]
        self._K = [[E.compile_expr(x) for x in row] for row in regularity_matrix(sys)]

    def __call__(self, env: Mapping[str, complex]) -> complex:
        K = np.array([[f(env) for f in row] for row in self._K], dtype=complex)
        w = np.array([complex(env[n]) - f(env) for n, f in zip(self.chart.mom_names, self._b)])
        z = linalg.solve(K, w)
        return complex(-self._a(env) + 0.5 * (w @ z))


@dataclass(frozen=True)
class LegendreMap:
    chart: Chart
    p: tuple  # flat order
    H_jet: E.Expr
    K: list
    H_leg: E.Expr | None = None
    H_solved: SolvedHamiltonian | None = field(default=None, compare=False)

    def momentum(self, s: int, i: int) -> E.Expr:
        return self.p[self.chart.flat_index(s, i)]


def momenta_exprs(sys: LepageanSystem) -> tuple:
    ch = sys.chart
    L = sys.lagrangian.expr
    G = sys.g.matrix()
    v = [E.Var(n) for n in ch.jet_names]
    out = []
    for r, n in enumerate(ch.jet_names):
        corr = E.add(*(E.mul(G[r][c], v[c]) for c in range(ch.size) if not E.is_zero(G[r][c])))
        out.append(simplify(E.sub(E.differentiate(L, n), E.mul(4, corr))))
    return tuple(out)


def hamiltonian_jet(sys: LepageanSystem) -> E.Expr:
    ch = sys.chart
    L = sys.lagrangian.expr
    terms = [E.neg(L)]
    terms += [E.mul(E.differentiate(L, n), E.Var(n)) for n in ch.jet_names]
    terms.append(E.neg(satellite(sys.g)))
    return simplify(E.add(*terms))


def hamiltonian_in_legendre(sys: LepageanSystem) -> E.Expr:
    """``H = -a + 1/2 (p - b)^T K^{-1} (p - b)`` for quadratic L."""
    q = sys.quadratic
    if q is None:
        raise NotQuadraticInVelocities("Legendre-coordinate Hamiltonian needs a quadratic Lagrangian")
    K = regularity_matrix(sys)
    Kinv = linalg.symbolic_inverse(K)
    ch = sys.chart
    w = [E.sub(E.Var(n), b) for n, b in zip(ch.mom_names, q.b)]
    terms = [E.neg(q.a)]
    half = E.Const(1) / 2
    for r in range(ch.size):
        for s in range(ch.size):
            k = Kinv[r][s]
            if not E.is_zero(k):
                terms.append(E.mul(half, k, w[r], w[s]))
    return simplify(E.add(*terms))


def legendre_map(sys: LepageanSystem, symbolic: bool = True) -> LegendreMap:
    """Momenta, Hamiltonian and K.  ``H_leg`` is filled when L is quadratic
    and K can be inverted exactly; otherwise ``H_solved`` is provided."""
    K = regularity_matrix(sys)
    H_leg, H_solved = None, None
    if sys.quadratic is not None:
        H_solved = SolvedHamiltonian(sys)
        if symbolic:
            try:
                H_leg = hamiltonian_in_legendre(sys)
            except (SingularMatrix, SizeLimitExceeded, NotPolynomial):
                H_leg = None
    return LegendreMap(sys.chart, momenta_exprs(sys), hamiltonian_jet(sys), K, H_leg, H_solved)


def hamiltonian_value(lmap: LegendreMap, env: Mapping[str, complex]) -> complex:
    """Value of H in Legendre coordinates (env binds x, y, p and parameters)."""
    if lmap.H_leg is not None:
        return complex(E.evaluate(lmap.H_leg, env))
    if lmap.H_solved is not None:
        return lmap.H_solved(env)
    raise NotQuadraticInVelocities("no Legendre-coordinate Hamiltonian for this system")


def _point_env(sys: LepageanSystem, x: Sequence, y: Sequence, overrides=None) -> dict:
    ch = sys.chart
    env = sys.bindings(overrides)
    env.update(zip(ch.x_names, (complex(t) for t in x)))
    env.update(zip(ch.y_names, (complex(t) for t in y)))
    return env


def momenta_at(sys: LepageanSystem, x, y, v, overrides=None, lmap: LegendreMap | None = None) -> np.ndarray:
    lmap = lmap or legendre_map(sys, symbolic=False)
    env = _point_env(sys, x, y, overrides)
    env.update(zip(sys.chart.jet_names, (complex(t) for t in v)))
    return np.array([complex(E.evaluate(pi, env)) for pi in lmap.p])


def invert_legendre(sys: LepageanSystem, x, y, p, overrides=None, lmap: LegendreMap | None = None,
                    tol: float = 1e-12, max_iter: int = 50) -> np.ndarray:
    """Velocities ``v`` with ``p(x, y, v) = p``, in flat order."""
    ch = sys.chart
    p = np.asarray(p, dtype=complex)
    env = _point_env(sys, x, y, overrides)
    q = sys.quadratic
    if q is not None:
        K = evaluate_matrix(regularity_matrix(sys), env)
        B = np.array([complex(E.evaluate(b, env)) for b in q.b])
        return linalg.solve(K, p - B)

    lmap = lmap or legendre_map(sys, symbolic=False)
    pf = [E.compile_expr(x) for x in lmap.p]
    Kf = [[E.compile_expr(x) for x in row] for row in lmap.K]

    def at(v):
        e = dict(env)
        e.update(zip(ch.jet_names, v))
        return e

    def resid(v):
        e = at(v)
        return np.array([f(e) for f in pf], dtype=complex) - p

    v = np.zeros(ch.size, dtype=complex)
    F = resid(v)
    scale = 1.0 + np.linalg.norm(p)
    for _ in range(max_iter):
        if np.linalg.norm(F) <= tol * scale:
            return v
        e = at(v)
        J = np.array([[f(e) for f in row] for row in Kf], dtype=complex)
        step = linalg.solve(J, -F)
        lam, norm0 = 1.0, np.linalg.norm(F)
        while lam > 1e-9:
            trial = v + lam * step
            Ft = resid(trial)
            if np.linalg.norm(Ft) < norm0:
                v, F = trial, Ft
                break
            lam /= 2
        else:
            raise NewtonDivergence("damped Newton step failed to reduce the residual")
    if np.linalg.norm(F) <= tol * scale:
        return v
    raise NewtonDivergence(f"Newton did not converge in {max_iter} iterations")


# -- K times Hess_p(H) check ------------------------------------------------


@dataclass(frozen=True)
class InverseCheck:
    ok: bool
    max_error: float
    exact: bool
    hessian: object = field(default=None, compare=False)


def _mom_hessian_symbolic(H: E.Expr, chart: Chart) -> list[list[E.Expr]]:
    grads = [E.differentiate(H, n) for n in chart.mom_names]
    return [[simplify(E.differentiate(g, n)) for n in chart.mom_names] for g in grads]


def corollary1_check(sys: LepageanSystem, pt: JetPoint | None = None, method: str = "auto",
                     overrides=None, h: float | None = None, lmap: LegendreMap | None = None) -> InverseCheck:
    """Check that the p-Hessian of the Legendre-coordinate Hamiltonian inverts K.

    ``method`` is ``"symbolic"``, ``"numeric"`` or ``"auto"`` (symbolic when an
    exact Hamiltonian exists).  The numeric path uses central second differences
    with step ``h``; for quadratic L the Hamiltonian is quadratic in p, so the
    default step is 1 and the stencil is exact up to roundoff.
    """
    ch = sys.chart
    env = sys.bindings(overrides)
    if pt is not None:
        env.update(pt.env())
    else:
        env.update({n: 0.5 for n in ch.x_names + ch.y_names + ch.jet_names})
    Kn = evaluate_matrix(regularity_matrix(sys), env)
    if linalg.is_singular(Kn):
        raise SingularMatrix("regularity matrix is singular at the probe point")
    lmap = lmap or legendre_map(sys, symbolic=method != "numeric")

    if method in ("auto", "symbolic") and lmap.H_leg is not None:
        Hs = _mom_hessian_symbolic(lmap.H_leg, ch)
        prod = linalg.matmul(lmap.K, Hs)
        ident = [[E.Const(int(r == c)) for c in range(ch.size)] for r in range(ch.size)]
        verdicts = [equals(a, b) for ra, rb in zip(prod, ident) for a, b in zip(ra, rb)]
        ok = all(verdicts)
        exact = all(v.exact for v in verdicts)
        err = float(np.max(np.abs(evaluate_matrix(prod, env) - np.eye(ch.size))))
        return InverseCheck(ok, err, exact, Hs)
    if method == "symbolic":
        raise NotQuadraticInVelocities("no symbolic Legendre-coordinate Hamiltonian available")

    if h is None:
        h = 1.0 if sys.quadratic is not None else 1e-4
    v0 = np.array([env[n] for n in ch.jet_names], dtype=complex)
    x = [env[n] for n in ch.x_names]
    y = [env[n] for n in ch.y_names]
    p0 = momenta_at(sys, x, y, v0, overrides, lmap)

    if sys.quadratic is not None:
        solved = lmap.H_solved

        def H(p):
            e = dict(env)
            e.update(zip(ch.mom_names, p))
            return solved(e)
    else:
        Hj = E.compile_expr(lmap.H_jet)

        def H(p):
            v = invert_legendre(sys, x, y, p, overrides, lmap)
            e = dict(env)
            e.update(zip(ch.jet_names, v))
            return Hj(e)

    N = ch.size
    I = np.eye(N)
    Hess = np.zeros((N, N), dtype=complex)
    for r in range(N):
        for s in range(r, N):
            er, es = h * I[r], h * I[s]
            val = (H(p0 + er + es) - H(p0 + er - es) - H(p0 - er + es) + H(p0 - er - es)) / (4 * h * h)
            Hess[r, s] = Hess[s, r] = val
    err = float(np.max(np.abs(Kn @ Hess - I)))
    return InverseCheck(err <= 1e-8, err, False, Hess)


# -- dedonderization identities -----------------------------------------------


def dedonder_identities(sys: LepageanSystem, lmap: LegendreMap | None = None) -> dict[str, bool]:
    """Verdicts for the identities tying the system to its dedonderization
    ``Lbar = L - l``: momenta and Hamiltonian agree with the De Donder data of
    Lbar and with ``p(L) - p(l)``, ``H(L) - l``; the standard Hessian of Lbar is K."""
    lmap = lmap or legendre_map(sys, symbolic=False)
    ch = sys.chart
    Lbar = dedonderize(sys.lagrangian, sys.g)
    dbar = dedonder(Lbar)
    dL = dedonder(sys.lagrangian)
    l = satellite(sys.g)
    dl = dedonder(GeneralLagrangian(ch, l, sys.g.params, sys.g.defaults))
    K = lmap.K
    Hbar = velocity_hessian(Lbar)
    return {
        "H_equals_dedonder_H_of_Lbar": bool(equals(lmap.H_jet, dbar.hamiltonian)),
        "p_equals_dedonder_p_of_Lbar": all(equals(a, b) for a, b in zip(lmap.p, dbar.momenta)),
        "p_equals_p_of_L_minus_p_of_l": all(
            equals(a, E.sub(b, c)) for a, b, c in zip(lmap.p, dL.momenta, dl.momenta)
        ),
        "H_equals_H_of_L_minus_l": bool(equals(lmap.H_jet, E.sub(dL.hamiltonian, l))),
        "hessian_of_Lbar_equals_K": linalg.matrices_equal(Hbar, K),
    }


def closed(sys: LepageanSystem) -> bool:
    return closedness_check(sys.g).closed
