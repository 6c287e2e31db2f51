"""Brute-force exterior calculus on Y = R^n x R^m, independent of the
closedness conditions in ``lepage.gtensor``.

A form is a dict from strictly increasing index tuples to coefficient
expressions.  Coordinate index k < n is x^{k+1}; index n + s - 1 is y^s.
"""

from __future__ import annotations

from itertools import combinations

from lepage import expr as E
from lepage.chart import Chart
from lepage.gtensor import GTensor


def _sort_sign(idx: tuple[int, ...]) -> tuple[int, tuple[int, ...]]:
    if len(set(idx)) < len(idx):
        return 0, ()
    arr, sign = list(idx), 1
    for a in range(len(arr)):
        for b in range(len(arr) - 1 - a):
            if arr[b] > arr[b + 1]:
                arr[b], arr[b + 1] = arr[b + 1], arr[b]
                sign = -sign
    return sign, tuple(arr)


def add_term(form: dict, idx: tuple[int, ...], coef: E.Expr) -> None:
    sign, key = _sort_sign(idx)
    if sign == 0 or E.is_zero(coef):
        return
    c = coef if sign == 1 else E.neg(coef)
    form[key] = E.add(form[key], c) if key in form else c


def wedge(a: dict, b: dict) -> dict:
    out: dict = {}
    for ia, ca in a.items():
        for ib, cb in b.items():
            add_term(out, ia + ib, E.mul(ca, cb))
    return out


def interior(k: int, form: dict) -> dict:
    out: dict = {}
    for idx, c in form.items():
        if k in idx:
            p = idx.index(k)
            add_term(out, idx[:p] + idx[p + 1:], c if p % 2 == 0 else E.neg(c))
    return out


def d(form: dict, names: list[str]) -> dict:
    out: dict = {}
    for idx, c in form.items():
        for k, name in enumerate(names):
            dc = E.differentiate(c, name)
            if not E.is_zero(dc):
                add_term(out, (k,) + idx, dc)
    return out


def omega0(n: int) -> dict:
    return {tuple(range(n)): E.ONE}


def omega_ij(n: int, i: int, j: int) -> dict:
    """``i_{d/dx^j} i_{d/dx^i} omega_0`` with 1-based i, j."""
    return interior(j - 1, interior(i - 1, omega0(n)))


def omega_i(n: int, i: int) -> dict:
    return interior(i - 1, omega0(n))


def dy(chart: Chart, s: int) -> dict:
    return {(chart.n + s - 1,): E.ONE}


def eta(g: GTensor) -> dict:
    """``g^{ij}_{s v} dy^s ^ dy^v ^ omega_ij`` summed over all indices."""
    ch = g.chart
    out: dict = {}
    for s in range(1, ch.m + 1):
        for v in range(1, ch.m + 1):
            for i in range(1, ch.n + 1):
                for j in range(1, ch.n + 1):
                    c = g.component(s, v, i, j)
                    if E.is_zero(c):
                        continue
                    piece = wedge(wedge(dy(ch, s), dy(ch, v)), omega_ij(ch.n, i, j))
                    for idx, pc in piece.items():
                        add_term(out, idx, E.mul(c, pc))
    return out


def d_eta(g: GTensor) -> dict:
    ch = g.chart
    return d(eta(g), list(ch.x_names + ch.y_names))


def expected_from_conditions(g: GTensor, violations) -> dict:
    """Re-assemble d(eta) from condition residuals: C1 (k, s, v, i, j) is the
    coefficient of dy^k ^ dy^s ^ dy^v ^ omega_ij and C2 (s, v, i) that of
    dy^s ^ dy^v ^ omega_i."""
    ch = g.chart
    out: dict = {}
    for viol in violations:
        if viol.condition == "C1":
            k, s, v, i, j = viol.indices
            basis = wedge(wedge(wedge(dy(ch, k), dy(ch, s)), dy(ch, v)), omega_ij(ch.n, i, j))
        else:
            s, v, i = viol.indices
            basis = wedge(wedge(dy(ch, s), dy(ch, v)), omega_i(ch.n, i))
        for idx, c in basis.items():
            add_term(out, idx, E.mul(c, viol.residual))
    return out


def all_basis_keys(chart: Chart, degree: int) -> list[tuple[int, ...]]:
    return list(combinations(range(chart.n + chart.m), degree))
