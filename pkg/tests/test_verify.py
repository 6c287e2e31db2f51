import math

import numpy as np
import pytest

from lepage import expr as E
from lepage.chart import Chart
from lepage.errors import GridTooSmall, NotRegular
from lepage.gtensor import GTensor
from lepage.hamilton import p2_system
from lepage.lagrangian import el_residual_on_section
from lepage.legendre import LepageanSystem
from lepage.poly import equals
from lepage.presets import load_preset
from lepage.verify import GridSection, equivalence_suite, grid_residual

from conftest import P

C22 = Chart(2, 2)


@pytest.fixture(scope="module")
def maxwell2():
    sys = load_preset("maxwell2").system
    return sys, p2_system(sys)


def _fields(*texts):
    return [P(t, C22) for t in texts]


def test_suite_passes_on_solutions(maxwell2):
    sys, p2 = maxwell2
    rep = equivalence_suite(sys, [_fields("x2", "2*x1"), _fields("sin(x1)", "cos(x2)")], p2=p2)
    assert rep.passed
    assert rep.closed and rep.same_euler_lagrange
    assert all(s.el_residual <= 1e-12 and s.p2_residual <= 1e-12 for s in rep.solutions)


def test_suite_reports_non_solution(maxwell2):
    sys, p2 = maxwell2
    rep = equivalence_suite(sys, [_fields("x2*x2", "0")], p2=p2)
    assert not rep.passed
    (s,) = rep.solutions
    assert s.el_residual == pytest.approx(2.0)
    assert s.p2_residual > 1e-3


def test_suite_is_deterministic(maxwell2):
    sys, p2 = maxwell2
    sols = [_fields("x2^2 + x1", "x1*x2")]
    a = equivalence_suite(sys, sols, p2=p2, seed=3)
    b = equivalence_suite(sys, sols, p2=p2, seed=3)
    assert (a.solutions[0].el_residual, a.solutions[0].p2_residual) == (
        b.solutions[0].el_residual, b.solutions[0].p2_residual)


def test_suite_dirac2_constant_fields():
    pre = load_preset("dirac2")
    rep = equivalence_suite(pre.system, [_fields("1", "2"), _fields("0", "-3/2")],
                            overrides={"gamma1": 1, "gamma2": 1, "m": 0, "u": 1})
    assert rep.passed


def test_suite_rejects_singular_system():
    pre = load_preset("dirac2")
    with pytest.raises(NotRegular):
        equivalence_suite(pre.system, [_fields("1", "2")], overrides={"u": 0})


# -- grid ------------------------------------------------------------------------

@pytest.mark.parametrize("fields", [("x2", "2*x1"), ("3*x2 + 1", "-1/2*x1")])
def test_grid_linear_solutions_are_exact(maxwell2, fields):
    _, p2 = maxwell2
    rep = grid_residual(p2, GridSection.from_fields(C22, _fields(*fields), 33))
    assert rep.sup_norm <= 1e-12


def test_grid_non_solution_stays_away_from_zero(maxwell2):
    _, p2 = maxwell2
    rep = grid_residual(p2, GridSection.from_fields(C22, _fields("x2^2", "0"), 17))
    assert rep.sup_norm > 1.0
    assert rep.sup_norm_refined > 1.0


def test_grid_order_two_on_a_coupled_solution(maxwell2):
    # exp(x1) sin(x2) and -exp(x1) cos(x2): y1_2 + y2_1 = 0, so both EL equations hold
    sys, p2 = maxwell2
    fields = _fields("exp(x1)*sin(x2)", "-exp(x1)*cos(x2)")
    assert all(equals(r, E.ZERO).equal for r in el_residual_on_section(sys.lagrangian, fields))
    rep = grid_residual(p2, GridSection.from_fields(C22, fields, 33))
    assert rep.sup_norm <= 1e-2
    assert 1.7 <= rep.order_estimate <= 2.3
    assert 4 * 0.7 <= rep.sup_norm / rep.sup_norm_refined <= 4 * 1.3


def test_grid_separable_solution_is_exact_on_the_grid(maxwell2):
    # each residual reduces to a difference of a function of the other variable
    _, p2 = maxwell2
    rep = grid_residual(p2, GridSection.from_fields(C22, _fields("sin(x1)", "cos(x2)"), 33))
    assert rep.sup_norm <= 1e-12
    assert math.isnan(rep.order_estimate)


def test_grid_too_small():
    with pytest.raises(GridTooSmall):
        GridSection.from_fields(C22, _fields("x1", "x2"), 4)
    with pytest.raises(GridTooSmall):
        GridSection(C22, np.zeros((2, 4, 9)))


def test_grid_requires_reduced_system():
    pre = load_preset("dirac2")
    g = GTensor(C22, {(1, 2, 1, 2): P("(1 + x1)/4", C22)})
    p2 = p2_system(LepageanSystem(pre.system.lagrangian, g))
    gs = GridSection.from_fields(C22, _fields("x1", "x2"), 9)
    with pytest.raises(ValueError):
        grid_residual(p2, gs)


def test_grid_without_source_has_no_order(maxwell2):
    _, p2 = maxwell2
    gs = GridSection.from_fields(C22, _fields("x2", "x1"), 9)
    raw = GridSection(C22, gs.samples)
    rep = grid_residual(p2, raw)
    assert rep.order_estimate is None
    assert rep.sup_norm <= 1e-12
