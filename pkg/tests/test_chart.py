import numpy as np
import pytest
from hypothesis import given, strategies as st

from lepage.chart import Chart, JetPoint, flat_index, unflat_index
from lepage.errors import IndexOutOfRange


@pytest.mark.parametrize(
    "s, i, n, m, r",
    [(1, 1, 2, 2, 0), (2, 1, 2, 2, 2), (4, 4, 4, 4, 15), (1, 2, 2, 2, 1)],
)
def test_flat_index(s, i, n, m, r):
    ch = Chart(n, m)
    assert flat_index(s, i, ch) == r
    assert unflat_index(r, ch) == (s, i)


@pytest.mark.parametrize("args", [(0, 1), (3, 1), (1, 0), (1, 3)])
def test_flat_index_out_of_range(args):
    with pytest.raises(IndexOutOfRange):
        Chart(2, 2).flat_index(*args)


@pytest.mark.parametrize("r", [-1, 4, 100])
def test_unflat_out_of_range(r):
    with pytest.raises(IndexOutOfRange):
        Chart(2, 2).unflat_index(r)


@given(st.integers(1, 6), st.integers(1, 6), st.data())
def test_flat_unflat_round_trip(n, m, data):
    ch = Chart(n, m)
    r = data.draw(st.integers(0, n * m - 1))
    assert ch.flat_index(*ch.unflat_index(r)) == r
    s = data.draw(st.integers(1, m))
    i = data.draw(st.integers(1, n))
    assert ch.unflat_index(ch.flat_index(s, i)) == (s, i)


def test_name_tables():
    ch = Chart(2, 2)
    assert ch.x_names == ("x1", "x2")
    assert ch.y_names == ("y1", "y2")
    assert ch.jet_names == ("y1_1", "y1_2", "y2_1", "y2_2")
    assert ch.jet2_names == ("y1_11", "y1_12", "y1_22", "y2_11", "y2_12", "y2_22")
    assert ch.jet2(1, 2, 1) == ch.jet2(1, 1, 2) == "y1_12"
    assert ch.mom(2, 1) == "p2_1"
    assert ch.size == 4


def test_names_collision_free():
    ch = Chart(3, 4)
    names = ch.x_names + ch.y_names + ch.jet_names + ch.jet2_names + ch.mom_names
    assert len(set(names)) == len(names)


@pytest.mark.parametrize("n, m", [(0, 1), (1, 0), (10, 1)])
def test_bad_dimensions(n, m):
    with pytest.raises(ValueError):
        Chart(n, m)


def test_jetpoint_value_count():
    ch = Chart(2, 3)
    pt = JetPoint.random(ch, np.random.default_rng(0))
    assert len(pt.env()) == ch.n + ch.m + ch.n * ch.m
    with pytest.raises(ValueError):
        JetPoint(ch, (0, 0), (0, 0, 0), (0,) * 5)
