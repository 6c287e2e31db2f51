import numpy as np
import pytest

from lepage import expr as E
from lepage import linalg
from lepage.chart import Chart
from lepage.errors import NotAntisymmetric, OddSize, SingularMatrix, SizeLimitExceeded
from lepage.poly import canonical

from conftest import P, assert_equal

C = Chart(2, 2)
MAXWELL2_K = [[0, 0, 0, 4], [0, 1, -3, 0], [0, -3, 1, 0], [4, 0, 0, 0]]
U6 = ["u1", "u2", "u3", "u4", "u5", "u6"]


def _sym(rows, params=()):
    return [[P(str(x), C, params) for x in row] for row in rows]


def dirac2_K():
    return _sym([[0, 0, 0, "-u"], [0, 0, "u", 0], [0, "u", 0, 0], ["-u", 0, 0, 0]], ["u"])


def pfaff_M():
    return _sym(
        [[0, "u1", "u2", "u3"], ["-u1", 0, "u4", "u5"], ["-u2", "-u4", 0, "u6"], ["-u3", "-u5", "-u6", 0]],
        U6,
    )


def test_det_maxwell2_numeric_and_exact():
    assert linalg.det(np.array(MAXWELL2_K)) == pytest.approx(128)
    assert_equal(linalg.det(_sym(MAXWELL2_K)), E.Const(128))


def test_det_dirac2_symbolic():
    assert_equal(linalg.det(dirac2_K()), P("u^4", C, ["u"]))


def test_det_identity():
    assert linalg.det(np.eye(4)) == 1
    assert_equal(linalg.det(_sym(np.eye(4, dtype=int).tolist())), E.ONE)


def test_symbolic_det_size_limit():
    M = [[E.Param("u") if i == j else E.ZERO for j in range(9)] for i in range(9)]
    with pytest.raises(SizeLimitExceeded):
        linalg.symbolic_det(M)


def test_constant_det_beyond_limit_is_exact():
    M = [[E.Const(2) if i == j else E.ZERO for j in range(12)] for i in range(12)]
    assert_equal(linalg.symbolic_det(M), E.Const(4096))


def test_block_det_is_pfaffian_to_fourth():
    M = pfaff_M()
    Z = [[E.ZERO] * 4 for _ in range(4)]
    K = [Z[r] + [E.neg(x) for x in M[r]] for r in range(4)] + [M[r] + Z[r] for r in range(4)]
    want = P("(u1*u6 - u2*u5 + u3*u4)^4", C, U6)
    assert canonical(linalg.det(K)) == canonical(want)


def test_solve_examples():
    np.testing.assert_allclose(linalg.solve(np.diag([2, 2]), [2, 4]), [1, 2])
    with pytest.raises(SingularMatrix):
        linalg.solve(np.zeros((3, 3)), [1, 2, 3])


def test_solve_maxwell2_momenta():
    # momenta listed base-index-major, (p1_1, p2_1, p1_2, p2_2) = (16, -3, -7, 4),
    # are (16, -7, -3, 4) in flat (s, i) order
    listed = {"p1_1": 16, "p2_1": -3, "p1_2": -7, "p2_2": 4}
    rhs = [listed[C.mom(s, i)] for s, i in C.pairs]
    v = linalg.solve(np.array(MAXWELL2_K, dtype=float), rhs)
    np.testing.assert_allclose(v, [1, 2, 3, 4], atol=1e-12)


def test_solve_residual_on_random_systems():
    rng = np.random.default_rng(0)
    for _ in range(30):
        A = rng.normal(size=(6, 6)) + 6 * np.eye(6) + 1j * rng.normal(size=(6, 6))
        b = rng.normal(size=6)
        x = linalg.solve(A, b)
        assert np.linalg.norm(A @ x - b) <= 1e-10 * np.linalg.norm(b)


def test_singularity_threshold_is_scale_aware():
    tiny = np.diag([1e-8, 1e-8])
    assert not linalg.is_singular(tiny)
    assert linalg.is_singular(np.array([[1, 2], [2, 4.0 + 1e-12]]))


def test_numeric_rank():
    assert linalg.numeric_rank(np.array([[0, 0, 0, 0], [0, 1, 1, 0], [0, 1, 1, 0], [0, 0, 0, 0]])) == 1


def test_symbolic_inverse_dirac2():
    Kinv = linalg.symbolic_inverse(dirac2_K())
    prod = linalg.matmul(dirac2_K(), Kinv)
    for r in range(4):
        for c in range(4):
            assert_equal(prod[r][c], E.ONE if r == c else E.ZERO)


def test_symbolic_inverse_singular():
    with pytest.raises(SingularMatrix):
        linalg.symbolic_inverse(_sym([["u", "u"], ["u", "u"]], ["u"]))


# -- pfaffian ------------------------------------------------------------------

def test_pfaffian_2x2():
    assert_equal(linalg.pfaffian(_sym([[0, "a"], ["-a", 0]], ["a"])), E.Param("a"))


def test_pfaffian_5_14_block():
    assert_equal(linalg.pfaffian(pfaff_M()), P("u1*u6 - u2*u5 + u3*u4", C, U6))


def test_pfaffian_zero():
    assert linalg.pfaffian(np.zeros((4, 4))) == 0


def test_pfaffian_squared_is_det_symbolic():
    M = pfaff_M()
    pf = linalg.pfaffian(M)
    assert canonical(E.mul(pf, pf)) == canonical(linalg.det(M))


def test_pfaffian_squared_is_det_numeric():
    rng = np.random.default_rng(5)
    for size in (2, 4, 6, 8):
        A = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
        A = A - A.T
        pf = linalg.pfaffian(A)
        d = np.linalg.det(A)
        assert abs(pf * pf - d) <= 1e-10 * max(1.0, abs(d))


def test_pfaffian_errors():
    with pytest.raises(OddSize):
        linalg.pfaffian(np.zeros((3, 3)))
    with pytest.raises(NotAntisymmetric):
        linalg.pfaffian(np.array([[0, 1], [1, 0]]))
    with pytest.raises(NotAntisymmetric):
        linalg.pfaffian(_sym([[0, "a"], ["a", 0]], ["a"]))
