"""Small dense linear algebra on numeric arrays and on expression matrices.

Numeric routines take anything ``np.asarray`` accepts.  Symbolic routines take
a list of lists of :class:`~lepage.expr.Expr` and return expressions.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import expr as E
from .errors import NotAntisymmetric, OddSize, SingularMatrix, SizeLimitExceeded
from .gaussian import Gauss
from .poly import Polynomial, canonical, cancel_monomial, equals

SINGULAR_RTOL = 1e-9
SYMBOLIC_LIMIT = 8


def _is_symbolic(M) -> bool:
    return (
        isinstance(M, (list, tuple))
        and len(M) > 0
        and isinstance(M[0], (list, tuple))
        and any(isinstance(x, E.Expr) for row in M for x in row)
    )


def _square(M):
    n = len(M)
    if any(len(row) != n for row in M):
        raise ValueError("matrix must be square")
    return n


# -- numeric ----------------------------------------------------------------


def singularity_scale(A: np.ndarray) -> float:
    """Product of row max-norms; ``|det| <= 1e-9 * scale`` counts as singular."""
    A = np.asarray(A, dtype=complex)
    return float(np.prod(np.max(np.abs(A), axis=1))) if A.size else 1.0


def is_singular(A) -> bool:
    A = np.asarray(A, dtype=complex)
    if A.size == 0:
        return False
    return abs(np.linalg.det(A)) <= SINGULAR_RTOL * singularity_scale(A)


def numeric_rank(A) -> int:
    A = np.asarray(A, dtype=complex)
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.sum(s > SINGULAR_RTOL * s[0]))


def solve(A, rhs) -> np.ndarray:
    """Solve ``A x = rhs`` with one step of residual refinement."""
    A = np.asarray(A, dtype=complex)
    b = np.asarray(rhs, dtype=complex)
    if is_singular(A):
        raise SingularMatrix("matrix is numerically singular")
    x = np.linalg.solve(A, b)
    x = x + np.linalg.solve(A, b - A @ x)
    return x


def det(M):
    """Determinant: numeric for arrays, exact for expression matrices."""
    if _is_symbolic(M):
        return symbolic_det(M)
    A = np.asarray(M, dtype=complex)
    return complex(np.linalg.det(A)) if A.size else 1 + 0j


# -- symbolic ---------------------------------------------------------------


def _params(M) -> set[str]:
    out: set[str] = set()
    for row in M:
        for x in row:
            out |= E.params_of(x)
    return out


def _constant_entries(M):
    if all(isinstance(x, E.Const) for row in M for x in row):
        return [[x.value for x in row] for row in M]
    return None


def _gauss_det(G) -> Gauss:
    A = [list(row) for row in G]
    n, sign, out = len(A), 1, Gauss(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if not A[r][c].is_zero()), None)
        if piv is None:
            return Gauss(0)
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            sign = -sign
        out = out * A[c][c]
        inv = A[c][c].reciprocal()
        for r in range(c + 1, n):
            if not A[r][c].is_zero():
                f = A[r][c] * inv
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return out if sign == 1 else -out


def _gauss_inverse(G):
    n = len(G)
    A = [list(row) + [Gauss(int(i == j)) for j in range(n)] for i, row in enumerate(G)]
    for c in range(n):
        piv = next((r for r in range(c, n) if not A[r][c].is_zero()), None)
        if piv is None:
            raise SingularMatrix("matrix is exactly singular")
        A[c], A[piv] = A[piv], A[c]
        inv = A[c][c].reciprocal()
        A[c] = [a * inv for a in A[c]]
        for r in range(n):
            if r != c and not A[r][c].is_zero():
                f = A[r][c]
                A[r] = [a - f * b for a, b in zip(A[r], A[c])]
    return [row[n:] for row in A]


def _poly_minor_det(P, rows: tuple) -> Polynomial:
    """Determinant of P restricted to ``rows`` and the first len(rows) columns
    not excluded, by memoised Laplace expansion over column subsets."""
    ncols = len(P[0])
    zero = Polynomial.constant(0)

    @lru_cache(maxsize=None)
    def minor(k: int, cols: int) -> Polynomial:
        if k == len(rows):
            return Polynomial.constant(1)
        total, pos = zero, 0
        row = P[rows[k]]
        for c in range(ncols):
            if not cols >> c & 1:
                continue
            entry = row[c]
            if not entry.is_zero():
                sub = minor(k + 1, cols & ~(1 << c))
                if not sub.is_zero():
                    term = entry * sub
                    total = total - term if pos % 2 else total + term
            pos += 1
        return total

    return minor


def _as_polys(M):
    try:
        return [[canonical(x) for x in row] for row in M]
    except Exception as exc:  # NotPolynomial
        raise type(exc)(f"symbolic linear algebra needs polynomial entries: {exc}") from None


def symbolic_det(M) -> E.Expr:
    n = _square(M)
    consts = _constant_entries(M)
    if consts is not None:
        return E.Const(_gauss_det(consts))
    if n > SYMBOLIC_LIMIT:
        raise SizeLimitExceeded(f"symbolic determinant limited to size {SYMBOLIC_LIMIT}, got {n}")
    P = _as_polys(M)
    d = _poly_minor_det(P, tuple(range(n)))(0, (1 << n) - 1)
    return d.to_expr(_params(M))


def symbolic_det_poly(M) -> Polynomial:
    """Like :func:`symbolic_det` but returns the canonical polynomial."""
    return canonical(symbolic_det(M))


def symbolic_inverse(M) -> list[list[E.Expr]]:
    """Exact inverse.  Constant matrices of any size use exact elimination;
    polynomial matrices up to size 8 use the adjugate divided by the determinant."""
    n = _square(M)
    consts = _constant_entries(M)
    if consts is not None:
        return [[E.Const(x) for x in row] for row in _gauss_inverse(consts)]
    if n > SYMBOLIC_LIMIT:
        raise SizeLimitExceeded(f"symbolic inverse limited to size {SYMBOLIC_LIMIT}, got {n}")
    P = _as_polys(M)
    params = _params(M)
    full = (1 << n) - 1
    d = _poly_minor_det(P, tuple(range(n)))(0, full)
    if d.is_zero():
        raise SingularMatrix("matrix is identically singular")
    inv = [[E.ZERO] * n for _ in range(n)]
    for i in range(n):
        minor = _poly_minor_det(P, tuple(r for r in range(n) if r != i))
        for j in range(n):
            cof = minor(0, full & ~(1 << j))
            if (i + j) % 2:
                cof = -cof
            # inverse = adjugate / det, adjugate = transposed cofactors
            num, den = cancel_monomial(cof, d)
            inv[j][i] = E.div(num.to_expr(params), den.to_expr(params))
    return inv


def matmul(A, B):
    """Product of expression matrices."""
    n, k, m = len(A), len(B), len(B[0])
    return [[E.add(*(E.mul(A[i][t], B[t][j]) for t in range(k))) for j in range(m)] for i in range(n)]


def matrices_equal(A, B) -> bool:
    return len(A) == len(B) and all(
        len(ra) == len(rb) and all(equals(x, y) for x, y in zip(ra, rb)) for ra, rb in zip(A, B)
    )


# -- pfaffian ---------------------------------------------------------------


def pfaffian(A):
    """Pfaffian of an antisymmetric matrix (numeric or expression entries)."""
    symbolic = _is_symbolic(A)
    n = _square(A)
    if n % 2:
        raise OddSize(f"pfaffian needs even size, got {n}")
    if symbolic:
        if n > SYMBOLIC_LIMIT:
            raise SizeLimitExceeded(f"symbolic pfaffian limited to size {SYMBOLIC_LIMIT}")
        for i in range(n):
            for j in range(i, n):
                if not equals(A[i][j], E.neg(A[j][i])):
                    raise NotAntisymmetric(f"entries ({i},{j}) and ({j},{i}) are not opposite")
        P = _as_polys(A)
        zero, one = Polynomial.constant(0), Polynomial.constant(1)
        mul = lambda a, b: a * b
        addf = lambda a, b: a + b
        subf = lambda a, b: a - b
        is_zero = lambda a: a.is_zero()
    else:
        P = np.asarray(A, dtype=complex)
        if np.max(np.abs(P + P.T), initial=0.0) > 1e-12 * max(1.0, np.max(np.abs(P), initial=0.0)):
            raise NotAntisymmetric("matrix is not antisymmetric")
        zero, one = 0j, 1 + 0j
        mul = lambda a, b: a * b
        addf = lambda a, b: a + b
        subf = lambda a, b: a - b
        is_zero = lambda a: a == 0

    @lru_cache(maxsize=None)
    def pf(mask: int):
        idx = [k for k in range(n) if mask >> k & 1]
        if not idx:
            return one
        r0, total = idx[0], zero
        for pos, rk in enumerate(idx[1:], start=1):
            a = P[r0][rk]
            if is_zero(a):
                continue
            term = mul(a, pf(mask & ~(1 << r0) & ~(1 << rk)))
            total = addf(total, term) if pos % 2 else subf(total, term)
        return total

    out = pf((1 << n) - 1)
    if symbolic:
        return out.to_expr(_params(A))
    return complex(out)
