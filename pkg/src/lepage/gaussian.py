"""Exact complex rationals ``re + im*i`` with :class:`fractions.Fraction` parts."""

from __future__ import annotations

from fractions import Fraction
from numbers import Rational


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    if isinstance(x, float):
        # floats reach here only from literals already validated as finite
        return Fraction(x).limit_denominator(10**12)
    raise TypeError(f"cannot convert {x!r} to Fraction")


class Gauss:
    """Gaussian rational. Immutable and hashable."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", _frac(re))
        object.__setattr__(self, "im", _frac(im))

    def __setattr__(self, name, value):
        raise AttributeError("Gauss is immutable")

    @classmethod
    def coerce(cls, x) -> "Gauss":
        if isinstance(x, Gauss):
            return x
        if isinstance(x, complex):
            return cls(_frac(x.real), _frac(x.imag))
        return cls(x)

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def is_one(self) -> bool:
        return self.re == 1 and self.im == 0

    def is_real(self) -> bool:
        return self.im == 0

    def is_integer(self) -> bool:
        return self.im == 0 and self.re.denominator == 1

    def __add__(self, other):
        o = Gauss.coerce(other)
        return Gauss(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = Gauss.coerce(other)
        return Gauss(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return Gauss.coerce(other) - self

    def __neg__(self):
        return Gauss(-self.re, -self.im)

    def __mul__(self, other):
        o = Gauss.coerce(other)
        if self.im == 0 and o.im == 0:
            return Gauss(self.re * o.re)
        return Gauss(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def reciprocal(self) -> "Gauss":
        if self.is_zero():
            raise ZeroDivisionError("reciprocal of zero")
        if self.im == 0:
            return Gauss(1 / self.re)
        d = self.re * self.re + self.im * self.im
        return Gauss(self.re / d, -self.im / d)

    def __truediv__(self, other):
        return self * Gauss.coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return Gauss.coerce(other) * self.reciprocal()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            raise TypeError("only integer powers")
        if k < 0:
            return self.reciprocal() ** (-k)
        out, base = Gauss(1), self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, Gauss):
            return self.re == other.re and self.im == other.im
        if isinstance(other, (int, Fraction)):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"Gauss({self.re!s}, {self.im!s})"

    def __str__(self):
        return self.to_text()

    def to_text(self) -> str:
        """Text readable by the expression parser (no surrounding parentheses)."""
        if self.im == 0:
            return str(self.re)
        im = "im" if self.im == 1 else "-im" if self.im == -1 else f"{self.im}*im"
        if self.re == 0:
            return im
        if im.startswith("-"):
            return f"{self.re} - {im[1:]}"
        return f"{self.re} + {im}"

    def to_pair(self) -> list[str]:
        return [str(self.re), str(self.im)]

    @classmethod
    def from_pair(cls, pair) -> "Gauss":
        re, im = pair
        return cls(_frac(re), _frac(im))
