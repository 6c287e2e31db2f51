"""Dimensions, coordinate names and the flat (sigma, i) index convention.

Names used throughout the package::

    x1..xn            base coordinates
    y1..ym            field coordinates
    y<s>_<i>          first jet  (field s, base direction i)
    y<s>_<i><j>       formal second jet, stored with i <= j
    p<s>_<i>          momentum conjugate to y<s>_<i>
    p<s>_<i>_x<k>     derivative of p<s>_<i> along x<k> on a section

Matrices indexed by pairs are flattened sigma-major:
``r = (s - 1) * n + (i - 1)``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import IndexOutOfRange

_NAME = re.compile(r"^(?:x(\d)|y(\d)|y(\d)_(\d)|y(\d)_(\d)(\d)|p(\d)_(\d)|p(\d)_(\d)_x(\d))$")


@dataclass(frozen=True)
class Chart:
    n: int
    m: int

    def __post_init__(self):
        for label, v in (("n", self.n), ("m", self.m)):
            if not isinstance(v, int) or not 1 <= v <= 9:
                raise ValueError(f"{label} must be an integer in 1..9, got {v!r}")

    # -- naming -------------------------------------------------------------
    def x(self, i: int) -> str:
        self._check_base(i)
        return f"x{i}"

    def y(self, s: int) -> str:
        self._check_fibre(s)
        return f"y{s}"

    def jet(self, s: int, i: int) -> str:
        self._check_fibre(s)
        self._check_base(i)
        return f"y{s}_{i}"

    def jet2(self, s: int, i: int, j: int) -> str:
        self._check_fibre(s)
        self._check_base(i)
        self._check_base(j)
        i, j = min(i, j), max(i, j)
        return f"y{s}_{i}{j}"

    def mom(self, s: int, i: int) -> str:
        self._check_fibre(s)
        self._check_base(i)
        return f"p{s}_{i}"

    def mom_dx(self, s: int, i: int, k: int) -> str:
        self._check_base(k)
        return f"{self.mom(s, i)}_x{k}"

    @cached_property
    def x_names(self) -> tuple[str, ...]:
        return tuple(f"x{i}" for i in range(1, self.n + 1))

    @cached_property
    def y_names(self) -> tuple[str, ...]:
        return tuple(f"y{s}" for s in range(1, self.m + 1))

    @cached_property
    def jet_names(self) -> tuple[str, ...]:
        """First-jet names in flat order."""
        return tuple(self.jet(s, i) for s, i in self.pairs)

    @cached_property
    def mom_names(self) -> tuple[str, ...]:
        return tuple(self.mom(s, i) for s, i in self.pairs)

    @cached_property
    def jet2_names(self) -> tuple[str, ...]:
        return tuple(
            self.jet2(s, i, j)
            for s in range(1, self.m + 1)
            for i in range(1, self.n + 1)
            for j in range(i, self.n + 1)
        )

    @cached_property
    def pairs(self) -> tuple[tuple[int, int], ...]:
        """(sigma, i) pairs in flat order."""
        return tuple((s, i) for s in range(1, self.m + 1) for i in range(1, self.n + 1))

    @property
    def size(self) -> int:
        return self.m * self.n

    def normalize(self, name: str) -> str | None:
        """Canonical spelling of a coordinate name, or None if it is not one."""
        mt = _NAME.match(name)
        if not mt:
            return None
        g = mt.groups()
        try:
            if g[0]:
                return self.x(int(g[0]))
            if g[1]:
                return self.y(int(g[1]))
            if g[2]:
                return self.jet(int(g[2]), int(g[3]))
            if g[4]:
                return self.jet2(int(g[4]), int(g[5]), int(g[6]))
            if g[7]:
                return self.mom(int(g[7]), int(g[8]))
            return self.mom_dx(int(g[9]), int(g[10]), int(g[11]))
        except IndexOutOfRange:
            return None

    # -- flat index ---------------------------------------------------------
    def flat_index(self, s: int, i: int) -> int:
        self._check_fibre(s)
        self._check_base(i)
        return (s - 1) * self.n + (i - 1)

    def unflat_index(self, r: int) -> tuple[int, int]:
        if not isinstance(r, (int, np.integer)) or not 0 <= r < self.size:
            raise IndexOutOfRange(f"flat index {r} outside [0, {self.size})")
        s, i = divmod(int(r), self.n)
        return s + 1, i + 1

    def _check_base(self, i):
        if not 1 <= i <= self.n:
            raise IndexOutOfRange(f"base index {i} outside 1..{self.n}")

    def _check_fibre(self, s):
        if not 1 <= s <= self.m:
            raise IndexOutOfRange(f"fibre index {s} outside 1..{self.m}")


def flat_index(s: int, i: int, chart: Chart) -> int:
    return chart.flat_index(s, i)


def unflat_index(r: int, chart: Chart) -> tuple[int, int]:
    return chart.unflat_index(r)


def is_coordinate_like(name: str) -> bool:
    """True for any spelling that could collide with a coordinate name."""
    return bool(_NAME.match(name))


@dataclass(frozen=True)
class JetPoint:
    """Values of (x, y, y_j) at one point of the first jet space."""

    chart: Chart
    x: tuple
    y: tuple
    v: tuple  # first jets, flat order

    def __post_init__(self):
        c = self.chart
        if (len(self.x), len(self.y), len(self.v)) != (c.n, c.m, c.size):
            raise ValueError("value count must be n + m + mn")

    def env(self) -> dict[str, complex]:
        c = self.chart
        out = dict(zip(c.x_names, self.x))
        out.update(zip(c.y_names, self.y))
        out.update(zip(c.jet_names, self.v))
        return out

    @classmethod
    def random(cls, chart: Chart, rng: np.random.Generator, scale: float = 1.0) -> "JetPoint":
        x = rng.uniform(0, 1, chart.n)
        y = rng.uniform(-scale, scale, chart.m)
        v = rng.uniform(-scale, scale, chart.size)
        return cls(chart, tuple(complex(t) for t in x), tuple(complex(t) for t in y),
                   tuple(complex(t) for t in v))
