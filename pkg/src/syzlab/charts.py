"""Torus-fibration charts: a base box times a unit-lattice torus fibre.

Coordinates are y1..yn on the base and x1..xn on the fibre; every fibre
coordinate is periodic with period 1.  Dimensions 1 <= n <= 3 are supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

import numpy as np
import sympy as sp

MAX_DIM = 3

Y_SYMBOLS = sp.symbols("y1 y2 y3", real=True)
X_SYMBOLS = sp.symbols("x1 x2 x3", real=True)


class ChartError(ValueError):
    """Raised for malformed charts or chart mismatches between operands."""


def _to_number(v):
    if isinstance(v, (int, sp.Integer, sp.Rational)):
        return sp.Rational(v)
    if isinstance(v, float):
        return sp.Rational(str(v)) if float(v).is_integer() or abs(v) < 1e6 else sp.Float(v)
    return sp.sympify(v)


@dataclass(frozen=True)
class Chart:
    """An n-dimensional chart: base box [lo_i, hi_i] x unit torus fibre."""

    n: int
    box: tuple

    def __post_init__(self):
        if not 1 <= self.n <= MAX_DIM:
            raise ChartError(f"dimension must be in 1..{MAX_DIM}, got {self.n}")
        if len(self.box) != self.n:
            raise ChartError("box must give one [lo, hi] interval per base axis")
        fixed = []
        for lo, hi in self.box:
            lo, hi = _to_number(lo), _to_number(hi)
            if not lo < hi:
                raise ChartError(f"empty base interval [{lo}, {hi}]")
            fixed.append((lo, hi))
        object.__setattr__(self, "box", tuple(fixed))

    @property
    def ys(self):
        return Y_SYMBOLS[: self.n]

    @property
    def xs(self):
        return X_SYMBOLS[: self.n]

    @property
    def center(self):
        return tuple((lo + hi) / 2 for lo, hi in self.box)

    @property
    def box_volume(self):
        vol = sp.Integer(1)
        for lo, hi in self.box:
            vol *= hi - lo
        return vol

    def base_axis_points(self, k):
        return [np.linspace(float(lo), float(hi), k) for lo, hi in self.box]

    def fibre_axis_points(self, k):
        return [np.arange(k) / k for _ in range(self.n)]

    def base_grid(self, k=5):
        """Deterministic k^n grid of base sample points, shape (k^n, n)."""
        axes = self.base_axis_points(k)
        return np.array(list(product(*axes)), dtype=float)

    def fibre_grid(self, k=8):
        """Uniform k^n grid on the fibre torus, shape (k^n, n)."""
        axes = self.fibre_axis_points(k)
        return np.array(list(product(*axes)), dtype=float)

    def sample_points(self, base_k=5, fibre_k=8):
        """Full product grid: returns (Y, X) arrays of shape (npts, n)."""
        yb = self.base_grid(base_k)
        xf = self.fibre_grid(fibre_k)
        ny, nx = len(yb), len(xf)
        Y = np.repeat(yb, nx, axis=0)
        X = np.tile(xf, (ny, 1))
        return Y, X


def require_same_chart(a, b):
    if a != b:
        raise ChartError("operands live on different charts")
