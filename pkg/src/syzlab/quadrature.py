"""Deterministic quadrature on chart fibres, bases and fibre cycles.

Fibre integrals use the uniform product grid, i.e. the trapezoidal rule on
the torus, which is spectrally accurate for smooth periodic integrands.
Base integrals use a tensor Gauss-Legendre rule.  Cycle integrals run a
straight line in an integer homology direction.
"""

from __future__ import annotations

from itertools import product as iproduct

import numpy as np
import sympy as sp

from .charts import Chart
from .fields import PeriodicityError, compile_scalars, require_fibre_periodic


def fibre_integral(expr, chart: Chart, y_point, resolution=16):
    """Integral over the fibre torus above y_point (unit cell measure)."""
    expr = sp.sympify(expr)
    require_fibre_periodic(expr, chart.n)
    pts = np.array(list(iproduct(*[np.arange(resolution) / resolution] * chart.n)))
    Y = np.tile(np.asarray(y_point, dtype=float), (len(pts), 1))
    vals = compile_scalars([expr], chart)(Y, pts)[0]
    return complex(np.mean(vals))


def subtorus_integral(expr, chart: Chart, y_point, omit_axis, resolution=16, x_fixed=0.0):
    """Integral over the coordinate (n-1)-torus omitting one fibre axis.

    The omitted coordinate is held at x_fixed; orientation is the wedge of
    the remaining axes in increasing order.
    """
    expr = sp.sympify(expr)
    require_fibre_periodic(expr, chart.n)
    n = chart.n
    axes = [np.arange(resolution) / resolution] * (n - 1)
    pts = np.array(list(iproduct(*axes))) if n > 1 else np.zeros((1, 0))
    X = np.empty((len(pts), n))
    col = 0
    for i in range(n):
        if i + 1 == omit_axis:
            X[:, i] = x_fixed
        else:
            X[:, i] = pts[:, col]
            col += 1
    Y = np.tile(np.asarray(y_point, dtype=float), (len(X), 1))
    vals = compile_scalars([expr], chart)(Y, X)[0]
    return complex(np.mean(vals))


def cycle_line_integral(coeff_exprs, chart: Chart, y_point, direction, resolution=64,
                        x_base=None):
    """Integral of the fibre 1-form sum_j coeff_j dx_j over a straight cycle.

    direction is an integer vector d; the cycle is t -> x_base + t*d, t in
    [0, 1), and the integral is sum_j d_j * mean_t coeff_j.
    """
    n = chart.n
    d = np.asarray(direction, dtype=float)
    x0 = np.zeros(n) if x_base is None else np.asarray(x_base, dtype=float)
    t = np.arange(resolution) / resolution
    X = x0[None, :] + t[:, None] * d[None, :]
    Y = np.tile(np.asarray(y_point, dtype=float), (resolution, 1))
    exprs = [sp.sympify(c) for c in coeff_exprs]
    for e in exprs:
        require_fibre_periodic(e, n)
    vals = compile_scalars(exprs, chart)(Y, X)
    return complex(np.sum(np.mean(vals, axis=1) * d))


def gauss_legendre_nodes(lo, hi, k):
    nodes, weights = np.polynomial.legendre.leggauss(k)
    mid, half = (hi + lo) / 2.0, (hi - lo) / 2.0
    return mid + half * nodes, half * weights


def base_integral(expr, chart: Chart, resolution=8):
    """Tensor Gauss-Legendre integral of an x-free field over the base box."""
    expr = sp.sympify(expr)
    if set(expr.free_symbols) & set(chart.xs):
        raise PeriodicityError("base integrals need an x-free integrand")
    axes = [gauss_legendre_nodes(float(lo), float(hi), resolution) for lo, hi in chart.box]
    pts = np.array(list(iproduct(*[a[0] for a in axes])))
    wts = np.array([np.prod(w) for w in iproduct(*[a[1] for a in axes])])
    Y = pts
    X = np.zeros_like(pts)
    vals = compile_scalars([expr], chart)(Y, X)[0]
    return complex(np.sum(vals * wts))


def chart_integral(expr, chart: Chart, base_resolution=8, fibre_resolution=16):
    """Integral over base box x fibre torus of a mixed integrand."""
    expr = sp.sympify(expr)
    require_fibre_periodic(expr, chart.n)
    axes = [gauss_legendre_nodes(float(lo), float(hi), base_resolution) for lo, hi in chart.box]
    ypts = np.array(list(iproduct(*[a[0] for a in axes])))
    ywts = np.array([np.prod(w) for w in iproduct(*[a[1] for a in axes])])
    xpts = np.array(list(iproduct(*[np.arange(fibre_resolution) / fibre_resolution] * chart.n)))
    ny, nx = len(ypts), len(xpts)
    Y = np.repeat(ypts, nx, axis=0)
    X = np.tile(xpts, (ny, 1))
    vals = compile_scalars([expr], chart)(Y, X)[0].reshape(ny, nx)
    fibre_means = vals.mean(axis=1)
    return complex(np.sum(fibre_means * ywts))


def integrate(field, chart: Chart, over, resolution=16, at=None, cycle=None):
    """Scalar-field integral dispatcher.

    over: "fibre" (needs at=y point), "base", or "cycle" (needs cycle=integer
    direction and at=y point).
    """
    if over in ("fibre", "fibre-at-y"):
        if at is None:
            raise ValueError("fibre integration needs a base point 'at'")
        return fibre_integral(field, chart, at, resolution)
    if over == "base":
        return base_integral(field, chart, resolution)
    if over == "cycle":
        if at is None or cycle is None:
            raise ValueError("cycle integration needs 'at' and 'cycle'")
        d = list(cycle)
        if all(c == 0 for c in d):
            raise ValueError("cycle direction must be nonzero")
        # scalar field along the cycle: arc parametrised by t in [0,1)
        n = chart.n
        t = np.arange(resolution) / resolution
        X = t[:, None] * np.asarray(d, dtype=float)[None, :]
        Y = np.tile(np.asarray(at, dtype=float), (resolution, 1))
        expr = sp.sympify(field)
        require_fibre_periodic(expr, n)
        vals = compile_scalars([expr], chart)(Y, X)[0]
        return complex(np.mean(vals))
    raise ValueError(f"unknown integration domain {over!r}")
