import pytest
import sympy as sp

from syzlab.charts import Chart
from syzlab.fields import PeriodicityError
from syzlab.quadrature import (
    base_integral,
    chart_integral,
    cycle_line_integral,
    fibre_integral,
    integrate,
    subtorus_integral,
)


@pytest.fixture
def chart2():
    return Chart(2, ((-1, 1), (-1, 1)))


def test_trig_mode_exact_at_tiny_resolution(chart2):
    x1 = chart2.xs[0]
    assert abs(integrate(sp.sin(2 * sp.pi * x1), chart2, "fibre",
                         resolution=2, at=(0, 0))) < 1e-15
    assert abs(integrate(sp.sin(2 * sp.pi * x1), chart2, "fibre",
                         resolution=5, at=(0, 0))) < 1e-14


def test_unit_mass(chart2):
    assert integrate(sp.Integer(1), chart2, "fibre", resolution=3,
                     at=(0.2, -0.4)).real == pytest.approx(1.0)


def test_squared_mode(chart2):
    x1 = chart2.xs[0]
    val = integrate(sp.sin(2 * sp.pi * x1) ** 2, chart2, "fibre",
                    resolution=16, at=(0, 0))
    assert abs(val - 0.5) < 1e-12


def test_fibre_requires_periodicity(chart2):
    with pytest.raises(PeriodicityError):
        fibre_integral(chart2.xs[0], chart2, (0, 0))


def test_base_gauss_legendre(chart2):
    y1, y2 = chart2.ys
    val = base_integral(y1 ** 4 * y2 ** 2, chart2, resolution=6)
    assert abs(val - sp.Rational(2, 5) * sp.Rational(2, 3)) < 1e-13
    with pytest.raises(PeriodicityError):
        base_integral(chart2.xs[0], chart2)


def test_chart_integral_mixed(chart2):
    y1 = chart2.ys[0]
    x1 = chart2.xs[0]
    val = chart_integral(y1 ** 2 * (1 + sp.sin(2 * sp.pi * x1) ** 2), chart2)
    # int y1^2 over [-1,1]^2 = 4/3; fibre factor = 3/2
    assert abs(val - 2.0) < 1e-12


def test_cycle_integrals(chart2):
    x1, x2 = chart2.xs
    val = cycle_line_integral([sp.Integer(1), sp.Integer(0)], chart2, (0, 0), (1, 0))
    assert val.real == pytest.approx(1.0)
    val = cycle_line_integral([sp.cos(2 * sp.pi * x1), sp.Integer(0)],
                              chart2, (0, 0), (1, 0), resolution=8)
    assert abs(val) < 1e-14
    scalar = integrate(sp.cos(2 * sp.pi * x1) ** 2, chart2, "cycle",
                       resolution=16, at=(0, 0), cycle=(1, 0))
    assert abs(scalar - 0.5) < 1e-12
    with pytest.raises(ValueError):
        integrate(sp.Integer(1), chart2, "cycle", at=(0, 0), cycle=(0, 0))


def test_subtorus_integral():
    chart = Chart(3, ((-1, 1),) * 3)
    x1, x2, x3 = chart.xs
    val = subtorus_integral(sp.cos(2 * sp.pi * x2) ** 2, chart, (0, 0, 0),
                            omit_axis=1, resolution=8)
    assert abs(val - 0.5) < 1e-12


def test_determinism(chart2):
    x1 = chart2.xs[0]
    expr = sp.sin(2 * sp.pi * x1) ** 2 + chart2.ys[0] ** 2
    a = chart_integral(expr, chart2)
    b = chart_integral(expr, chart2)
    assert a == b
