import numpy as np
import pytest
import sympy as sp

from syzlab.charts import Chart, ChartError
from syzlab.fields import (
    GrammarError,
    central_difference,
    fibre_periodicity_defect,
    is_fibre_periodic,
    parse_scalar,
    sup_norm_scalars,
)


def test_chart_validation():
    with pytest.raises(ChartError):
        Chart(4, ((-1, 1),) * 4)
    with pytest.raises(ChartError):
        Chart(1, ((1, 1),))
    c = Chart(2, ((-1, 1), (0, 2)))
    assert c.center == (0, 1)
    assert c.box_volume == 4


def test_parse_grammar_and_complex():
    e = parse_scalar("sin(2*pi*x1)*y2 + 1/2", 2)
    x1 = Chart(2, ((-1, 1), (-1, 1))).xs[0]
    assert e.has(sp.sin(2 * sp.pi * x1))
    z = parse_scalar({"re": "y1", "im": "3/4"}, 2)
    assert sp.im(z) == sp.Rational(3, 4)
    assert parse_scalar(2.5, 1) == sp.Rational(5, 2)


@pytest.mark.parametrize("bad", [
    "tan(y1)", "y4", "x3 + y1", "log(y1)", "sin(2*pi*x1)**y1", "foo(y1)",
])
def test_parse_rejects_off_grammar(bad):
    with pytest.raises(GrammarError):
        parse_scalar(bad, 2)


def test_periodicity_checker():
    n = 2
    assert is_fibre_periodic(parse_scalar("sin(2*pi*x1) + cos(4*pi*x2 + y1)", n), n)
    assert is_fibre_periodic(parse_scalar("y1^2 + 1", n), n)
    assert not is_fibre_periodic(parse_scalar("x1", n), n)
    assert not is_fibre_periodic(parse_scalar("sin(pi*x1)", n), n)
    assert not is_fibre_periodic(parse_scalar("exp(x1)", n), n)
    assert fibre_periodicity_defect(parse_scalar("sin(2*pi*x1*y1)", n), n) is not None


def test_periodicity_by_sampling():
    """A flagged-periodic field evaluates equally at x and x + e_i."""
    chart = Chart(2, ((-1, 1), (-1, 1)))
    expr = parse_scalar("sin(2*pi*x1)*cos(2*pi*x2 + y1) + y2", 2)
    assert is_fibre_periodic(expr, 2)
    subs = {chart.ys[0]: 0.3, chart.ys[1]: -0.2}
    rng = np.random.default_rng(0)
    for _ in range(20):
        x = rng.uniform(0, 1, size=2)
        base = complex(expr.subs(subs).subs({chart.xs[0]: x[0], chart.xs[1]: x[1]}))
        for i in range(2):
            shifted = x.copy()
            shifted[i] += 1.0
            val = complex(expr.subs(subs).subs(
                {chart.xs[0]: shifted[0], chart.xs[1]: shifted[1]}))
            assert abs(val - base) < 1e-12


def test_finite_difference_second_order():
    """Central differences approach the symbolic derivative at O(h^2)."""
    chart = Chart(2, ((-1, 1), (-1, 1)))
    y1, y2 = chart.ys
    x1, _ = chart.xs
    expr = sp.sin(2 * sp.pi * x1) * y1 ** 3 + sp.exp(y2 / 2)
    point = {y1: 0.4, y2: -0.3, x1: 0.15, chart.xs[1]: 0.7}
    for var in (y1, y2, x1):
        sym = complex(sp.diff(expr, var).subs(point))
        err_h = abs(central_difference(expr, var, point, 1e-2) - sym)
        err_h2 = abs(central_difference(expr, var, point, 5e-3) - sym)
        assert err_h < 1e-3
        assert err_h2 < err_h / 3.0 + 1e-12


def test_sup_norm_scalars():
    chart = Chart(1, ((-1, 1),))
    y1 = chart.ys[0]
    assert sup_norm_scalars([y1 ** 2], chart) == pytest.approx(1.0)
    assert sup_norm_scalars([sp.Integer(0)], chart) == 0.0
