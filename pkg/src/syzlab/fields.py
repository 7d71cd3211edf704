"""Symbolic scalar fields on a chart.

Coefficient functions are sympy expressions over the real chart symbols
y1..y3, x1..x3.  The configuration grammar is deliberately small: infix
``+ - * / ^``, functions ``sin cos exp``, the constant ``pi``, and numeric
literals.  Complex values enter only as {"re": ..., "im": ...} pairs, so a
parsed string is always a real-valued expression.

Fibre periodicity is enforced syntactically: a fibre variable x_i may occur
only inside sin/cos whose argument is 2*pi*(integer)*x_i plus an x-free
phase.  This guarantees exact period-1 periodicity, which the torus
quadrature and fibrewise translations rely on.
"""

from __future__ import annotations

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import (
    convert_xor,
    parse_expr,
    standard_transformations,
)

from .charts import X_SYMBOLS, Y_SYMBOLS, Chart

ALLOWED_FUNCTIONS = (sp.sin, sp.cos, sp.exp)


class GrammarError(ValueError):
    """Raised when an expression leaves the configuration grammar."""


class PeriodicityError(ValueError):
    """Raised when a field is not syntactically fibre-periodic."""


_LOCALS = {s.name: s for s in Y_SYMBOLS + X_SYMBOLS}
_LOCALS.update({"sin": sp.sin, "cos": sp.cos, "exp": sp.exp, "pi": sp.pi})
# the parser's generated code needs the numeric constructors in scope
_GLOBALS = {"Integer": sp.Integer, "Float": sp.Float, "Rational": sp.Rational,
            "Symbol": sp.Symbol, "Function": sp.Function}
_TRANSFORMS = standard_transformations + (convert_xor,)


def parse_scalar(value, n=3):
    """Parse a grammar string, a number, or a {"re","im"} pair.

    Returns a sympy expression; the pair form yields re + I*im.
    """
    if isinstance(value, dict):
        extra = set(value) - {"re", "im"}
        if extra:
            raise GrammarError(f"unknown keys in complex literal: {sorted(extra)}")
        re = parse_scalar(value.get("re", 0), n)
        im = parse_scalar(value.get("im", 0), n)
        return re + sp.I * im
    if isinstance(value, (int, float)):
        return sp.nsimplify(value, rational=True)
    if isinstance(value, sp.Expr):
        validate_grammar(value, n)
        return value
    if not isinstance(value, str):
        raise GrammarError(f"cannot parse {value!r} as a scalar field")
    try:
        expr = parse_expr(
            value, local_dict=_LOCALS, transformations=_TRANSFORMS,
            global_dict=dict(_GLOBALS),
        )
    except Exception as exc:  # sympy raises a zoo of parse errors
        raise GrammarError(f"cannot parse {value!r}: {exc}") from None
    validate_grammar(expr, n)
    return expr


def validate_grammar(expr, n=3):
    """Check that expr uses only grammar node kinds and chart variables."""
    allowed_syms = set(Y_SYMBOLS[:n]) | set(X_SYMBOLS[:n])
    for sym in expr.free_symbols:
        if sym not in allowed_syms:
            raise GrammarError(f"unknown variable {sym} (chart dimension {n})")
    for node in sp.preorder_traversal(expr):
        if isinstance(node, sp.Function) and not isinstance(node, ALLOWED_FUNCTIONS):
            raise GrammarError(f"function {node.func} is outside the grammar")
        if isinstance(node, sp.Pow):
            if not (node.exp.is_Integer or node.exp == sp.Rational(1, 2)
                    or node.exp == -sp.Rational(1, 2)):
                raise GrammarError(f"non-integer power {node}")
    return expr


def fibre_periodicity_defect(expr, n):
    """Return None if expr is syntactically fibre-periodic, else a reason.

    Every occurrence of an x-variable must sit inside sin/cos whose argument
    is a sum of 2*pi*k_i*x_i terms (k_i integers) plus an x-free phase.
    """
    xs = set(X_SYMBOLS[:n])

    def check(node):
        if node.free_symbols.isdisjoint(xs):
            return None
        if isinstance(node, (sp.sin, sp.cos)):
            arg = node.args[0]
            for x in xs & arg.free_symbols:
                slope = sp.expand(sp.diff(arg, x))
                if slope.free_symbols:
                    return f"argument of {node} is nonlinear in {x}"
                k = sp.simplify(slope / (2 * sp.pi))
                if not k.is_integer:
                    return f"frequency of {x} in {node} is not an integer multiple of 2*pi"
            return None
        if node.is_Symbol:
            return f"fibre variable {node} appears outside sin/cos"
        if isinstance(node, sp.exp):
            return f"fibre variable inside exp in {node}"
        for arg in node.args:
            reason = check(arg)
            if reason:
                return reason
        return None

    return check(sp.sympify(expr))


def is_fibre_periodic(expr, n):
    return fibre_periodicity_defect(expr, n) is None


def require_fibre_periodic(expr, n):
    reason = fibre_periodicity_defect(expr, n)
    if reason:
        raise PeriodicityError(reason)
    return expr


def compile_scalars(exprs, chart: Chart):
    """Vectorised evaluator for a list of expressions.

    Returns f(Y, X) -> complex array of shape (len(exprs), npts) where Y, X
    are (npts, n) sample arrays.
    """
    exprs = list(exprs)
    syms = list(chart.ys) + list(chart.xs)
    if not exprs:
        return lambda Y, X: np.zeros((0, len(Y)), dtype=complex)
    fn = sp.lambdify(syms, exprs, modules="numpy")

    def evaluate(Y, X):
        cols = [Y[:, i] for i in range(chart.n)] + [X[:, i] for i in range(chart.n)]
        vals = fn(*cols)
        out = np.empty((len(exprs), len(Y)), dtype=complex)
        for i, v in enumerate(vals):
            out[i] = np.asarray(v, dtype=complex)
        return out

    return evaluate


def sup_norm_scalars(exprs, chart: Chart, base_k=5, fibre_k=8):
    """Max |value| of the expressions over the deterministic sample grid."""
    exprs = [sp.sympify(e) for e in exprs]
    if not exprs or all(e == 0 for e in exprs):
        return 0.0
    Y, X = chart.sample_points(base_k, fibre_k)
    vals = compile_scalars(exprs, chart)(Y, X)
    return float(np.max(np.abs(vals)))


def re_im(expr):
    """Split a coefficient into real and imaginary parts (symbols are real)."""
    return sp.sympify(expr).as_real_imag()


def central_difference(expr, var, point_subs, h):
    """Second-order central finite difference at a sample point."""
    up = expr.subs(var, point_subs[var] + h).subs(point_subs)
    dn = expr.subs(var, point_subs[var] - h).subs(point_subs)
    return (complex(up) - complex(dn)) / (2 * h)
