"""The bigraded algebra of dy-forms with polyvector coefficients on a chart.

An element is a sparse sum of terms  c(y, x) * dy_J (x) d/dx_I  with J and I
strictly increasing index tuples; the term has bidegree (p, q) = (-|I|, |J|).
The product wedges both factors separately, which gives the commutation sign
(-1)^(p*p' + q*q') between homogeneous pieces.

The isomorphism with ordinary differential forms sends dy_J (x) d/dx_I to
dy_J ^ i(d/dx_I) (dx_1 ^ ... ^ dx_n), where contracting the full coordinate
polyvector into the fibre volume form follows the sign rule
i(d/dx_I) dx_{1..n} = (-1)^M dx_{I*} with I* the complement of I and
M = #{(i, j) : i in I, j in I*, i > j}.  Forms are kept with all dy factors
in front of all dx factors.

Three graded operators act here: d_x (the fibre part of the exterior
derivative, transported through the isomorphism; second order as a
differential operator on the algebra), d_y (the base part; first order) and
d_x' which rescales d_x by (-1)^(p+q+1) on bidegree (p, q).  The bracket is
the second-order defect of d_x'.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np
import sympy as sp

from .charts import Chart, require_same_chart
from .fields import compile_scalars


class DegreeError(ValueError):
    """Raised for operations applied at an invalid (bi)degree."""


# ---------------------------------------------------------------------------
# index bookkeeping
# ---------------------------------------------------------------------------

def sort_with_sign(indices):
    """Sort an index tuple, returning (sorted, sign) or (None, 0) on repeats."""
    idx = list(indices)
    if len(set(idx)) != len(idx):
        return None, 0
    sign = 1
    # insertion sort; fine for length <= 3
    for i in range(1, len(idx)):
        j = i
        while j > 0 and idx[j - 1] > idx[j]:
            idx[j - 1], idx[j] = idx[j], idx[j - 1]
            sign = -sign
            j -= 1
    return tuple(idx), sign


def merge_with_sign(a, b):
    """Concatenate two sorted tuples as a wedge; None if they intersect."""
    if set(a) & set(b):
        return None, 0
    merged, sign = sort_with_sign(tuple(a) + tuple(b))
    return merged, sign


def insert_with_sign(k, sorted_tuple):
    """Sign of moving a new front factor k into its sorted slot."""
    if k in sorted_tuple:
        return None, 0
    pos = sum(1 for j in sorted_tuple if j < k)
    out = tuple(sorted(sorted_tuple + (k,)))
    return out, (-1) ** pos


def complement_sign(iset, n):
    """Sign (-1)^M for contracting d/dx_I into dx_1^...^dx_n."""
    istar = tuple(j for j in range(1, n + 1) if j not in iset)
    M = sum(1 for i in iset for j in istar if i > j)
    return istar, (-1) ** M


def _clean(coeff):
    c = sp.expand(coeff)
    return None if c == 0 else c


# ---------------------------------------------------------------------------
# elements
# ---------------------------------------------------------------------------

class BigradedElement:
    """Sparse map (J, I) -> coefficient over a fixed chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms=None):
        self.chart = chart
        self.terms = {}
        if terms:
            for (jset, iset), coeff in terms.items():
                self._add_term(jset, iset, coeff)

    def _add_term(self, jset, iset, coeff):
        jset, jsign = sort_with_sign(tuple(jset))
        if jset is None:
            return
        iset, isign = sort_with_sign(tuple(iset))
        if iset is None:
            return
        n = self.chart.n
        if jset and jset[-1] > n or iset and iset[-1] > n:
            raise DegreeError(f"index out of range for dimension {n}")
        key = (jset, iset)
        new = sp.expand(self.terms.get(key, 0) + jsign * isign * coeff)
        if new == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    # -- constructors ------------------------------------------------------
    @classmethod
    def zero(cls, chart):
        return cls(chart)

    @classmethod
    def unit(cls, chart):
        return cls.term(chart, 1)

    @classmethod
    def term(cls, chart, coeff, dys=(), dxs=()):
        e = cls(chart)
        e._add_term(tuple(dys), tuple(dxs), sp.sympify(coeff))
        return e

    @classmethod
    def from_matrix(cls, chart, matrix):
        """Build sum_{i,j} m[i][j] dy_j (x) d/dx_i from an n x n matrix."""
        e = cls(chart)
        n = chart.n
        for i in range(n):
            for j in range(n):
                c = sp.sympify(matrix[i][j])
                if c != 0:
                    e._add_term((j + 1,), (i + 1,), c)
        return e

    # -- ring structure ----------------------------------------------------
    def __add__(self, other):
        require_same_chart(self.chart, other.chart)
        out = BigradedElement(self.chart)
        for (j, i), c in self.terms.items():
            out._add_term(j, i, c)
        for (j, i), c in other.terms.items():
            out._add_term(j, i, c)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, factor):
        out = BigradedElement(self.chart)
        f = sp.sympify(factor)
        for (j, i), c in self.terms.items():
            out._add_term(j, i, f * c)
        return out

    def __mul__(self, other):
        if isinstance(other, (int, float, complex, sp.Expr)):
            return self.scale(other)
        require_same_chart(self.chart, other.chart)
        out = BigradedElement(self.chart)
        for (j1, i1), c1 in self.terms.items():
            for (j2, i2), c2 in other.terms.items():
                jm, jsign = merge_with_sign(j1, j2)
                if jm is None:
                    continue
                im, isign = merge_with_sign(i1, i2)
                if im is None:
                    continue
                out._add_term(jm, im, jsign * isign * c1 * c2)
        return out

    __rmul__ = __mul__

    # -- structure ----------------------------------------------------------
    def bidegrees(self):
        return sorted({(-len(i), len(j)) for (j, i) in self.terms})

    def is_zero(self):
        return not self.terms

    def is_homogeneous(self, bidegree=None):
        degs = self.bidegrees()
        if bidegree is None:
            return len(degs) <= 1
        return degs in ([], [tuple(bidegree)])

    def homogeneous_pieces(self):
        pieces = {}
        for (j, i), c in self.terms.items():
            deg = (-len(i), len(j))
            pieces.setdefault(deg, BigradedElement(self.chart))._add_term(j, i, c)
        return pieces

    def coefficient(self, dys=(), dxs=()):
        jset, jsign = sort_with_sign(tuple(dys))
        iset, isign = sort_with_sign(tuple(dxs))
        if jset is None or iset is None:
            return sp.Integer(0)
        return jsign * isign * self.terms.get((jset, iset), sp.Integer(0))

    def map_coefficients(self, fn):
        out = BigradedElement(self.chart)
        for (j, i), c in self.terms.items():
            out._add_term(j, i, fn(c))
        return out

    def sup_norm(self, base_k=5, fibre_k=8):
        if not self.terms:
            return 0.0
        Y, X = self.chart.sample_points(base_k, fibre_k)
        vals = compile_scalars(list(self.terms.values()), self.chart)(Y, X)
        return float(np.max(np.abs(vals)))

    def simplified_is_zero(self):
        return all(sp.simplify(c) == 0 for c in self.terms.values())

    def __repr__(self):
        if not self.terms:
            return "BigradedElement(0)"
        bits = []
        for (j, i), c in sorted(self.terms.items()):
            dy = "^".join(f"dy{k}" for k in j) or "1"
            dx = "^".join(f"dx{k}" for k in i) or "1"
            bits.append(f"({c}) {dy} (x) d/{dx}")
        return " + ".join(bits)


# ---------------------------------------------------------------------------
# ordinary differential forms (oracle side of the isomorphism)
# ---------------------------------------------------------------------------

class FormElement:
    """Sparse differential form sum_{J,K} c dy_J ^ dx_K on a chart."""

    __slots__ = ("chart", "terms")

    def __init__(self, chart: Chart, terms=None):
        self.chart = chart
        self.terms = {}
        if terms:
            for (jset, kset), coeff in terms.items():
                self.add_term(jset, kset, coeff)

    def add_term(self, jset, kset, coeff):
        jset, jsign = sort_with_sign(tuple(jset))
        if jset is None:
            return
        kset, ksign = sort_with_sign(tuple(kset))
        if kset is None:
            return
        key = (jset, kset)
        new = sp.expand(self.terms.get(key, 0) + jsign * ksign * coeff)
        if new == 0:
            self.terms.pop(key, None)
        else:
            self.terms[key] = new

    @classmethod
    def zero(cls, chart):
        return cls(chart)

    def __add__(self, other):
        require_same_chart(self.chart, other.chart)
        out = FormElement(self.chart)
        for (j, k), c in self.terms.items():
            out.add_term(j, k, c)
        for (j, k), c in other.terms.items():
            out.add_term(j, k, c)
        return out

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, factor):
        out = FormElement(self.chart)
        f = sp.sympify(factor)
        for (j, k), c in self.terms.items():
            out.add_term(j, k, f * c)
        return out

    def wedge(self, other):
        require_same_chart(self.chart, other.chart)
        out = FormElement(self.chart)
        for (j1, k1), c1 in self.terms.items():
            for (j2, k2), c2 in other.terms.items():
                jm, jsign = merge_with_sign(j1, j2)
                if jm is None:
                    continue
                km, ksign = merge_with_sign(k1, k2)
                if km is None:
                    continue
                # dy_J2 crosses dx_K1 when the factors are interleaved
                cross = (-1) ** (len(k1) * len(j2))
                out.add_term(jm, km, cross * jsign * ksign * c1 * c2)
        return out

    def exterior_derivative(self):
        out = FormElement(self.chart)
        ys, xs = self.chart.ys, self.chart.xs
        for (jset, kset), c in self.terms.items():
            for a, y in enumerate(ys, start=1):
                dc = sp.diff(c, y)
                if dc == 0:
                    continue
                jnew, sign = insert_with_sign(a, jset)
                if jnew is None:
                    continue
                out.add_term(jnew, kset, sign * dc)
            for a, x in enumerate(xs, start=1):
                dc = sp.diff(c, x)
                if dc == 0:
                    continue
                knew, sign = insert_with_sign(a, kset)
                if knew is None:
                    continue
                out.add_term(jset, knew, ((-1) ** len(jset)) * sign * dc)
        return out

    def contract_base_vector(self, j):
        """Front-slot contraction with the base vector d/dy_j."""
        out = FormElement(self.chart)
        for (jset, kset), c in self.terms.items():
            if j not in jset:
                continue
            pos = jset.index(j)
            rest = jset[:pos] + jset[pos + 1:]
            out.add_term(rest, kset, ((-1) ** pos) * c)
        return out

    def restrict_to_fibre(self):
        """Drop every term that still carries a dy factor."""
        out = FormElement(self.chart)
        for (jset, kset), c in self.terms.items():
            if not jset:
                out.add_term((), kset, c)
        return out

    def real_imag(self):
        re = FormElement(self.chart)
        im = FormElement(self.chart)
        for (j, k), c in self.terms.items():
            cr, ci = c.as_real_imag()
            if cr != 0:
                re.add_term(j, k, cr)
            if ci != 0:
                im.add_term(j, k, ci)
        return re, im

    def coefficient(self, dys=(), dxs=()):
        jset, jsign = sort_with_sign(tuple(dys))
        kset, ksign = sort_with_sign(tuple(dxs))
        if jset is None or kset is None:
            return sp.Integer(0)
        return jsign * ksign * self.terms.get((jset, kset), sp.Integer(0))

    def is_zero(self):
        return not self.terms

    def sup_norm(self, base_k=5, fibre_k=8):
        if not self.terms:
            return 0.0
        Y, X = self.chart.sample_points(base_k, fibre_k)
        vals = compile_scalars(list(self.terms.values()), self.chart)(Y, X)
        return float(np.max(np.abs(vals)))

    def __repr__(self):
        if not self.terms:
            return "FormElement(0)"
        bits = []
        for (j, k), c in sorted(self.terms.items()):
            gens = [f"dy{a}" for a in j] + [f"dx{a}" for a in k]
            bits.append(f"({c}) " + ("^".join(gens) or "1"))
        return " + ".join(bits)


def wedge_one_forms(chart, one_forms):
    """Wedge a list of 1-forms given as {('y'|'x', index): coeff} maps."""
    out = FormElement(chart)
    out.add_term((), (), 1)
    for form in one_forms:
        step = FormElement(chart)
        for (kind, idx), coeff in form.items():
            single = FormElement(chart)
            if kind == "y":
                single.add_term((idx,), (), coeff)
            else:
                single.add_term((), (idx,), coeff)
            step = step + out.wedge(single) if step.terms else out.wedge(single)
        out = step
    return out


# ---------------------------------------------------------------------------
# the isomorphism with forms
# ---------------------------------------------------------------------------

def to_form(element: BigradedElement) -> FormElement:
    """Send dy_J (x) d/dx_I to dy_J ^ i(d/dx_I)(dx_1 ^ ... ^ dx_n)."""
    n = element.chart.n
    out = FormElement(element.chart)
    for (jset, iset), c in element.terms.items():
        istar, sign = complement_sign(iset, n)
        out.add_term(jset, istar, sign * c)
    return out


def from_form(form: FormElement) -> BigradedElement:
    """Inverse of to_form: dy_J ^ dx_K comes from I = complement of K."""
    n = form.chart.n
    out = BigradedElement(form.chart)
    for (jset, kset), c in form.terms.items():
        iset = tuple(i for i in range(1, n + 1) if i not in kset)
        _, sign = complement_sign(iset, n)
        out._add_term(jset, iset, sign * c)
    return out


# ---------------------------------------------------------------------------
# graded operators
# ---------------------------------------------------------------------------

def d_x(element: BigradedElement) -> BigradedElement:
    """Fibre differential: bidegree shift (+1, 0).

    On a term c dy_J (x) d/dx_I it reads
    (-1)^{|J|} sum_{i in I} (dc/dx_i) dy_J (x) (d/dx_I with slot i removed),
    where removing slot i from the polyvector costs (-1)^{#{j in I : j > i}}.
    """
    out = BigradedElement(element.chart)
    xs = element.chart.xs
    for (jset, iset), c in element.terms.items():
        qsign = (-1) ** len(jset)
        for i in iset:
            dc = sp.diff(c, xs[i - 1])
            if dc == 0:
                continue
            above = sum(1 for j in iset if j > i)
            rest = tuple(j for j in iset if j != i)
            out._add_term(jset, rest, qsign * ((-1) ** above) * dc)
    return out


def d_y(element: BigradedElement) -> BigradedElement:
    """Base differential: bidegree shift (0, +1); prepends dy_k."""
    out = BigradedElement(element.chart)
    ys = element.chart.ys
    for (jset, iset), c in element.terms.items():
        for k in range(1, element.chart.n + 1):
            dc = sp.diff(c, ys[k - 1])
            if dc == 0:
                continue
            jnew, sign = insert_with_sign(k, jset)
            if jnew is None:
                continue
            out._add_term(jnew, iset, sign * dc)
    return out


def d_x_prime(element: BigradedElement) -> BigradedElement:
    """d_x rescaled by (-1)^(p+q+1) on the bidegree-(p, q) piece."""
    out = BigradedElement(element.chart)
    for (jset, iset), c in element.terms.items():
        sign = (-1) ** (-len(iset) + len(jset) + 1)
        piece = BigradedElement(element.chart)
        piece._add_term(jset, iset, sign * c)
        dpiece = d_x(piece)
        for (j2, i2), c2 in dpiece.terms.items():
            out._add_term(j2, i2, c2)
    return out


OPERATORS = {"d_x": d_x, "d_y": d_y, "d_x_prime": d_x_prime}
OPERATOR_SHIFTS = {"d_x": (1, 0), "d_y": (0, 1), "d_x_prime": (1, 0)}


@dataclass(frozen=True)
class GradedOperatorHandle:
    """Named handle onto one of the built-in graded operators."""

    name: str
    shift: tuple = None

    def __post_init__(self):
        if self.name not in OPERATORS:
            raise KeyError(f"unknown operator {self.name!r}")
        expected = OPERATOR_SHIFTS[self.name]
        if self.shift is None:
            object.__setattr__(self, "shift", expected)
        elif tuple(self.shift) != expected:
            raise DegreeError(
                f"operator {self.name} shifts bidegree by {expected}, not {self.shift}"
            )

    def __call__(self, element):
        return OPERATORS[self.name](element)


def _degree_pairing(deg_a, deg_b):
    return deg_a[0] * deg_b[0] + deg_a[1] * deg_b[1]


def phi2(op, a: BigradedElement, b: BigradedElement) -> BigradedElement:
    """Second-order defect  op(ab) - op(a)b - (+-) op(b)a + op(1)ab."""
    out = BigradedElement.zero(a.chart)
    unit = BigradedElement.unit(a.chart)
    op_unit = op(unit)
    for da, pa in a.homogeneous_pieces().items():
        for db, pb in b.homogeneous_pieces().items():
            sign = (-1) ** _degree_pairing(da, db)
            ab = pa * pb
            out = out + op(ab) - op(pa) * pb - (op(pb) * pa).scale(sign) + op_unit * ab
    return out


def phi3(op, a, b, c) -> BigradedElement:
    """Third-order defect via phi3(a,b,c) = phi2(a,bc) - phi2(a,b)c -+ phi2(a,c)b."""
    out = BigradedElement.zero(a.chart)
    for db, pb in b.homogeneous_pieces().items():
        for dc, pc in c.homogeneous_pieces().items():
            sign = (-1) ** _degree_pairing(db, dc)
            out = (
                out
                + phi2(op, a, pb * pc)
                - phi2(op, a, pb) * pc
                - (phi2(op, a, pc) * pb).scale(sign)
            )
    return out


def operator_order_defect(handle, r, args):
    """Return Phi^r of the named operator on the given elements (r in {2, 3})."""
    if isinstance(handle, str):
        handle = GradedOperatorHandle(handle)
    if r == 2:
        if len(args) != 2:
            raise DegreeError("order-2 defect needs exactly two arguments")
        return phi2(handle, args[0], args[1])
    if r == 3:
        if len(args) != 3:
            raise DegreeError("order-3 defect needs exactly three arguments")
        return phi3(handle, args[0], args[1], args[2])
    raise DegreeError(f"unsupported defect order {r}")


def bracket(a: BigradedElement, b: BigradedElement) -> BigradedElement:
    """The bracket: second-order defect of d_x'."""
    return phi2(d_x_prime, a, b)


def vector_field_bracket(a: BigradedElement, b: BigradedElement) -> BigradedElement:
    """Direct Lie-bracket formula for bidegree (-1, 1) elements.

    For v = sum v_il dy_l (x) d/dx_i, w likewise, the result is
    sum_{l,m} [v_l, w_m] dy_l ^ dy_m with the usual vector-field bracket on
    the fibre.  Serves as an independent check of the operator bracket.
    """
    for e in (a, b):
        if not e.is_homogeneous((-1, 1)):
            raise DegreeError("vector_field_bracket needs bidegree (-1, 1) inputs")
    chart = a.chart
    xs = chart.xs
    out = BigradedElement(chart)
    for (jl, il), cv in a.terms.items():
        for (jm, im), cw in b.terms.items():
            l, m = jl[0], jm[0]
            i, jj = il[0], im[0]
            # v_{i,l} d(w_{j,m})/dx_i  d/dx_j   -   w_{i,m} d(v_{j,l})/dx_i d/dx_j
            term1 = cv * sp.diff(cw, xs[i - 1])
            if term1 != 0:
                out._add_term((l, m), (jj,), term1)
            term2 = cw * sp.diff(cv, xs[jj - 1])
            if term2 != 0:
                out._add_term((l, m), (i,), -term2)
    return out


def exp_nilpotent(beta: BigradedElement) -> BigradedElement:
    """exp(beta) = sum beta^p / p! for a bidegree (-1, 1) element.

    The series truncates at p = n since dy factors exhaust the base axes.
    """
    if not beta.is_homogeneous((-1, 1)):
        raise DegreeError("exponential is defined for bidegree (-1, 1) elements")
    n = beta.chart.n
    out = BigradedElement.unit(beta.chart)
    power = BigradedElement.unit(beta.chart)
    for p in range(1, n + 1):
        power = power * beta
        out = out + power.scale(sp.Rational(1, sp.factorial(p)))
    return out


def decomposable_form(chart, beta_matrix, scale=1):
    """Direct expansion of scale * wedge_i (dx_i + sum_j beta[i][j] dy_j)."""
    forms = []
    for i in range(chart.n):
        form = {("x", i + 1): sp.Integer(1)}
        for j in range(chart.n):
            c = sp.sympify(beta_matrix[i][j])
            if c != 0:
                form[("y", j + 1)] = c
        forms.append(form)
    return wedge_one_forms(chart, forms).scale(scale)


def standard_symplectic_form(chart) -> FormElement:
    """The canonical chart symplectic form sum_i dx_i ^ dy_i."""
    out = FormElement(chart)
    for i in range(1, chart.n + 1):
        # dx_i ^ dy_i = -dy_i ^ dx_i in the dy-first ordering
        out.add_term((i,), (i,), -1)
    return out
