"""Base metrics from fibre periods, dual structures, and the coupling integral.

The base metric h pairs -i(v)omega with i(w)Im(Omega) over a fibre; dividing
by the fibre volume gives the normalised metric h_n.  Periods of Im(Omega_n)
over (n-1)-cycles embed the cycle lattice into the base cotangent spaces;
h_n re-expresses that embedding through the tangent-cotangent pairing
e_i^* <-> (-1)^(i-1) e_1 ^ ... e_i-hat ... ^ e_n  (front-slot order; the
opposite order only flips signs and is exposed as a switch).

Dualisation is implemented for fibre-constant metrics: the dual inverse
metric matrix is h_n itself, and the dual fibre volume carries the lattice
covolume det(h_n), which produces the volume reciprocity Vol * dual-Vol = 1.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from itertools import permutations, product as iproduct

import numpy as np
import sympy as sp

from .algebra import to_form
from .charts import Chart
from .fields import compile_scalars
from .quadrature import (
    fibre_integral,
    gauss_legendre_nodes,
    subtorus_integral,
)
from .semiflat import (
    DEFAULT_TOL,
    BetaStructure,
    SemiflatReport,
    build_omega,
    closedness_residuals,
    omega_form,
    require_compatible,
)

PAIRING_ORDERS = ("lambda-first", "lambda-last")
DEFAULT_PAIRING = "lambda-first"


class DualityError(ValueError):
    pass


@dataclass(frozen=True)
class CycleSpec:
    """Integer fibre cycle: degree 1 (circle basis) or n-1 (omitted-axis basis).

    For degree n-1, coefficient i multiplies the coordinate subtorus spanned
    by all axes except i, oriented as e_1 ^ ... e_i-hat ... ^ e_n.  For n = 2
    the two degrees coincide and coefficients are read in the circle basis.
    """

    degree: int
    coefficients: tuple
    at: tuple = None

    def __post_init__(self):
        if all(c == 0 for c in self.coefficients):
            raise DualityError("cycle coefficient vector must be nonzero")
        object.__setattr__(self, "coefficients", tuple(int(c) for c in self.coefficients))


def _omitted_axis_coefficients(gamma: CycleSpec, n):
    """Coefficients in the omitted-axis basis of (n-1)-cycles."""
    if len(gamma.coefficients) != n:
        raise DualityError("cycle coefficients must have one entry per axis")
    if gamma.degree == n - 1 and n != 2:
        return list(gamma.coefficients)
    if gamma.degree == 1:
        # circle e_i equals the omitted-axis generator omitting every other
        # axis only when n = 2; higher n needs the (n-1)-basis directly
        if n == 2:
            return [gamma.coefficients[1], gamma.coefficients[0]]
        raise DualityError("degree-1 cycles pair with (n-1)-forms only when n = 2")
    if gamma.degree == n - 1 and n == 2:
        return [gamma.coefficients[1], gamma.coefficients[0]]
    raise DualityError(f"unsupported cycle degree {gamma.degree} for n = {n}")


def cycle_tangent_vector(gamma: CycleSpec, n, pairing=DEFAULT_PAIRING):
    """Tangent-vector coefficients of a degree (n-1) cycle under the pairing."""
    if pairing not in PAIRING_ORDERS:
        raise DualityError(f"unknown pairing order {pairing!r}")
    omit = _omitted_axis_coefficients(gamma, n)
    out = []
    for i in range(1, n + 1):
        sign = (-1) ** (i - 1) if pairing == "lambda-first" else (-1) ** (n - i)
        out.append(sign * omit[i - 1])
    return out


# ---------------------------------------------------------------------------
# metrics from fibre integrals
# ---------------------------------------------------------------------------

@dataclass
class MetricOnBase:
    """Symmetric base metric; symbolic entries when available, else sampled."""

    matrix: object  # sympy Matrix or None
    provenance: str
    samples: object = None  # (points, stacked matrices)

    def at(self, chart, y_point):
        if self.matrix is not None:
            subs = {chart.ys[i]: y_point[i] for i in range(chart.n)}
            return np.array(
                [[complex(self.matrix[i, j].subs(subs)).real for j in range(chart.n)]
                 for i in range(chart.n)])
        pts, mats = self.samples
        idx = int(np.argmin(np.sum((pts - np.asarray(y_point)) ** 2, axis=1)))
        return mats[idx]


def _im_omega_coefficient_forms(bs: BetaStructure):
    """For each base axis j, the fibre (n-1)-form of i(d/dy_j) Im Omega.

    Returns coeffs[j][i] = coefficient of dx_{1..n minus i} in the
    restriction to the fibre, read off the dy_j ^ dx_K terms of Im Omega.
    """
    omega_el = build_omega(bs)
    form = to_form(omega_el)
    _, im_form = form.real_imag()
    n = bs.n
    coeffs = [[sp.Integer(0)] * n for _ in range(n)]
    for j in range(1, n + 1):
        contracted = im_form.contract_base_vector(j).restrict_to_fibre()
        for i in range(1, n + 1):
            kset = tuple(a for a in range(1, n + 1) if a != i)
            coeffs[j - 1][i - 1] = contracted.coefficient(dys=(), dxs=kset)
    return coeffs


def mclean_metrics(bs: BetaStructure, resolution=16, y_points=None,
                   tol=DEFAULT_TOL):
    """Base metric by two routes, the normalised metric, and fibre data.

    Route one integrates the pairing -i(d/dy_i) omega ^ i(d/dy_j) Im Omega
    over the fibre; route two integrates V * gInv_ij.  Returns a report
    carrying (h, h_n, theta, vol) plus the cross-route agreement residual.
    """
    require_compatible(bs, tol)
    chart, n = bs.chart, bs.n
    if y_points is None:
        y_points = chart.base_grid(3)
    coeffs = _im_omega_coefficient_forms(bs)
    closed_gap = omega_form(bs).exterior_derivative().sup_norm(3, 4)
    if closed_gap > tol:
        warnings.warn(
            f"volume form is not closed (residual {closed_gap:.2e}); "
            "the base metric is still computed but loses its harmonic meaning",
            stacklevel=2)

    # symbolic fibre integrals (exact for the trig grammar) where possible
    symbolic_ok = True
    h_sym = sp.zeros(n, n)
    vol_sym = None
    try:
        for i in range(n):
            for j in range(n):
                integrand = sp.expand(bs.volume_density * bs.g_inv[i][j])
                h_sym[i, j] = _fibre_symbolic_integral(integrand, chart)
        vol_sym = _fibre_symbolic_integral(bs.volume_density, chart)
    except _SymbolicIntegrationError:
        symbolic_ok = False

    pts = np.asarray(y_points, dtype=float)
    h_quad = np.zeros((len(pts), n, n))
    h_formula = np.zeros((len(pts), n, n))
    vols = np.zeros(len(pts))
    for p, y in enumerate(pts):
        for i in range(n):
            for j in range(n):
                # pairing route: h_ij picks the dx_{complement of axis i+1}
                # coefficient of i(d/dy_j) Im Omega, oriented by dx_i ^
                # dx_{complement} = (-1)^i dx_{1..n} (0-based i)
                val = fibre_integral(coeffs[j][i], chart, y, resolution)
                h_quad[p, i, j] = ((-1) ** i) * val.real
                h_formula[p, i, j] = fibre_integral(
                    bs.volume_density * bs.g_inv[i][j], chart, y, resolution).real
        vols[p] = fibre_integral(bs.volume_density, chart, y, resolution).real
    agreement = float(np.max(np.abs(h_quad - h_formula))) if len(pts) else 0.0

    theta = fibre_integral(sp.Integer(1), chart, pts[0], resolution).real

    report = SemiflatReport()
    report.add("metric_route_agreement", agreement, tol)
    report.add("metric_symmetry",
               float(np.max(np.abs(h_quad - np.transpose(h_quad, (0, 2, 1))))), tol)

    h = MetricOnBase(h_sym if symbolic_ok else None,
                     "closed-form" if symbolic_ok else "quadrature",
                     samples=(pts, h_formula))
    hn_samples = (pts, h_formula / vols[:, None, None])
    if symbolic_ok:
        hn_matrix = sp.Matrix(n, n, lambda i, j: sp.cancel(h_sym[i, j] / vol_sym))
        h_n = MetricOnBase(hn_matrix, "closed-form", samples=hn_samples)
    else:
        h_n = MetricOnBase(None, "quadrature", samples=hn_samples)
    vol = vol_sym if symbolic_ok else None
    return {
        "h": h,
        "h_n": h_n,
        "theta": theta,
        "vol": vol,
        "vol_samples": (pts, vols),
        "report": report,
    }


class _SymbolicIntegrationError(Exception):
    pass


def _fibre_symbolic_integral(expr, chart: Chart):
    """Exact integral over the unit fibre cube; raises if sympy cannot do it."""
    out = sp.sympify(expr)
    for x in chart.xs:
        if x not in out.free_symbols:
            continue
        try:
            out = sp.integrate(out, (x, 0, 1))
        except Exception as exc:
            raise _SymbolicIntegrationError(str(exc))
        if out.has(sp.Integral):
            raise _SymbolicIntegrationError("unevaluated integral")
    return sp.expand(out)


# ---------------------------------------------------------------------------
# period embeddings
# ---------------------------------------------------------------------------

def period_one_form(bs: BetaStructure, gamma: CycleSpec, resolution=16,
                    y_points=None, tol=1e-6):
    """Covector field psi(gamma): v -> -(1/Vol) * period of i(v) Im Omega.

    Returns (points, values) with values[p][j] the dy_j component at the
    p-th base sample, plus a finite-difference closedness residual.
    """
    require_compatible(bs)
    chart, n = bs.chart, bs.n
    if n < 2:
        raise DualityError("period embedding needs n >= 2")
    omit = _omitted_axis_coefficients(gamma, n)
    coeffs = _im_omega_coefficient_forms(bs)
    if y_points is None:
        k = 5
        axes = [np.linspace(float(lo), float(hi), k) for lo, hi in chart.box]
        y_points = np.array(list(iproduct(*axes)))
    pts = np.asarray(y_points, dtype=float)
    vals = np.zeros((len(pts), n))
    for p, y in enumerate(pts):
        vol = fibre_integral(bs.volume_density, chart, y, resolution).real
        for j in range(n):
            total = 0.0
            for i in range(1, n + 1):
                if omit[i - 1] == 0:
                    continue
                period = subtorus_integral(coeffs[j][i - 1], chart, y,
                                           omit_axis=i, resolution=resolution)
                total += omit[i - 1] * period.real
            vals[p, j] = -total / vol
    residual = _fd_exterior_derivative_residual(pts, vals, chart)
    return pts, vals, residual


def _fd_exterior_derivative_residual(pts, vals, chart):
    """Max |d(psi)| by central differences on the regular base grid."""
    n = chart.n
    if n < 2:
        return 0.0
    k = round(len(pts) ** (1.0 / n))
    if k ** n != len(pts) or k < 3:
        return float("nan")
    grid = vals.reshape(*([k] * n), n)
    steps = [(float(hi) - float(lo)) / (k - 1) for lo, hi in chart.box]
    worst = 0.0
    for a in range(n):
        for b in range(a + 1, n):
            d_a_psib = np.gradient(grid[..., b], steps[a], axis=a, edge_order=2)
            d_b_psia = np.gradient(grid[..., a], steps[b], axis=b, edge_order=2)
            worst = max(worst, float(np.max(np.abs(d_a_psib - d_b_psia))))
    return worst


def period_additivity_defect(bs: BetaStructure, g1: CycleSpec, g2: CycleSpec,
                             resolution=16):
    """|psi(g1 + g2) - psi(g1) - psi(g2)| at a few base points."""
    summed = CycleSpec(g1.degree,
                       tuple(a + b for a, b in zip(g1.coefficients, g2.coefficients)))
    pts = bs.chart.base_grid(2)
    _, v12, _ = period_one_form(bs, summed, resolution, y_points=pts)
    _, v1, _ = period_one_form(bs, g1, resolution, y_points=pts)
    _, v2, _ = period_one_form(bs, g2, resolution, y_points=pts)
    return float(np.max(np.abs(v12 - v1 - v2)))


# ---------------------------------------------------------------------------
# duality identities
# ---------------------------------------------------------------------------

def duality_identities(bs: BetaStructure, gamma: CycleSpec, alpha,
                       resolution=16, pairing=DEFAULT_PAIRING,
                       tol=DEFAULT_TOL) -> SemiflatReport:
    """Three residuals tying periods, the base metric, and the embedding.

    alpha: fibre (n-1)-form as a map {omitted_axis: coefficient expr}; the
    omitted_axis i entry multiplies dx_1 ^ ... dx_i-hat ... ^ dx_n.
    """
    require_compatible(bs)
    chart, n = bs.chart, bs.n
    y0 = gamma.at if gamma.at is not None else tuple(float(c) for c in chart.center)
    omit = _omitted_axis_coefficients(gamma, n)
    v = cycle_tangent_vector(gamma, n, pairing)
    report = SemiflatReport()

    alpha = {int(i): sp.sympify(c) for i, c in alpha.items()}

    # cycle integral of alpha: subtorus integrals weighted by cycle coeffs
    lhs = 0.0
    for i in range(1, n + 1):
        if omit[i - 1] == 0:
            continue
        for ax, c in alpha.items():
            if ax != i:
                continue  # dx_{complement ax} restricted to T_{omit i} vanishes unless ax == i
            lhs += omit[i - 1] * subtorus_integral(c, chart, y0, omit_axis=i,
                                                   resolution=resolution).real

    # -integral over the fibre of i(v(gamma)) omega ^ alpha, i(v) omega = -sum v_i dx_i
    rhs = 0.0
    for i in range(1, n + 1):
        if v[i - 1] == 0:
            continue
        c = alpha.get(i, 0)
        if c == 0:
            continue
        # dx_i ^ dx_{complement i} = (-1)^(i-1) dx_{1..n}
        rhs += v[i - 1] * ((-1) ** (i - 1)) * fibre_integral(
            c, chart, y0, resolution).real
    report.add("cycle_vs_fibre_pairing", abs(lhs - rhs), tol)
    report.notes["cycle_integral"] = lhs
    report.notes["fibre_pairing_integral"] = rhs

    # period covector vs -h_n(v(gamma), .)
    mm = mclean_metrics(bs, resolution, y_points=[y0])
    hn = mm["h_n"].samples[1][0]
    _, psi, _ = period_one_form(bs, gamma, resolution, y_points=[y0])
    defect = psi[0] + hn @ np.asarray(v, dtype=float)
    report.add("period_vs_metric_embedding", float(np.max(np.abs(defect))), tol)

    # sampled class of Im Omega_n vs h_n, componentwise
    coeffs = _im_omega_coefficient_forms(bs)
    vol = fibre_integral(bs.volume_density, chart, y0, resolution).real
    cls = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            per = subtorus_integral(coeffs[i][j], chart, y0, omit_axis=j + 1,
                                    resolution=resolution).real
            cls[i, j] = ((-1) ** j) * per / vol
    report.add("normalised_class_vs_metric", float(np.max(np.abs(cls - hn))), tol)
    report.notes["class_matrix"] = cls.tolist()
    return report


def dual_symplectic_class_check(bs: BetaStructure, resolution=16, tol=DEFAULT_TOL):
    """Re-embed the cycle lattice by periods and compare the dual pairing.

    The dual fibration carries the standard symplectic form; pairing its
    cycles (segments to the period covectors) against base vectors must
    reproduce the period matrix of Im Omega_n with the opposite sign.
    """
    chart, n = bs.chart, bs.n
    y0 = tuple(float(c) for c in chart.center)
    pmat = np.zeros((n, n))
    for i in range(1, n + 1):
        gamma = CycleSpec(n - 1, tuple(1 if a == i else 0 for a in range(1, n + 1)))
        if n == 2:
            # constructor expects circle basis when n = 2
            gamma = CycleSpec(1, (gamma.coefficients[1], gamma.coefficients[0]))
        _, psi, _ = period_one_form(bs, gamma, resolution, y_points=[y0])
        pmat[i - 1] = psi[0]
    # dual-side pairing: integral over the straight cycle 0 -> psi_i of
    # i(d/dy_j) omega_dual = -dxv_j, which is -psi_i[j]
    dual_pairing = -pmat
    im_omega_pairing = -pmat  # periods of Im Omega_n define the embedding
    report = SemiflatReport()
    report.add("dual_symplectic_class",
               float(np.max(np.abs(dual_pairing - im_omega_pairing))), tol)
    return report


# ---------------------------------------------------------------------------
# symmetric representatives of tensor classes
# ---------------------------------------------------------------------------

@dataclass
class SymTensorField:
    """sum alpha[i][j] dy_i (x) dy_j with y-only entries."""

    chart: Chart
    entries: list

    def __post_init__(self):
        n = self.chart.n
        ent = [[sp.expand(sp.sympify(self.entries[i][j])) for j in range(n)]
               for i in range(n)]
        for row in ent:
            for e in row:
                if set(e.free_symbols) & set(self.chart.xs):
                    raise DualityError("tensor entries must depend on y only")
        self.entries = ent

    def antisymmetric_defect(self):
        n = self.chart.n
        return [[sp.expand(self.entries[j][i] - self.entries[i][j]) for j in range(n)]
                for i in range(n)]

    def is_symmetric(self):
        return all(d == 0 for row in self.antisymmetric_defect() for d in row)

    def is_gauss_manin_closed(self):
        ys = self.chart.ys
        n = self.chart.n
        for j in range(n):
            for i in range(n):
                for k in range(i + 1, n):
                    if sp.expand(sp.diff(self.entries[i][j], ys[k])
                                 - sp.diff(self.entries[k][j], ys[i])) != 0:
                        return False
        return True


def wedge_with_minus_omega(alpha: SymTensorField):
    """Base 2-form image sum_{i<j} (alpha_ij - alpha_ji) dy_i ^ dy_j."""
    n = alpha.chart.n
    out = {}
    for i in range(n):
        for j in range(i + 1, n):
            c = sp.expand(alpha.entries[i][j] - alpha.entries[j][i])
            if c != 0:
                out[(i + 1, j + 1)] = c
    return out


def _one_form_potential(rho, chart, axis=0):
    """beta with d(beta) = rho for a closed antisymmetric matrix 2-form rho.

    Recursive gauge: the first component vanishes, the rest integrate along
    the first axis from the box centre; the remainder is axis-independent
    and recurses on the later coordinates.
    """
    n = chart.n
    ys = chart.ys
    beta = [sp.Integer(0)] * n
    if axis >= n - 1:
        return beta
    t = sp.Dummy("t", real=True)
    c0 = chart.center[axis]
    for j in range(axis + 1, n):
        seg = sp.integrate(rho[axis][j].subs(ys[axis], t), (t, c0, ys[axis]))
        beta[j] = sp.expand(seg)
    rest = [[sp.expand(rho[i][j].subs(ys[axis], c0)) for j in range(n)] for i in range(n)]
    tail = _one_form_potential(rest, chart, axis + 1)
    return [sp.expand(beta[k] + tail[k]) for k in range(n)]


def symmetric_class(alpha: SymTensorField, mode="test"):
    """Antisymmetry test or symmetrisation of a tensor-class representative.

    test mode returns (defect matrix, base 2-form image under wedging with
    the negated symplectic form).  symmetrize mode adds the gradient of a
    swapped potential so the output is exactly symmetric and differs from
    the input by a total derivative.
    """
    if mode == "test":
        return alpha.antisymmetric_defect(), wedge_with_minus_omega(alpha)
    if mode != "symmetrize":
        raise DualityError(f"unknown mode {mode!r}")
    if not alpha.is_gauss_manin_closed():
        raise DualityError(
            "representative is not a tensor cocycle (columns are not closed one-forms)")
    chart = alpha.chart
    n = chart.n
    ys = chart.ys
    rho = [[sp.expand(alpha.entries[j][i] - alpha.entries[i][j]) for j in range(n)]
           for i in range(n)]
    beta = _one_form_potential(rho, chart)
    for i in range(n):
        for j in range(n):
            got = sp.expand(sp.diff(beta[j], ys[i]) - sp.diff(beta[i], ys[j]) - rho[i][j])
            if sp.simplify(got) != 0:
                raise DualityError("antiderivative not expressible in the grammar "
                                   "(representative is not a tensor cocycle)")
    out = [[sp.expand(alpha.entries[i][j] + sp.diff(beta[j], ys[i]))
            for j in range(n)] for i in range(n)]
    result = SymTensorField(chart, out)
    if not result.is_symmetric():
        raise DualityError("symmetrisation failed to produce a symmetric tensor")
    return result


# ---------------------------------------------------------------------------
# potential-generated structures and dualisation
# ---------------------------------------------------------------------------

@dataclass
class HitchinPotential:
    """Convex potential on the base; its Hessian is the inverse fibre metric."""

    chart: Chart
    phi: object

    def __post_init__(self):
        self.phi = sp.expand(sp.sympify(self.phi))
        if set(self.phi.free_symbols) & set(self.chart.xs):
            raise DualityError("potential must depend on the base variables only")

    @property
    def hessian(self):
        ys = self.chart.ys[: self.chart.n]
        return [[sp.expand(sp.diff(self.phi, a, b)) for b in ys] for a in ys]


def hitchin(potential: HitchinPotential, b_field: SymTensorField = None,
            tol=DEFAULT_TOL):
    """Structure with inverse metric Hess(phi), optionally twisted by b.

    Returns (structure, info): info carries the determinant-constancy
    residual of the Hessian, which decides closedness in action-angle
    coordinates, and the closedness report itself.
    """
    chart = potential.chart
    hess = potential.hessian
    n = chart.n
    if b_field is not None:
        if not b_field.is_symmetric():
            raise DualityError("twist tensor must be symmetric")
        b = b_field.entries
    else:
        b = [[sp.Integer(0)] * n for _ in range(n)]
    beta = [[b[i][j] + sp.I * hess[i][j] for j in range(n)] for i in range(n)]
    bs = BetaStructure(chart, beta)
    require_compatible(bs, tol)

    det = sp.expand(sp.Matrix(hess).det())
    centre_subs = {chart.ys[i]: chart.center[i] for i in range(n)}
    det_centre = det.subs(centre_subs)
    from .fields import sup_norm_scalars
    det_residual = sup_norm_scalars([sp.expand(det - det_centre)], chart)
    closed = closedness_residuals(bs, tol)
    info = {
        "determinant_residual": det_residual,
        "determinant_value": det_centre,
        "closedness": closed,
        "criterion_consistent":
            (det_residual < tol) == closed.verdict("full_closedness"),
    }
    return bs, info


def dual_structure_check(bs: BetaStructure, resolution=16, tol=DEFAULT_TOL,
                         reciprocity_tol=1e-10) -> SemiflatReport:
    """Dualise a fibre-constant structure and verify metric and volume duality.

    The dual inverse metric is the normalised base metric h_n; the dual
    fibre volume integrates over the period lattice, i.e. carries the
    covolume factor det(h_n).
    """
    require_compatible(bs, tol)
    chart, n = bs.chart, bs.n
    xs = chart.xs
    for row in bs.g_inv:
        for e in row:
            if set(e.free_symbols) & set(xs):
                raise DualityError("dualisation needs a fibre-constant metric")
    h_n = [[sp.expand(bs.g_inv[i][j]) for j in range(n)] for i in range(n)]
    dual = BetaStructure(chart, [[sp.I * h_n[i][j] for j in range(n)] for i in range(n)])

    report = SemiflatReport()
    mm = mclean_metrics(dual, resolution)
    pts, mats = mm["h_n"].samples
    expect = np.zeros_like(mats)
    fn = compile_scalars([h_n[i][j] for i in range(n) for j in range(n)], chart)
    vals = fn(pts, np.zeros_like(pts)).real.T.reshape(len(pts), n, n)
    report.add("dual_metric_match", float(np.max(np.abs(mats - vals))), tol)

    det_hn = sp.expand(sp.Matrix(h_n).det())
    vols = np.zeros(len(pts))
    dual_vols = np.zeros(len(pts))
    for p, y in enumerate(pts):
        vols[p] = fibre_integral(bs.volume_density, chart, y, resolution).real
        covol = complex(det_hn.subs({chart.ys[i]: y[i] for i in range(n)})).real
        dual_vols[p] = fibre_integral(dual.volume_density, chart, y, resolution).real * covol
    report.add("volume_reciprocity", float(np.max(np.abs(vols * dual_vols - 1))),
               reciprocity_tol)
    report.notes["vol_samples"] = vols.tolist()
    report.notes["dual_vol_samples"] = dual_vols.tolist()
    return report


# ---------------------------------------------------------------------------
# coupling integral over twist directions
# ---------------------------------------------------------------------------

ORIENTATION_SIGN = {1: 1, 2: -1, 3: -1}  # (-1)^(n(n-1)/2)


class YukawaFamily:
    """Affine family beta(b) = base + sum_k b_k * direction_k."""

    def __init__(self, base: BetaStructure, directions):
        self.base = base
        n = base.n
        if len(directions) != n:
            raise DualityError("need one twist direction per base axis")
        self.directions = [
            [[sp.expand(sp.sympify(d[i][j])) for j in range(n)] for i in range(n)]
            for d in directions
        ]

    @classmethod
    def from_callable(cls, fn, base_chart, n, probes=(0.5, 1.0, 2.0)):
        """Sample a callable family and verify affinity in the parameters."""
        zero = fn([0.0] * n)
        base = BetaStructure(base_chart, zero)
        directions = []
        for k in range(n):
            e_k = [0.0] * n
            e_k[k] = 1.0
            at_one = fn(e_k)
            direction = [[sp.expand(sp.sympify(at_one[i][j]) - base.beta[i][j])
                          for j in range(n)] for i in range(n)]
            directions.append(direction)
        fam = cls(base, directions)
        for t in probes:
            for k in range(n):
                e_k = [0.0] * n
                e_k[k] = t
                got = fn(e_k)
                for i in range(n):
                    for j in range(n):
                        expect = base.beta[i][j] + t * directions[k][i][j]
                        if sp.simplify(sp.sympify(got[i][j]) - expect) != 0:
                            raise DualityError("family is not affine in the twist parameters")
        return fam


def _direction_determinant_sum(family: YukawaFamily):
    n = family.base.n
    total = sp.Integer(0)
    for perm in permutations(range(n)):
        m = sp.Matrix(n, n, lambda i, j: family.directions[perm[i]][i][j])
        total += m.det()
    return sp.expand(total)


def yukawa(family: YukawaFamily, resolution=16, base_resolution=8):
    """Coupling integral over the chart of V^2 times the direction determinants.

    Returns (value, oracle) where oracle is the constant-integrand closed
    form (None when the integrand is not constant).
    """
    bs = family.base
    require_compatible(bs)
    chart, n = bs.chart, bs.n
    sign = ORIENTATION_SIGN[n]
    det_sum = _direction_determinant_sum(family)
    integrand = sp.expand(bs.volume_density ** 2 * det_sum)

    oracle = None
    if not integrand.free_symbols:
        oracle = complex(sign * integrand * chart.box_volume)

    # tensor quadrature: Gauss-Legendre on the base, uniform grid on the fibre
    axes = [gauss_legendre_nodes(float(lo), float(hi), base_resolution)
            for lo, hi in chart.box]
    ypts = np.array(list(iproduct(*[a[0] for a in axes])))
    ywts = np.array([float(np.prod(w)) for w in iproduct(*[a[1] for a in axes])])
    xpts = np.array(list(iproduct(*[np.arange(resolution) / resolution] * n)))
    fn = compile_scalars([integrand], chart)
    total = 0.0 + 0.0j
    for y, w in zip(ypts, ywts):
        Y = np.tile(y, (len(xpts), 1))
        total += w * np.mean(fn(Y, xpts)[0])
    return sign * complex(total), oracle
