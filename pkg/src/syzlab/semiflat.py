"""Semi-flat structures from a beta-matrix and their structure equations.

A BetaStructure packages the n x n complex matrix beta = b + i*gInv on a
chart: b is the Ehresmann-connection matrix, gInv the inverse fibre metric.
The candidate holomorphic volume form is Omega = V * exp(beta) with
V = 1/sqrt(det Im beta), and d(Omega) = 0 decomposes into an integrability
part (a bidegree (-1,2) residual) plus a divergence-type condition on V and
V*beta, whose real and imaginary parts are the connection-curvature,
covariant-metric, fibre-harmonic and parallel-volume residuals.

All residual norms are sup-norms of coefficient functions over the chart's
deterministic sample grid.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import sympy as sp

from .algebra import (
    BigradedElement,
    FormElement,
    bracket,
    d_x_prime,
    d_y,
    decomposable_form,
    exp_nilpotent,
    standard_symplectic_form,
    wedge_one_forms,
)
from .charts import Chart
from .fields import require_fibre_periodic, sup_norm_scalars

DEFAULT_TOL = 1e-8
POSITIVITY_FLOOR = 1e-9


class CompatibilityError(ValueError):
    """Raised when beta is not symmetric positive-imaginary where required."""


@dataclass
class ResidualCheck:
    value: float
    tol: float

    @property
    def passed(self):
        return bool(self.value < self.tol)

    def as_dict(self):
        return {"value": self.value, "tol": self.tol, "passed": self.passed}


@dataclass
class SemiflatReport:
    """Named residual norms with verdicts at their tolerances."""

    checks: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def add(self, name, value, tol=DEFAULT_TOL):
        self.checks[name] = ResidualCheck(float(value), float(tol))

    def __getitem__(self, name):
        return self.checks[name]

    def verdict(self, name):
        return self.checks[name].passed

    @property
    def all_passed(self):
        return all(c.passed for c in self.checks.values())

    def as_dict(self):
        out = {k: v.as_dict() for k, v in sorted(self.checks.items())}
        if self.notes:
            out["notes"] = {k: self.notes[k] for k in sorted(self.notes)}
        return out


class BetaStructure:
    """beta = b + i*gInv on a chart, with derived V and volume form."""

    def __init__(self, chart: Chart, beta, compatible=True):
        self.chart = chart
        n = chart.n
        beta = [[sp.expand(sp.sympify(beta[i][j])) for j in range(n)] for i in range(n)]
        for row in beta:
            for entry in row:
                require_fibre_periodic(entry, n)
        self.beta = beta
        self.compatible_flag = bool(compatible)

    @property
    def n(self):
        return self.chart.n

    @property
    def b_matrix(self):
        return [[entry.as_real_imag()[0] for entry in row] for row in self.beta]

    @property
    def g_inv(self):
        return [[entry.as_real_imag()[1] for entry in row] for row in self.beta]

    @property
    def det_g_inv(self):
        return sp.expand(sp.Matrix(self.g_inv).det())

    @property
    def volume_density(self):
        """V = sqrt(det g) = 1/sqrt(det Im beta); always derived, never supplied."""
        return 1 / sp.sqrt(self.det_g_inv)

    def beta_element(self) -> BigradedElement:
        return BigradedElement.from_matrix(self.chart, self.beta)

    def b_element(self) -> BigradedElement:
        return BigradedElement.from_matrix(self.chart, self.b_matrix)

    def g_inv_element(self) -> BigradedElement:
        return BigradedElement.from_matrix(self.chart, self.g_inv)

    def theta_forms(self):
        """The candidate (1,0)-forms dx_i + sum_j beta_ij dy_j as coefficient maps."""
        forms = []
        for i in range(self.n):
            form = {("x", i + 1): sp.Integer(1)}
            for j in range(self.n):
                if self.beta[i][j] != 0:
                    form[("y", j + 1)] = self.beta[i][j]
            forms.append(form)
        return forms

    def imbeta_samples(self, base_k=5, fibre_k=8):
        """Stack of Im(beta) matrices over the sample grid, plus the points."""
        from .fields import compile_scalars

        Y, X = self.chart.sample_points(base_k, fibre_k)
        exprs = [e for row in self.g_inv for e in row]
        vals = compile_scalars(exprs, self.chart)(Y, X).real
        mats = vals.T.reshape(len(Y), self.n, self.n)
        return mats, Y, X

    def min_imbeta_eigenvalue(self, base_k=5, fibre_k=8):
        mats, Y, X = self.imbeta_samples(base_k, fibre_k)
        sym = 0.5 * (mats + np.transpose(mats, (0, 2, 1)))
        eigs = np.linalg.eigvalsh(sym)
        idx = int(np.argmin(eigs[:, 0]))
        return float(eigs[idx, 0]), (Y[idx], X[idx])


def _symmetry_defects(matrix, n):
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            out.append(sp.expand(matrix[i][j] - matrix[j][i]))
    return out


def pointwise_checks(bs: BetaStructure, v_override=None, tol=DEFAULT_TOL,
                     base_k=5, fibre_k=8) -> SemiflatReport:
    """Symmetry, positivity, and volume-normalisation residuals at samples.

    v_override substitutes a user-supplied density in the normalisation
    check V^2 * det(Im beta) = 1; it exists only to build negative tests.
    """
    rep = SemiflatReport()
    rep.add("symmetry", sup_norm_scalars(_symmetry_defects(bs.beta, bs.n), bs.chart,
                                         base_k, fibre_k), tol)
    mineig, worst = bs.min_imbeta_eigenvalue(base_k, fibre_k)
    rep.checks["positivity"] = ResidualCheck(-mineig, -POSITIVITY_FLOOR)
    rep.notes["min_imbeta_eigenvalue"] = mineig
    rep.notes["worst_point"] = (tuple(map(float, worst[0])), tuple(map(float, worst[1])))
    V = sp.sympify(v_override) if v_override is not None else bs.volume_density
    norm_defect = sp.expand(V * V * bs.det_g_inv - 1)
    rep.add("volume_normalisation", sup_norm_scalars([norm_defect], bs.chart,
                                                     base_k, fibre_k), tol)
    return rep


def require_compatible(bs: BetaStructure, tol=DEFAULT_TOL):
    rep = pointwise_checks(bs, tol=tol)
    if not rep.verdict("symmetry"):
        raise CompatibilityError(
            f"beta is not symmetric (residual {rep['symmetry'].value:.3e})")
    if rep.notes["min_imbeta_eigenvalue"] <= POSITIVITY_FLOOR:
        raise CompatibilityError(
            "Im(beta) is not positive definite; min eigenvalue "
            f"{rep.notes['min_imbeta_eigenvalue']:.3e} at {rep.notes['worst_point']}")
    return rep


def build_omega(bs: BetaStructure) -> BigradedElement:
    """The volume form V * exp(beta) as a bigraded element."""
    require_compatible(bs)
    return exp_nilpotent(bs.beta_element()).scale(bs.volume_density)


def omega_form(bs: BetaStructure) -> FormElement:
    """Direct wedge expansion V * prod(dx_i + sum beta_ij dy_j)."""
    return decomposable_form(bs.chart, bs.beta, scale=bs.volume_density)


def integrability_residual(bs: BetaStructure) -> BigradedElement:
    """d_y(beta) - [beta, beta]/2, a bidegree (-1, 2) element."""
    beta = bs.beta_element()
    return d_y(beta) - bracket(beta, beta).scale(sp.Rational(1, 2))


def integrability_residual_indexed(bs: BetaStructure):
    """Componentwise form of the same residual, as an independent oracle.

    Coefficient of dy_j ^ dy_k (x) d/dx_l, j < k:
    d(beta_lk)/dy_j - d(beta_lj)/dy_k
    - sum_i (d(beta_lk)/dx_i * beta_ij - d(beta_lj)/dx_i * beta_ik).
    """
    n, ys, xs = bs.n, bs.chart.ys, bs.chart.xs
    coeffs = {}
    for l in range(1, n + 1):
        for j in range(1, n + 1):
            for k in range(j + 1, n + 1):
                blk = bs.beta[l - 1][k - 1]
                blj = bs.beta[l - 1][j - 1]
                val = sp.diff(blk, ys[j - 1]) - sp.diff(blj, ys[k - 1])
                for i in range(1, n + 1):
                    val -= sp.diff(blk, xs[i - 1]) * bs.beta[i - 1][j - 1]
                    val += sp.diff(blj, xs[i - 1]) * bs.beta[i - 1][k - 1]
                coeffs[((j, k), (l,))] = sp.expand(val)
    return BigradedElement(bs.chart, coeffs)


def _volume_divergence_residual(bs: BetaStructure) -> BigradedElement:
    """d_y(V) - d_x'(V * beta): the degree-(0,1) piece of d(Omega) = 0."""
    V = bs.volume_density
    Vel = BigradedElement.term(bs.chart, V)
    vbeta = bs.beta_element().scale(V)
    return d_y(Vel) - d_x_prime(vbeta)


def closedness_residuals(bs: BetaStructure, tol=DEFAULT_TOL,
                         base_k=5, fibre_k=8) -> SemiflatReport:
    """Full d(Omega) residual, the volume-divergence residual, and integrability.

    The three verdicts satisfy: closed iff (integrable and divergence-free);
    the report records both sides so the equivalence is testable.
    """
    require_compatible(bs, tol)
    rep = SemiflatReport()
    domega = omega_form(bs).exterior_derivative()
    rep.add("full_closedness", domega.sup_norm(base_k, fibre_k), tol)
    rep.add("volume_divergence",
            _volume_divergence_residual(bs).sup_norm(base_k, fibre_k), tol)
    rep.add("integrability",
            integrability_residual(bs).sup_norm(base_k, fibre_k), tol)
    rep.notes["equivalence_consistent"] = (
        rep.verdict("full_closedness")
        == (rep.verdict("volume_divergence") and rep.verdict("integrability"))
    )
    return rep


def structure_equations(bs: BetaStructure, tol=DEFAULT_TOL,
                        base_k=5, fibre_k=8) -> SemiflatReport:
    """Real/imaginary split of the closedness conditions, four named residuals.

    connection_curvature:  F_b + [gInv, gInv]/2  with F_b = d_y(b) - [b, b]/2
    covariant_metric:      d_y(gInv) - [b, gInv]
    fibre_harmonic_j:      sum_i d(V * gInv_ij)/dx_i  (componentwise)
    parallel_volume_j:     dV/dy_j - sum_i d(V * b_ij)/dx_i
    """
    require_compatible(bs, tol)
    rep = SemiflatReport()
    b = bs.b_element()
    ginv = bs.g_inv_element()
    fb = d_y(b) - bracket(b, b).scale(sp.Rational(1, 2))
    curv = fb + bracket(ginv, ginv).scale(sp.Rational(1, 2))
    rep.add("connection_curvature", curv.sup_norm(base_k, fibre_k), tol)
    rep.add("covariant_metric",
            (d_y(ginv) - bracket(b, ginv)).sup_norm(base_k, fibre_k), tol)

    V = bs.volume_density
    xs, ys = bs.chart.xs, bs.chart.ys
    harmonic = []
    parallel = []
    for j in range(1, bs.n + 1):
        harmonic.append(sp.expand(sum(
            sp.diff(V * bs.g_inv[i - 1][j - 1], xs[i - 1]) for i in range(1, bs.n + 1))))
        parallel.append(sp.expand(
            sp.diff(V, ys[j - 1])
            - sum(sp.diff(V * bs.b_matrix[i - 1][j - 1], xs[i - 1])
                  for i in range(1, bs.n + 1))))
    rep.add("fibre_harmonic", sup_norm_scalars(harmonic, bs.chart, base_k, fibre_k), tol)
    rep.add("parallel_volume", sup_norm_scalars(parallel, bs.chart, base_k, fibre_k), tol)
    return rep


def horizontal_frame_residual(bs: BetaStructure, base_k=5, fibre_k=8):
    """Pairing of Re(theta_i) with the horizontal frame d/dy_j - sum_k b_kj d/dx_k.

    The real parts of the candidate (1,0)-forms must annihilate the
    horizontal subspaces; the imaginary pairing equals i * gInv by design.
    """
    vals = []
    for i in range(bs.n):
        for j in range(bs.n):
            # Re(theta_i)(h_j) = Re(beta_ij) - b_ij
            vals.append(sp.expand(bs.beta[i][j].as_real_imag()[0] - bs.b_matrix[i][j]))
    return sup_norm_scalars(vals, bs.chart, base_k, fibre_k)


# ---------------------------------------------------------------------------
# fibrewise translations, action coordinates, regluing
# ---------------------------------------------------------------------------

def _check_base_one_form(sigma, chart):
    sigma = [sp.expand(sp.sympify(s)) for s in sigma]
    if len(sigma) != chart.n:
        raise ValueError("section must give one component per base axis")
    for s in sigma:
        if set(s.free_symbols) & set(chart.xs):
            raise ValueError("section components must depend on y only")
    return sigma


def translate_by_section(bs: BetaStructure, sigma) -> BetaStructure:
    """Fibrewise translation x -> x + sigma(y) acting on beta.

    New matrix: beta_ij(y, x + sigma(y)) + d(sigma_i)/dy_j.
    """
    sigma = _check_base_one_form(sigma, bs.chart)
    n, xs, ys = bs.n, bs.chart.xs, bs.chart.ys
    shift = {xs[i]: xs[i] + sigma[i] for i in range(n)}
    new = [[sp.expand(bs.beta[i][j].subs(shift, simultaneous=True)
                      + sp.diff(sigma[i], ys[j]))
            for j in range(n)] for i in range(n)]
    return BetaStructure(bs.chart, new, compatible=bs.compatible_flag)


def symplectic_pullback_defect(sigma, chart: Chart) -> FormElement:
    """T_sigma^* omega - omega for the standard symplectic form.

    Computed by honest pullback: omega = sum d(x_i) ^ d(y_i) with
    x_i -> x_i + sigma_i(y); the defect equals d(sigma) as a base 2-form.
    """
    sigma = _check_base_one_form(sigma, chart)
    ys = chart.ys
    one_forms = []
    for i in range(chart.n):
        # d(x_i + sigma_i) expressed in generators
        form = {("x", i + 1): sp.Integer(1)}
        for j in range(chart.n):
            ds = sp.diff(sigma[i], ys[j])
            if ds != 0:
                form[("y", j + 1)] = ds
        one_forms.append(form)
    pulled = FormElement(chart)
    for i in range(chart.n):
        dyi = {("y", i + 1): sp.Integer(1)}
        pulled = pulled + wedge_one_forms(chart, [one_forms[i], dyi])
    return pulled - standard_symplectic_form(chart)


def base_one_form_differential(sigma, chart: Chart) -> FormElement:
    """d(sigma) for a base one-form, as a base 2-form."""
    sigma = _check_base_one_form(sigma, chart)
    form = FormElement(chart)
    for i in range(chart.n):
        form.add_term((i + 1,), (), sigma[i])
    return form.exterior_derivative()


def action_coordinates(period_forms, chart: Chart):
    """Potentials u_i with du_i = lambda_i, pinned to zero at the box centre.

    period_forms: list of closed base one-forms (component lists).  Raises
    on non-closed input or on a degenerate Jacobian at the sample grid.
    """
    ys = chart.ys
    centre = chart.center
    potentials = []
    for lam in period_forms:
        lam = _check_base_one_form(lam, chart)
        dlam = base_one_form_differential(lam, chart)
        if not dlam.is_zero():
            raise ValueError(f"period form {lam} is not closed: d = {dlam}")
        u = sp.Integer(0)
        t = sp.Dummy("t", real=True)
        for k in range(chart.n):
            # integrate the k-th component along the k-th axis, with the
            # later coordinates frozen at the centre
            comp = lam[k]
            subs = {ys[m]: centre[m] for m in range(k + 1, chart.n)}
            comp = comp.subs(subs)
            seg = sp.integrate(comp.subs(ys[k], t), (t, centre[k], ys[k]))
            u += seg
        u = sp.expand(u)
        grad = [sp.expand(sp.diff(u, ys[k]) - lam[k]) for k in range(chart.n)]
        if any(sp.simplify(g) != 0 for g in grad):
            raise ValueError("antiderivative not expressible in the grammar")
        potentials.append(u)
    jac = sp.Matrix([[sp.diff(u, ys[j]) for j in range(chart.n)] for u in potentials])
    from .fields import compile_scalars
    Y = chart.base_grid(5)
    X = np.zeros_like(Y)
    entries = [jac[i, j] for i in range(chart.n) for j in range(chart.n)]
    vals = compile_scalars(entries, chart)(Y, X).real.T.reshape(len(Y), chart.n, chart.n)
    dets = np.linalg.det(vals)
    if np.min(np.abs(dets)) < 1e-12:
        raise ValueError("period forms are pointwise dependent on the box")
    return potentials


def reglue_check(sigma_12, overlap_chart: Chart):
    """Overlap cocycle test: valid iff the gluing one-form is closed.

    Returns (verdict, transition) where transition carries the fibrewise
    shift x -> x + sigma_12(y).
    """
    sigma = _check_base_one_form(sigma_12, overlap_chart)
    dsig = base_one_form_differential(sigma, overlap_chart)
    verdict = dsig.is_zero() or dsig.sup_norm() < 1e-12
    transition = {
        "kind": "fibre_translation",
        "shift": [sp.sstr(s) for s in sigma],
    }
    return bool(verdict), transition


def flatness_probe(bs: BetaStructure, tol=DEFAULT_TOL, base_k=5, fibre_k=8) -> SemiflatReport:
    """Hypotheses: d(Omega) = 0 and flat connection; conclusion: fibre-constant metric.

    Reports the curvature and closedness residuals, plus the sup of fibre
    gradients of the metric entries and of V.  On a single chart the
    testable conclusion is constancy along the fibre directions; global
    constancy of V on compact fibres is outside a one-chart model.
    """
    rep = SemiflatReport()
    b = bs.b_element()
    fb = d_y(b) - bracket(b, b).scale(sp.Rational(1, 2))
    rep.add("connection_flatness", fb.sup_norm(base_k, fibre_k), tol)
    domega = omega_form(bs).exterior_derivative()
    rep.add("full_closedness", domega.sup_norm(base_k, fibre_k), tol)
    xs = bs.chart.xs
    grads = [sp.diff(bs.g_inv[i][j], xs[k])
             for i in range(bs.n) for j in range(bs.n) for k in range(bs.n)]
    vgrads = [sp.diff(bs.volume_density, xs[k]) for k in range(bs.n)]
    rep.add("metric_fibre_gradient", sup_norm_scalars(grads, bs.chart, base_k, fibre_k), tol)
    rep.add("volume_fibre_gradient", sup_norm_scalars(vgrads, bs.chart, base_k, fibre_k), tol)
    hyp = rep.verdict("connection_flatness") and rep.verdict("full_closedness")
    rep.notes["hypotheses_hold"] = hyp
    rep.notes["conclusion_holds"] = (
        rep.verdict("metric_fibre_gradient") and rep.verdict("volume_fibre_gradient")
        if hyp else None
    )
    return rep
