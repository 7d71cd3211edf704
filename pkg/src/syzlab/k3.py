"""Lattice-level K3 mirror map: exact rational (and quadratic-surd) classes.

Input data lives in a fixed even lattice: a primitive isotropic fibre class
E, a section class sigma0 with sigma0^2 = -2 and sigma0.E = 1, a Kaehler
class omega and a twist class B orthogonal to E (with the lift normalised
by B.sigma0 = 0), and the holomorphic-form classes ReOmega, ImOmega subject
to the usual equal-square orthogonality normalisation.  After aligning the
phase so ImOmega.E = 0, the fibre volume is vol = ReOmega.E.

The mirror classes are

  Omega_n_mirror = sigma0 - (B + i omega)
                   + (1 - (B + i omega)^2 / 2 + i omega.sigma0) E,
  omega_mirror   = ImOmega_n + (ImOmega_n.(B - sigma0)) E,
  ReOmega_mirror = Re(Omega_n_mirror) / vol,
  ImOmega_mirror = Im(Omega_n_mirror) / vol,

with ImOmega_n = ImOmega / vol.  All identity checks are exact.

The double mirror feeds the mirror classes back through the same map with
the mirror's own twist class, read off the transverse part of ReOmega_n,
then pulls back by the fibrewise negation which fixes the E and sigma0
components and negates the component in (E-perp intersect sigma0-perp).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import sympy as sp

from .intlinalg import (
    invert_unimodular,
    kernel_basis,
    smith_normal_form,
    solve_int,
)


class K3ValidationError(ValueError):
    pass


def _vec(values, rank):
    v = [sp.nsimplify(x, rational=True) if isinstance(x, float) else sp.sympify(x)
         for x in values]
    if len(v) != rank:
        raise K3ValidationError(f"vector must have {rank} coordinates")
    return tuple(v)


def _is_zero(x):
    return sp.simplify(sp.expand(x)) == 0


def _gcd_all(ints):
    g = 0
    for v in ints:
        g = sp.gcd(g, v)
    return int(g)


# ---------------------------------------------------------------------------
# lattices
# ---------------------------------------------------------------------------

def hyperbolic_plane():
    return [[0, 1], [1, 0]]


def e8_gram(sign=-1):
    """E8 Gram matrix (nodes 1..8; node 2 attaches to node 4), scaled by sign."""
    edges = [(1, 3), (3, 4), (4, 5), (5, 6), (6, 7), (7, 8), (2, 4)]
    g = [[0] * 8 for _ in range(8)]
    for i in range(8):
        g[i][i] = 2 * sign
    for a, b in edges:
        g[a - 1][b - 1] = -1 * sign
        g[b - 1][a - 1] = -1 * sign
    return g


def block_diag(*blocks):
    size = sum(len(b) for b in blocks)
    g = [[0] * size for _ in range(size)]
    off = 0
    for b in blocks:
        for i in range(len(b)):
            for j in range(len(b)):
                g[off + i][off + j] = b[i][j]
        off += len(b)
    return g


@dataclass(frozen=True)
class GramLattice:
    """Integral lattice given by a symmetric Gram matrix."""

    gram: tuple

    def __post_init__(self):
        g = tuple(tuple(int(x) for x in row) for row in self.gram)
        for i in range(len(g)):
            for j in range(len(g)):
                if g[i][j] != g[j][i]:
                    raise K3ValidationError("Gram matrix must be symmetric")
        object.__setattr__(self, "gram", g)

    @property
    def rank(self):
        return len(self.gram)

    def dot(self, u, v):
        total = sp.Integer(0)
        for i in range(self.rank):
            gi = self.gram[i]
            ui = u[i]
            if ui == 0:
                continue
            for j in range(self.rank):
                if gi[j] and v[j] != 0:
                    total += ui * gi[j] * v[j]
        return sp.expand(total)

    def is_unimodular(self):
        return abs(int(sp.Matrix(self.gram).det())) == 1

    @classmethod
    def from_name(cls, name):
        name = name.upper()
        if name == "U":
            return cls(tuple(map(tuple, hyperbolic_plane())))
        if name in ("U2", "U+U"):
            return cls(tuple(map(tuple, block_diag(hyperbolic_plane(),
                                                   hyperbolic_plane()))))
        if name in ("U3", "U+U+U"):
            return cls(tuple(map(tuple, block_diag(*[hyperbolic_plane()] * 3))))
        if name == "K3":
            return cls(tuple(map(tuple, block_diag(
                *([hyperbolic_plane()] * 3 + [e8_gram(-1), e8_gram(-1)])))))
        raise K3ValidationError(f"unknown lattice preset {name!r}")


def k3_lattice():
    return GramLattice.from_name("K3")


def basis_vector(rank, idx, value=1):
    v = [0] * rank
    v[idx] = value
    return tuple(v)


# ---------------------------------------------------------------------------
# input data
# ---------------------------------------------------------------------------

@dataclass
class K3MirrorInput:
    """Lattice data for the mirror map; re/im of the holomorphic class are
    optional for reduced toy inputs (the fibre volume then defaults to 1)."""

    lattice: GramLattice
    E: tuple
    sigma0: tuple
    omega: tuple
    B: tuple = None
    re_omega: tuple = None
    im_omega: tuple = None

    def __post_init__(self):
        r = self.lattice.rank
        self.E = tuple(int(x) for x in self.E)
        self.sigma0 = tuple(int(x) for x in self.sigma0)
        self.omega = _vec(self.omega, r)
        self.B = _vec(self.B, r) if self.B is not None else tuple([sp.Integer(0)] * r)
        # reduce the twist lift to the section-orthogonal representative;
        # adding a fibre-class multiple keeps the class and the fibre pairing
        shift = self.lattice.dot(self.B, self.sigma0)
        if shift != 0:
            self.B = tuple(sp.expand(b - shift * e) for b, e in zip(self.B, self.E))
        if self.re_omega is not None:
            self.re_omega = _vec(self.re_omega, r)
        if self.im_omega is not None:
            self.im_omega = _vec(self.im_omega, r)
        if (self.re_omega is None) != (self.im_omega is None):
            raise K3ValidationError("provide both re/im holomorphic classes or neither")

    @property
    def has_holomorphic_data(self):
        return self.re_omega is not None

    def dot(self, u, v):
        return self.lattice.dot(u, v)

    @property
    def vol(self):
        if not self.has_holomorphic_data:
            return sp.Integer(1)
        return self.dot(self.re_omega, self.E)


def validate(inp: K3MirrorInput, require_aligned=False):
    """Return the list of violated invariants (named); empty when valid."""
    d = inp.dot
    bad = []
    if not _is_zero(d(inp.E, inp.E)):
        bad.append("fibre class is not isotropic")
    if _gcd_all(inp.E) != 1:
        bad.append("fibre class is not primitive")
    if sp.expand(d(inp.sigma0, inp.sigma0) + 2) != 0:
        bad.append("section self-intersection must be -2")
    if sp.expand(d(inp.sigma0, inp.E) - 1) != 0:
        bad.append("section must meet the fibre once")
    if not _is_zero(d(inp.omega, inp.E)):
        bad.append("kaehler class must pair to zero with the fibre")
    if not _is_zero(d(inp.B, inp.E)):
        bad.append("twist class must pair to zero with the fibre")
    if not _is_zero(d(inp.B, inp.sigma0)):
        bad.append("twist lift must pair to zero with the section")
    w2 = d(inp.omega, inp.omega)
    if not sp.simplify(w2) > 0:
        bad.append("kaehler square must be positive")
    if inp.has_holomorphic_data:
        r2 = d(inp.re_omega, inp.re_omega)
        i2 = d(inp.im_omega, inp.im_omega)
        if not _is_zero(r2 - w2) or not _is_zero(i2 - w2):
            bad.append("holomorphic-class squares must equal the kaehler square")
        if not _is_zero(d(inp.re_omega, inp.im_omega)):
            bad.append("holomorphic re/im parts must be orthogonal")
        if not _is_zero(d(inp.omega, inp.re_omega)) or not _is_zero(d(inp.omega, inp.im_omega)):
            bad.append("kaehler class must be orthogonal to the holomorphic class")
        if require_aligned:
            if not _is_zero(d(inp.im_omega, inp.E)):
                bad.append("phase not aligned: Im pairing with the fibre is nonzero")
            if not sp.simplify(d(inp.re_omega, inp.E)) > 0:
                bad.append("phase not aligned: Re pairing with the fibre is not positive")
    return bad


def validate_and_align(inp: K3MirrorInput) -> K3MirrorInput:
    """Rotate the holomorphic class so Im pairs to zero and Re positively
    with the fibre; exact, possibly in a quadratic extension."""
    bad = validate(inp)
    if bad:
        raise K3ValidationError("; ".join(bad))
    if not inp.has_holomorphic_data:
        return inp
    d = inp.dot
    a = d(inp.re_omega, inp.E)
    b = d(inp.im_omega, inp.E)
    if _is_zero(a) and _is_zero(b):
        raise K3ValidationError("fibre class is null against the holomorphic class")
    if _is_zero(b) and sp.simplify(a) > 0:
        return inp
    h = sp.sqrt(sp.expand(a * a + b * b))
    cos_t, sin_t = sp.nsimplify(a / h), sp.nsimplify(-b / h)
    new_re = tuple(sp.simplify(cos_t * r - sin_t * i)
                   for r, i in zip(inp.re_omega, inp.im_omega))
    new_im = tuple(sp.simplify(sin_t * r + cos_t * i)
                   for r, i in zip(inp.re_omega, inp.im_omega))
    out = K3MirrorInput(inp.lattice, inp.E, inp.sigma0, inp.omega, inp.B,
                        new_re, new_im)
    leftover = validate(out, require_aligned=True)
    if leftover:
        raise K3ValidationError("alignment failed: " + "; ".join(leftover))
    return out


def hyperkahler_rotate(inp: K3MirrorInput):
    """Rotated pair: holomorphic class Im + i*omega, kaehler class Re.

    Requires aligned input; checks the rotated holomorphic class is null
    and the rotated kaehler class pairs positively with the fibre.
    """
    if not inp.has_holomorphic_data:
        raise K3ValidationError("hyperkahler rotation needs the holomorphic classes")
    bad = validate(inp, require_aligned=True)
    if bad:
        raise K3ValidationError("; ".join(bad))
    d = inp.dot
    omega_k = inp.re_omega
    holo_k = (inp.im_omega, inp.omega)  # real and imaginary parts
    sq_re = d(holo_k[0], holo_k[0]) - d(holo_k[1], holo_k[1])
    sq_im = 2 * d(holo_k[0], holo_k[1])
    checks = {
        "rotated_holomorphic_null": _is_zero(sq_re) and _is_zero(sq_im),
        "rotated_kaehler_positive": bool(sp.simplify(d(omega_k, omega_k)) > 0),
        "rotated_kaehler_fibre_volume": sp.simplify(d(omega_k, inp.E)),
    }
    if not checks["rotated_holomorphic_null"]:
        raise K3ValidationError("rotated holomorphic class is not null")
    return omega_k, holo_k, checks


# ---------------------------------------------------------------------------
# E-perp / E
# ---------------------------------------------------------------------------

def sublattice_quotient(lattice: GramLattice, E):
    """Induced Gram lattice on (E-perp)/E for a primitive isotropic E.

    Returns (quotient GramLattice, basis rows in ambient coordinates).
    """
    E = [int(x) for x in E]
    if _gcd_all(E) != 1:
        raise K3ValidationError("fibre class is not primitive")
    if lattice.dot(E, E) != 0:
        raise K3ValidationError("fibre class is not isotropic")
    r = lattice.rank
    pair_row = [[int(lattice.dot(E, basis_vector(r, j)))] for j in range(r)]
    # kernel of v -> E.v : columns of the transpose pairing
    perp = kernel_basis([[row[0] for row in pair_row]])
    # coordinates of E inside the perp basis
    coords = solve_int([[perp[b][i] for b in range(len(perp))] for i in range(r)],
                       [[e] for e in E])
    avec = [coords[i][0] for i in range(len(perp))]
    if _gcd_all(avec) != 1:
        raise K3ValidationError("fibre class is not primitive inside its perp")
    comp = _complete_to_basis(avec)
    # new basis of E-perp: first vector is E, the rest descend to the quotient
    new_basis = []
    for col in range(len(perp)):
        vec = [0] * r
        for b in range(len(perp)):
            for i in range(r):
                vec[i] += comp[b][col] * perp[b][i]
        new_basis.append(vec)
    quots = new_basis[1:]
    gram = [[int(lattice.dot(u, v)) for v in quots] for u in quots]
    return GramLattice(tuple(map(tuple, gram))), quots


def _complete_to_basis(primitive_vec):
    col = [[int(x)] for x in primitive_vec]
    d, u, v = smith_normal_form(col)
    if d[0][0] != 1:
        raise K3ValidationError("vector is not primitive")
    return invert_unimodular(u)


# ---------------------------------------------------------------------------
# the mirror map
# ---------------------------------------------------------------------------

@dataclass
class MirrorClasses:
    omega_mirror: tuple
    omega_n_mirror_re: tuple
    omega_n_mirror_im: tuple
    re_omega_mirror: tuple
    im_omega_mirror: tuple
    vol: object
    vol_mirror: object
    identities: dict = field(default_factory=dict)

    def as_dict(self):
        def fmt(v):
            return [sp.sstr(x) for x in v] if v is not None else None

        return {
            "omega_mirror": fmt(self.omega_mirror),
            "omega_n_mirror_re": fmt(self.omega_n_mirror_re),
            "omega_n_mirror_im": fmt(self.omega_n_mirror_im),
            "re_omega_mirror": fmt(self.re_omega_mirror),
            "im_omega_mirror": fmt(self.im_omega_mirror),
            "vol": sp.sstr(self.vol),
            "vol_mirror": sp.sstr(self.vol_mirror),
            "identities": {k: bool(v) for k, v in self.identities.items()},
        }


def _axpy(alpha, x, y):
    return tuple(sp.expand(alpha * a + b) for a, b in zip(x, y))


def _scale(alpha, x):
    return tuple(sp.expand(alpha * a) for a in x)


def mirror_classes(inp: K3MirrorInput) -> MirrorClasses:
    """Compute the mirror classes and verify their identities exactly."""
    bad = validate(inp, require_aligned=True)
    if bad:
        raise K3ValidationError("; ".join(bad))
    d = inp.dot
    E, s0, w, B = inp.E, inp.sigma0, inp.omega, inp.B
    vol = inp.vol
    if inp.has_holomorphic_data and not sp.simplify(vol) > 0:
        raise K3ValidationError("fibre volume must be positive after alignment")

    w2 = d(w, w)
    B2 = d(B, B)
    ws0 = d(w, s0)
    wB = d(w, B)

    # normalised mirror holomorphic class
    lam = 1 - sp.Rational(1, 2) * (B2 - w2)
    mu = ws0 - wB
    on_re = tuple(sp.expand(s - b + lam * e) for s, b, e in zip(s0, B, E))
    on_im = tuple(sp.expand(-ww + mu * e) for ww, e in zip(w, E))

    re_mirror = _scale(1 / vol, on_re)
    im_mirror = _scale(1 / vol, on_im)
    vol_mirror = d(re_mirror, inp.E)

    identities = {}
    on_sq_re = d(on_re, on_re) - d(on_im, on_im)
    on_sq_im = 2 * d(on_re, on_im)
    identities["mirror_holomorphic_null"] = _is_zero(on_sq_re) and _is_zero(on_sq_im)
    identities["mirror_holomorphic_fibre_pairing_one"] = _is_zero(d(on_re, E) - 1) and _is_zero(d(on_im, E))
    identities["volume_reciprocity"] = _is_zero(vol * vol_mirror - 1)

    if inp.has_holomorphic_data:
        im_n = _scale(sp.Rational(1, 1) / vol, inp.im_omega)
        kappa = d(im_n, tuple(b - s for b, s in zip(B, s0)))
        omega_mirror = _axpy(kappa, E, im_n)
        identities["mirror_kaehler_fibre_orthogonal"] = _is_zero(d(omega_mirror, E))
        identities["mirror_kaehler_vs_holomorphic"] = (
            _is_zero(d(on_re, omega_mirror)) and _is_zero(d(on_im, omega_mirror)))
        identities["mirror_kaehler_square"] = _is_zero(
            d(omega_mirror, omega_mirror) - w2 / vol ** 2)
    else:
        omega_mirror = None

    return MirrorClasses(omega_mirror, on_re, on_im, re_mirror, im_mirror,
                         vol, vol_mirror, identities)


def kahler_obstructions(inp: K3MirrorInput, classes):
    """Declared algebraic classes that obstruct the mirror Kaehler property.

    A square-(-2) algebraic class blocks the positivity argument for the
    mirror real class; the full Picard computation is out of scope, so only
    user-declared classes are screened.  Returns the offending classes.
    """
    d = inp.lattice.dot
    bad = []
    for cls in classes:
        v = tuple(int(x) for x in cls)
        if d(v, v) == -2:
            bad.append(v)
    return bad


# ---------------------------------------------------------------------------
# fibrewise negation and the double mirror
# ---------------------------------------------------------------------------

def split_components(inp_or_lattice, E, s0, v):
    """Decompose v = alpha*E + beta*sigma0 + w with w in E-perp and sigma0-perp."""
    d = inp_or_lattice.dot
    beta = d(v, E)
    alpha = sp.expand(d(v, s0) + 2 * beta)
    w = tuple(sp.expand(vi - alpha * e - beta * s) for vi, e, s in zip(v, E, s0))
    return alpha, beta, w


def fibrewise_negation(lattice_like, E, s0, v):
    """Fix the E and sigma0 components; negate the transverse component."""
    alpha, beta, w = split_components(lattice_like, E, s0, v)
    return tuple(sp.expand(alpha * e + beta * s - ww) for e, s, ww in zip(E, s0, w))


def transverse_twist_class(inp: K3MirrorInput):
    """The mirror's twist class: transverse part of ReOmega / vol."""
    if not inp.has_holomorphic_data:
        raise K3ValidationError("twist readout needs the holomorphic classes")
    re_n = _scale(sp.Rational(1, 1) / inp.vol, inp.re_omega)
    _, _, w = split_components(inp, inp.E, inp.sigma0, re_n)
    return w


def double_mirror_check(inp: K3MirrorInput) -> dict:
    """Mirror twice, pull back by the fibrewise negation, compare exactly."""
    inp = validate_and_align(inp)
    if not inp.has_holomorphic_data:
        raise K3ValidationError("double mirror needs the holomorphic classes")
    first = mirror_classes(inp)
    b_mirror = transverse_twist_class(inp)
    second_input = K3MirrorInput(
        inp.lattice, inp.E, inp.sigma0,
        omega=first.omega_mirror,
        B=b_mirror,
        re_omega=first.re_omega_mirror,
        im_omega=first.im_omega_mirror,
    )
    bad = validate(second_input, require_aligned=True)
    if bad:
        raise K3ValidationError("mirror output is not valid input: " + "; ".join(bad))
    second = mirror_classes(second_input)

    neg = lambda v: fibrewise_negation(inp, inp.E, inp.sigma0, v)
    recovered = {
        "omega": neg(second.omega_mirror),
        "re_omega": neg(second.re_omega_mirror),
        "im_omega": neg(second.im_omega_mirror),
    }
    report = {
        "first_identities": first.identities,
        "second_identities": second.identities,
        "omega_recovered": all(_is_zero(a - b) for a, b in zip(recovered["omega"], inp.omega)),
        "re_omega_recovered": all(_is_zero(a - b) for a, b in zip(recovered["re_omega"], inp.re_omega)),
        "im_omega_recovered": all(_is_zero(a - b) for a, b in zip(recovered["im_omega"], inp.im_omega)),
        "twist_recovered": all(
            _is_zero(a - b) for a, b in zip(
                tuple(-x for x in transverse_twist_class(second_input)), inp.B)),
        "negation_involutive": all(
            _is_zero(a - b) for a, b in zip(neg(neg(inp.omega)), inp.omega)),
    }
    report["all_passed"] = all(bool(v) for k, v in report.items()
                               if k.endswith("recovered") or k == "negation_involutive")
    return report
