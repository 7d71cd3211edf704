import random

import pytest
import sympy as sp

from syzlab.k3 import (
    GramLattice,
    K3MirrorInput,
    K3ValidationError,
    basis_vector,
    double_mirror_check,
    fibrewise_negation,
    hyperkahler_rotate,
    k3_lattice,
    mirror_classes,
    split_components,
    sublattice_quotient,
    transverse_twist_class,
    validate,
    validate_and_align,
)

U3 = GramLattice.from_name("U3")
E = (1, 0, 0, 0, 0, 0)
S0 = (-1, 1, 0, 0, 0, 0)


def full_input(omega=(0, 0, 1, 1, 0, 0), B=(0,) * 6,
               re=(1, 1, 0, 0, 0, 0), im=(0, 0, 0, 0, 1, 1)):
    return K3MirrorInput(U3, E=E, sigma0=S0, omega=omega, B=B,
                         re_omega=re, im_omega=im)


def random_valid_input(rng):
    """Random exact input over three hyperbolic planes.

    Start from the canonical orthogonal triple, apply rational-rotation
    mixes that preserve the normalisation, scale, and add a random twist
    class orthogonal to the fibre and section.
    """
    re = [sp.Integer(v) for v in (1, 1, 0, 0, 0, 0)]
    im = [sp.Integer(v) for v in (0, 0, 0, 0, 1, 1)]
    w = [sp.Integer(v) for v in (0, 0, 1, 1, 0, 0)]
    # a rational rotation in the (im, omega) plane keeps re.E untouched
    pairs = [(3, 4, 5), (5, 12, 13), (8, 15, 17)]
    a, b, c = pairs[rng.randrange(3)]
    ca, sa = sp.Rational(a, c), sp.Rational(b, c)
    im, w = ([ca * u + sa * v for u, v in zip(im, w)],
             [-sa * u + ca * v for u, v in zip(im, w)])
    # overall scaling keeps all squares equal
    scale = sp.Rational(rng.randint(1, 5), rng.randint(1, 3))
    re = [scale * v for v in re]
    im = [scale * v for v in im]
    w = [scale * v for v in w]
    # sometimes rotate (re, im) so the input needs genuine alignment
    if rng.random() < 0.5:
        a, b, c = pairs[rng.randrange(3)]
        ca, sa = sp.Rational(a, c), sp.Rational(b, c)
        re, im = ([ca * u - sa * v for u, v in zip(re, im)],
                  [sa * u + ca * v for u, v in zip(re, im)])
    B = [0, 0] + [sp.Rational(rng.randint(-3, 3), rng.randint(1, 2))
                  for _ in range(4)]
    return K3MirrorInput(U3, E=E, sigma0=S0, omega=tuple(w), B=tuple(B),
                         re_omega=tuple(re), im_omega=tuple(im))


class TestValidation:
    def test_valid_input_passes(self):
        assert validate(full_input(), require_aligned=True) == []

    def test_named_violations(self):
        bad = K3MirrorInput(U3, E=E, sigma0=(0, 1, 0, 0, 0, 0),
                            omega=(0, 0, 1, 1, 0, 0))
        msgs = validate(bad)
        assert any("section self-intersection" in m for m in msgs)
        bad2 = K3MirrorInput(U3, E=(2, 0, 0, 0, 0, 0), sigma0=S0,
                             omega=(0, 0, 1, 1, 0, 0))
        assert any("primitive" in m for m in validate(bad2))
        bad3 = K3MirrorInput(U3, E=E, sigma0=S0, omega=(0, 0, 1, -1, 0, 0))
        assert any("positive" in m for m in validate(bad3))

    def test_alignment_quarter_turn(self):
        swapped = full_input(re=(0, 0, 0, 0, 1, 1), im=(1, 1, 0, 0, 0, 0))
        aligned = validate_and_align(swapped)
        assert aligned.re_omega == (1, 1, 0, 0, 0, 0)
        assert aligned.im_omega == (0, 0, 0, 0, -1, -1)

    def test_alignment_idempotent(self):
        inp = full_input()
        assert validate_and_align(inp) is inp

    def test_alignment_null_pairing_rejected(self):
        degenerate = full_input(re=(0, 0, 0, 0, 1, 1), im=(0, 0, 1, -1, 0, 0))
        # here both Re.E and Im.E vanish: no phase can fix the volume
        with pytest.raises(K3ValidationError):
            validate_and_align(degenerate)

    def test_exact_pythagorean_alignment(self):
        re0 = [sp.Integer(v) for v in (1, 1, 0, 0, 0, 0)]
        im0 = [sp.Integer(v) for v in (0, 0, 0, 0, 1, 1)]
        c, s = sp.Rational(3, 5), sp.Rational(4, 5)
        re = tuple(c * a - s * b for a, b in zip(re0, im0))
        im = tuple(s * a + c * b for a, b in zip(re0, im0))
        aligned = validate_and_align(full_input(re=re, im=im))
        assert aligned.re_omega == tuple(re0)
        assert aligned.im_omega == tuple(im0)


class TestHyperkahler:
    def test_rotation_checks(self):
        omega_k, holo_k, checks = hyperkahler_rotate(full_input())
        assert checks["rotated_holomorphic_null"]
        assert checks["rotated_kaehler_positive"]
        assert checks["rotated_kaehler_fibre_volume"] == 1

    def test_unaligned_rejected(self):
        swapped = full_input(re=(0, 0, 0, 0, 1, 1), im=(1, 1, 0, 0, 0, 0))
        with pytest.raises(K3ValidationError):
            hyperkahler_rotate(swapped)


class TestSublatticeQuotient:
    def test_two_planes(self):
        lat = GramLattice.from_name("U2")
        q, basis = sublattice_quotient(lat, (1, 0, 0, 0))
        assert q.rank == 2
        assert q.gram == ((0, 1), (1, 0))

    def test_k3_preset(self):
        lat = k3_lattice()
        assert lat.rank == 22 and lat.is_unimodular()
        q, _ = sublattice_quotient(lat, basis_vector(22, 0))
        assert q.rank == 20
        assert q.is_unimodular()

    def test_rejects_imprimitive(self):
        with pytest.raises(K3ValidationError):
            sublattice_quotient(GramLattice.from_name("U2"), (2, 0, 0, 0))

    def test_rejects_non_isotropic(self):
        with pytest.raises(K3ValidationError):
            sublattice_quotient(GramLattice.from_name("U2"), (1, 1, 0, 0))


class TestMirrorClasses:
    def test_reduced_toy(self):
        """Two hyperbolic planes, no holomorphic data, unit volume."""
        lat = GramLattice.from_name("U2")
        inp = K3MirrorInput(lat, E=(1, 0, 0, 0), sigma0=(-1, 1, 0, 0),
                            omega=(0, 0, 1, 1))
        mc = mirror_classes(inp)
        assert mc.omega_n_mirror_re == (1, 1, 0, 0)
        assert mc.omega_n_mirror_im == (0, 0, -1, -1)
        assert all(mc.identities.values())
        assert mc.vol == 1 and mc.vol_mirror == 1

    def test_full_identities(self):
        mc = mirror_classes(full_input())
        assert all(mc.identities.values())
        assert sp.expand(mc.vol * mc.vol_mirror - 1) == 0

    def test_volume_scaling_of_mirror_kaehler(self):
        """Scaling omega scales the mirror kaehler square by t^2 / vol^2."""
        t = sp.Integer(3)
        base = full_input()
        scaled = full_input(omega=tuple(t * sp.Integer(v)
                                        for v in (0, 0, 1, 1, 0, 0)),
                            re=tuple(t * sp.Integer(v) for v in (1, 1, 0, 0, 0, 0)),
                            im=tuple(t * sp.Integer(v) for v in (0, 0, 0, 0, 1, 1)))
        mc0, mc1 = mirror_classes(base), mirror_classes(scaled)
        d = U3.dot
        sq0 = d(mc0.omega_mirror, mc0.omega_mirror)
        sq1 = d(mc1.omega_mirror, mc1.omega_mirror)
        # vol scales by t as well, so the mirror square is scale free here
        assert sp.expand(sq1 - sq0) == 0
        # the mirror volume stays reciprocal regardless of the scaling
        assert sp.expand(mc1.vol * mc1.vol_mirror - 1) == 0

    def test_fibre_pairing_is_one(self):
        mc = mirror_classes(full_input(B=(0, 0, 1, -1, 0, 0)))
        d = U3.dot
        assert sp.expand(d(mc.omega_n_mirror_re, E) - 1) == 0
        assert sp.expand(d(mc.omega_n_mirror_im, E)) == 0

    def test_randomised_exact_identities(self):
        rng = random.Random(101)
        for _ in range(30):
            inp = validate_and_align(random_valid_input(rng))
            mc = mirror_classes(inp)
            assert all(mc.identities.values())
            assert sp.expand(mc.vol * mc.vol_mirror - 1) == 0

    def test_symbolic_scaling_of_kaehler_square(self):
        """The mirror kaehler square is omega^2 / vol^2, checked with a
        symbolic positive scale on the whole normalised triple."""
        t = sp.Symbol("t", positive=True)
        scale = lambda v: tuple(t * sp.Integer(x) for x in v)
        inp = K3MirrorInput(U3, E=E, sigma0=S0,
                            omega=scale((0, 0, 1, 1, 0, 0)),
                            B=(0,) * 6,
                            re_omega=scale((1, 1, 0, 0, 0, 0)),
                            im_omega=scale((0, 0, 0, 0, 1, 1)))
        mc = mirror_classes(inp)
        d = U3.dot
        omega_sq = d(inp.omega, inp.omega)
        mirror_sq = d(mc.omega_mirror, mc.omega_mirror)
        assert sp.simplify(mirror_sq - omega_sq / mc.vol ** 2) == 0
        assert sp.simplify(mc.vol * mc.vol_mirror - 1) == 0


class TestTwistLift:
    def test_lift_reduced_on_construction(self):
        """A twist class pairing nontrivially with the section is shifted by
        a fibre-class multiple to the orthogonal representative."""
        raw_B = (1, 0, 1, -1, 0, 0)  # orthogonal to the fibre, not the section
        d = U3.dot
        assert d(raw_B, E) == 0 and d(raw_B, S0) != 0
        inp = full_input(B=raw_B)
        assert inp.B == (0, 0, 1, -1, 0, 0)
        assert d(inp.B, S0) == 0 and d(inp.B, E) == 0

    def test_reduced_lift_gives_valid_input(self):
        inp = full_input(B=(2, 0, 1, -1, 0, 0))
        assert validate(inp, require_aligned=True) == []
        assert double_mirror_check(inp)["all_passed"]


class TestKahlerObstructions:
    def test_minus_two_class_flagged(self):
        from syzlab.k3 import kahler_obstructions

        inp = full_input()
        bad = kahler_obstructions(inp, [(0, 0, 1, -1, 0, 0), (0, 0, 1, 1, 0, 0)])
        assert bad == [(0, 0, 1, -1, 0, 0)]

    def test_no_obstruction(self):
        from syzlab.k3 import kahler_obstructions

        assert kahler_obstructions(full_input(), [(1, 0, 0, 0, 0, 0)]) == []


class TestDoubleMirror:
    def test_negation_is_involutive(self):
        inp = full_input()
        v = (2, 3, sp.Rational(1, 2), -1, 0, 5)
        once = fibrewise_negation(inp, E, S0, v)
        twice = fibrewise_negation(inp, E, S0, once)
        assert all(sp.expand(a - b) == 0 for a, b in zip(twice, v))

    def test_component_split(self):
        inp = full_input()
        alpha, beta, w = split_components(inp, E, S0, (0, 5, 1, 2, 0, 0))
        d = U3.dot
        assert d(w, E) == 0 and d(w, S0) == 0
        rebuilt = tuple(sp.expand(alpha * e + beta * s + ww)
                        for e, s, ww in zip(E, S0, w))
        assert rebuilt == (0, 5, 1, 2, 0, 0)

    def test_untwisted_recovery(self):
        report = double_mirror_check(full_input())
        assert report["all_passed"]

    def test_twisted_recovery(self):
        report = double_mirror_check(full_input(B=(0, 0, 1, -1, 0, 0)))
        assert report["all_passed"]

    def test_randomised_recovery(self):
        rng = random.Random(77)
        for _ in range(10):
            report = double_mirror_check(random_valid_input(rng))
            assert report["all_passed"]

    def test_reduced_input_rejected(self):
        lat = GramLattice.from_name("U2")
        inp = K3MirrorInput(lat, E=(1, 0, 0, 0), sigma0=(-1, 1, 0, 0),
                            omega=(0, 0, 1, 1))
        with pytest.raises(K3ValidationError):
            double_mirror_check(inp)


class TestCanonicalFormIdentities:
    def test_complex_canonical_coordinates(self):
        """The canonical complex 2-form in twisted coordinates reproduces the
        rotated symplectic and holomorphic-imaginary forms, and the chart
        relabeling (x1,x2,y1,y2) -> (x2,x1,y1,-y2) carries the standard
        symplectic form onto the imaginary part."""
        from syzlab.algebra import FormElement, standard_symplectic_form, wedge_one_forms
        from syzlab.charts import Chart

        chart = Chart(2, ((-1, 1), (-1, 1)))
        I = sp.I
        # dw ^ dz with w = x1 + i x2, z = y1 - i y2
        dw = {("x", 1): sp.Integer(1), ("x", 2): I}
        dz = {("y", 1): sp.Integer(1), ("y", 2): -I}
        omega_c = wedge_one_forms(chart, [dw, dz])
        re, im = omega_c.real_imag()
        # imaginary part: dy2 ^ dx1 + dx2 ^ dy1
        assert im.coefficient(dys=(2,), dxs=(1,)) == 1
        assert im.coefficient(dys=(1,), dxs=(2,)) == -1
        # real part: dx1 ^ dy1 + dx2 ^ dy2
        assert re.coefficient(dys=(1,), dxs=(1,)) == -1
        assert re.coefficient(dys=(2,), dxs=(2,)) == -1

        # relabeling of the standard symplectic form matches the imaginary part
        relabeled = FormElement(chart)
        for (jset, kset), coeff in standard_symplectic_form(chart).terms.items():
            sign = 1
            new_j = tuple(sorted(jset))
            if 2 in jset:
                sign = -sign  # y2 -> -y2
            new_k = tuple(sorted({1: 2, 2: 1}[k] for k in kset))
            relabeled.add_term(new_j, new_k, sign * coeff)
        assert (relabeled - im).is_zero()
