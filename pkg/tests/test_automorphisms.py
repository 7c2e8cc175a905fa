import json
import random
from fractions import Fraction

import pytest

from weyltype import (
    BlockMatrix,
    Character,
    FunctionalAut,
    InnerExp,
    Lattice,
    NormalFormAut,
    ShiftV,
    Sigma1,
    Signature,
    TauAut,
    apply_sigma1,
    compose_automorphisms,
    compose_normal_forms,
    conjugated_shift,
    decompose_automorphism,
    verify_automorphism,
)
from weyltype.automorphisms import (
    MODE_ASSOC,
    MODE_LIE,
    generator_element,
    generator_keys,
    random_normal_form_aut,
)
from weyltype.errors import (
    LatticeNotMapped,
    NotAnAutomorphism,
    NotInA,
    Sigma1NotSupported,
)
from weyltype.sampling import (
    random_A_element,
    random_aut2,
    random_character,
    random_element,
    random_shift_vector,
)


class TestTauAut:
    def test_identity_map(self, desk):
        rng = random.Random(0)
        tau = TauAut.identity(desk)
        for _ in range(10):
            w = random_element(desk, rng)
            assert tau.apply(w) == w

    def test_negation_matrix(self, w01):
        tau = TauAut(w01, BlockMatrix(0, 1, [[-1]]), Character.trivial(w01.lattice))
        assert tau.apply(w01.x((1,))) == w01.x((-1,))
        assert tau.apply(w01.d(1)) == -w01.d(1)

    def test_character_scaling(self, w01):
        tau = TauAut(w01, BlockMatrix(0, 1, [[1]]), Character(w01.lattice, [2]))
        for n in range(-3, 4):
            assert tau.apply(w01.x((n,))) == w01.x((n,), coeff=Fraction(2) ** n)

    def test_requires_lattice_stabilizer(self, z2):
        with pytest.raises(LatticeNotMapped):
            TauAut(z2, BlockMatrix(1, 1, [[2, 0], [0, 1]]),
                   Character.trivial(z2.lattice))

    def test_inverse_and_compose(self, desk):
        rng = random.Random(1)
        for _ in range(5):
            tau = TauAut(desk, random_aut2(desk, rng),
                         random_character(desk.lattice, rng))
            inv = tau.inverse()
            w = random_element(desk, rng)
            assert inv.apply(tau.apply(w)) == w
            other = TauAut(desk, random_aut2(desk, rng),
                           random_character(desk.lattice, rng))
            composed = tau.compose(other)
            assert composed.apply(w) == tau.apply(other.apply(w))

    def test_preserves_product_and_bracket(self, desk):
        rng = random.Random(2)
        tau = TauAut(desk, random_aut2(desk, rng), random_character(desk.lattice, rng))
        assert verify_automorphism(tau, trials=100, seed=3, mode=MODE_ASSOC).passed
        assert verify_automorphism(tau, trials=100, seed=3, mode=MODE_LIE).passed


class TestInnerExp:
    def test_polynomial_generator(self, desk):
        sigma = InnerExp(desk.x_poly(1))
        assert sigma.apply(desk.d(1)) == desk.d(1) - desk.one()

    def test_lattice_point(self, desk):
        alpha = (Fraction(1, 2), Fraction(1, 2))
        sigma = InnerExp(desk.x(alpha))
        for p in (1, 2):
            expected = desk.d(p) - desk.x(alpha, coeff=alpha[p - 1])
            assert sigma.apply(desk.d(p)) == expected

    def test_fixes_commutative_part(self, desk):
        rng = random.Random(4)
        sigma = InnerExp(random_A_element(desk, rng))
        for _ in range(10):
            a = random_A_element(desk, rng)
            assert sigma.apply(a) == a

    def test_constant_normalized_away(self, desk):
        u = desk.x_poly(1) + desk.scalar(5)
        assert InnerExp(u) == InnerExp(desk.x_poly(1))

    def test_rejects_derivation_part(self, desk):
        with pytest.raises(NotInA):
            InnerExp(desk.d(1))

    def test_nilpotency_bound(self, desk):
        rng = random.Random(5)
        zero = desk.zero()
        for _ in range(25):
            u = random_A_element(desk, rng)
            m = random_element(desk, rng, max_terms=1)
            cur = m
            for _ in range((m.max_level() or 0) + 1):
                cur = u.bracket(cur)
            assert cur == zero

    def test_both_mode_verification(self, desk):
        # the acceptance suite runs the 100-pair check; keep the unit run light
        rng = random.Random(6)
        sigma = InnerExp(random_A_element(desk, rng))
        assert verify_automorphism(sigma, trials=25, seed=7, mode=MODE_ASSOC).passed
        assert verify_automorphism(sigma, trials=25, seed=7, mode=MODE_LIE).passed


class TestShiftV:
    def test_zero_shift_is_identity(self, desk):
        rng = random.Random(8)
        shift = ShiftV.identity(desk)
        for _ in range(10):
            w = random_element(desk, rng)
            assert shift.apply(w) == w

    def test_generator_images(self, desk):
        shift = ShiftV(desk, (3, 5))
        assert shift.apply(desk.x_poly(1)) == desk.x_poly(1) + desk.scalar(3)
        assert shift.apply(desk.d(2)) == desk.d(2) + desk.scalar(5)
        assert shift.apply(desk.d(1)) == desk.d(1)

    def test_fixes_lattice_points(self, desk):
        shift = ShiftV(desk, (3, 5))
        for coords in [(1, 0), (0, 1), (-1, 2)]:
            alpha = desk.lattice.ambient(coords)
            assert shift.apply(desk.x(alpha)) == desk.x(alpha)

    def test_both_mode_verification(self, desk):
        rng = random.Random(9)
        shift = ShiftV(desk, random_shift_vector(desk, rng))
        assert verify_automorphism(shift, trials=100, seed=10, mode=MODE_ASSOC).passed
        assert verify_automorphism(shift, trials=100, seed=10, mode=MODE_LIE).passed


class TestSigma1:
    def test_negates_lattice_points(self, desk):
        alpha = (Fraction(1, 2), Fraction(1, 2))
        assert apply_sigma1(desk, desk.x(alpha)) == -desk.x(alpha)

    def test_fixes_derivations(self, desk):
        for q in (1, 2):
            assert apply_sigma1(desk, desk.d(q)) == desk.d(q)

    def test_normal_ordering_correction(self, w01):
        e = w01.x((1,)) * w01.d(1)
        assert apply_sigma1(w01, e) == e + w01.x((1,))

    def test_order_two(self, desk):
        rng = random.Random(11)
        for _ in range(25):
            w = random_element(desk, rng)
            assert apply_sigma1(desk, apply_sigma1(desk, w)) == w

    def test_bracket_mode_passes(self, desk):
        assert verify_automorphism(Sigma1(desk), trials=100, seed=12,
                                   mode=MODE_LIE).passed

    def test_associative_mode_fails_on_squared_derivation(self, desk):
        d1 = desk.d(1)
        assert apply_sigma1(desk, d1 * d1) == -(d1 * d1)
        assert apply_sigma1(desk, d1) * apply_sigma1(desk, d1) == d1 * d1
        report = verify_automorphism(Sigma1(desk), trials=100, seed=12,
                                     mode=MODE_ASSOC)
        assert not report.passed
        assert report.counterexample is not None


class TestConjugationLaw:
    def test_transvection_example(self, z2):
        p, v2 = 3, Fraction(5, 2)
        tau = TauAut(z2, BlockMatrix(1, 1, [[1, 0], [p, 1]]),
                     Character.trivial(z2.lattice))
        shift = ShiftV(z2, (0, v2))
        inner, moved = conjugated_shift(tau, shift)
        assert inner.u == z2.x_poly(1, coeff=-p * v2)
        assert moved.v == (0, v2)
        tau_inv = tau.inverse()
        assert tau_inv.apply(shift.apply(tau.apply(z2.d(1)))) == \
            z2.d(1) + z2.scalar(p * v2)

    def test_agreement_on_generators(self, desk):
        rng = random.Random(13)
        for _ in range(20):
            tau = TauAut(desk, random_aut2(desk, rng),
                         random_character(desk.lattice, rng))
            shift = ShiftV(desk, random_shift_vector(desk, rng))
            inner, moved = conjugated_shift(tau, shift)
            tau_inv = tau.inverse()
            for key in generator_keys(desk):
                g = generator_element(desk, key)
                assert tau_inv.apply(shift.apply(tau.apply(g))) == \
                    inner.apply(moved.apply(g))


class TestComposeNormalForms:
    def test_identity_neutral(self, desk):
        rng = random.Random(14)
        ident = NormalFormAut.identity(desk)
        nf = random_normal_form_aut(desk, rng, allow_eps=False)
        assert compose_normal_forms(ident, nf).same_data(nf)
        left = compose_normal_forms(nf, ident)
        assert left.same_data(nf)

    def test_agreement_with_sequential_application(self, desk):
        rng = random.Random(15)
        for _ in range(10):
            a = random_normal_form_aut(desk, rng, allow_eps=False)
            b = random_normal_form_aut(desk, rng, allow_eps=False)
            composed = compose_normal_forms(a, b)
            w = random_element(desk, rng)
            assert composed.apply(w) == a.apply(b.apply(w))

    def test_twist_rejected(self, desk):
        rng = random.Random(16)
        nf = random_normal_form_aut(desk, rng, allow_eps=False)
        twisted = NormalFormAut(nf.tau, nf.u, nf.v, 1, MODE_LIE)
        with pytest.raises(Sigma1NotSupported):
            compose_normal_forms(twisted, nf)

    def test_composition_is_associative(self, desk):
        rng = random.Random(27)
        for _ in range(5):
            a = random_normal_form_aut(desk, rng, allow_eps=False)
            b = random_normal_form_aut(desk, rng, allow_eps=False)
            c = random_normal_form_aut(desk, rng, allow_eps=False)
            left = compose_normal_forms(compose_normal_forms(a, b), c)
            right = compose_normal_forms(a, compose_normal_forms(b, c))
            assert left.same_data(right)

    def test_symbolic_law_agrees_with_decomposition_route(self, desk):
        # two independent paths to the composite's factored form
        rng = random.Random(28)
        for _ in range(5):
            a = random_normal_form_aut(desk, rng, allow_eps=False)
            b = random_normal_form_aut(desk, rng, allow_eps=False)
            symbolic = compose_normal_forms(a, b)
            images = {key: a.apply(b.apply(generator_element(desk, key)))
                      for key in generator_keys(desk)}
            refactored = decompose_automorphism(
                FunctionalAut(desk, MODE_LIE, images))
            assert refactored.same_data(symbolic)

    def test_mixed_twist_composition_via_functional_route(self, desk):
        rng = random.Random(17)
        for _ in range(5):
            a = random_normal_form_aut(desk, rng, allow_eps=True)
            b = random_normal_form_aut(desk, rng, allow_eps=True)
            if a.eps == 0 and b.eps == 0:
                continue
            composed = compose_automorphisms(a, b)
            assert composed.eps == (a.eps + b.eps) % 2
            for key in generator_keys(desk):
                g = generator_element(desk, key)
                assert composed.apply(g) == a.apply(b.apply(g))


class TestInnerConjugation:
    def test_delta_sigma_u_delta_inverse(self, desk):
        # delta sigma_u delta^{-1} = sigma_{delta(u)} for delta a tau or a shift
        rng = random.Random(18)
        for _ in range(10):
            u = random_A_element(desk, rng)
            sigma_u = InnerExp(u)
            tau = TauAut(desk, random_aut2(desk, rng),
                         random_character(desk.lattice, rng))
            shift = ShiftV(desk, random_shift_vector(desk, rng))
            w = random_element(desk, rng)
            for delta, delta_inv in ((tau, tau.inverse()), (shift, shift.inverse())):
                lhs = delta.apply(sigma_u.apply(delta_inv.apply(w)))
                rhs = InnerExp(delta.apply(u)).apply(w)
                assert lhs == rhs

    def test_twist_conjugation_inverts_inner_exp(self, desk):
        # the twist negates the commutative part, so it conjugates
        # exp(ad u) to exp(ad -u)
        rng = random.Random(19)
        twist = Sigma1(desk)
        for _ in range(5):
            u = random_A_element(desk, rng)
            sigma_u = InnerExp(u)
            sigma_neg = InnerExp(-u)
            w = random_element(desk, rng)
            assert twist.apply(sigma_u.apply(twist.apply(w))) == sigma_neg.apply(w)


class TestVerify:
    def test_identity_passes(self, desk):
        report = verify_automorphism(NormalFormAut.identity(desk), trials=20, seed=19)
        assert report.passed
        assert "pass" in report.describe()

    def test_report_counterexample_fields(self, desk):
        report = verify_automorphism(Sigma1(desk), trials=50, seed=20,
                                     mode=MODE_ASSOC)
        assert not report.passed
        ce = report.counterexample
        lhs_check = ce["lhs"]
        a, b = ce["a"], ce["b"]
        twist = Sigma1(desk)
        assert twist.apply(a * b) == lhs_check
        assert twist.apply(a) * twist.apply(b) == ce["rhs"]


class TestDecompose:
    def test_identity_images(self, desk):
        phi = FunctionalAut.from_aut(NormalFormAut.identity(desk))
        nf = decompose_automorphism(phi)
        assert nf.is_identity()

    def test_sigma1_images(self, desk):
        phi = FunctionalAut.from_aut(Sigma1(desk), mode=MODE_LIE)
        nf = decompose_automorphism(phi)
        assert nf.eps == 1
        assert nf.tau.is_identity()
        assert nf.u.is_identity()
        assert nf.v.is_identity()

    def test_round_trip(self, desk):
        rng = random.Random(21)
        for _ in range(10):
            nf = random_normal_form_aut(desk, rng, allow_eps=True)
            recovered = decompose_automorphism(FunctionalAut.from_aut(nf))
            assert recovered.same_data(nf)

    def test_round_trip_drops_u_constant(self, desk):
        rng = random.Random(22)
        base = random_normal_form_aut(desk, rng, allow_eps=False)
        shifted_u = base.u.u + base.signature.scalar(7)
        nf = NormalFormAut(base.tau, InnerExp(shifted_u), base.v, 0)
        recovered = decompose_automorphism(FunctionalAut.from_aut(nf))
        assert recovered.same_data(nf)

    def test_rejects_level_two_derivation_image(self, desk):
        phi = FunctionalAut.from_aut(NormalFormAut.identity(desk))
        images = dict(phi.images)
        images[("d", 1)] = desk.d(1) + desk.d(2, 2)
        with pytest.raises(NotAnAutomorphism):
            decompose_automorphism(FunctionalAut(desk, MODE_LIE, images))

    def test_rejects_bad_unit_scale(self, desk):
        phi = FunctionalAut.from_aut(NormalFormAut.identity(desk))
        images = dict(phi.images)
        images[("one",)] = desk.scalar(2)
        with pytest.raises(NotAnAutomorphism):
            decompose_automorphism(FunctionalAut(desk, MODE_LIE, images))

    def test_rejects_nonconstant_flat_part_on_semisimple_slot(self, desk):
        phi = FunctionalAut.from_aut(NormalFormAut.identity(desk))
        images = dict(phi.images)
        # alpha = (1,0) has ambient second coordinate 1/2 != 0, so pick a point
        # with vanishing second coordinate instead: (1,-1) -> ambient (1/2, -1/2)?
        # Use the polynomial generator, whose lattice degree is zero.
        images[("d", 2)] = desk.d(2) + desk.x_poly(1)
        with pytest.raises(NotAnAutomorphism):
            decompose_automorphism(FunctionalAut(desk, MODE_LIE, images))

    def test_associative_mode_rejects_twist(self, desk):
        images = {key: apply_sigma1(desk, generator_element(desk, key))
                  for key in generator_keys(desk)}
        phi = FunctionalAut(desk, MODE_LIE, images)
        assert decompose_automorphism(phi).eps == 1
        with pytest.raises(NotAnAutomorphism):
            decompose_automorphism(FunctionalAut(desk, MODE_ASSOC, images))

    def test_functional_apply_matches_source(self, desk):
        rng = random.Random(23)
        nf = random_normal_form_aut(desk, rng, allow_eps=True)
        phi = FunctionalAut.from_aut(nf)
        for _ in range(5):
            w = random_element(desk, rng)
            assert phi.apply(w) == nf.apply(w)

    def test_round_trip_across_signatures(self):
        # no polynomial part, no semisimple part, and a rank-3 lattice
        shapes = [
            Signature(0, 1, Lattice(1, [(1,)])),
            Signature(1, 0, Lattice(1, [(Fraction(1, 2),)])),
            Signature(0, 2, Lattice(2, [(1, 0), (0, 1)])),
            Signature(2, 0, Lattice(2, [(1, 0), (0, 1)])),
        ]
        rng = random.Random(26)
        for sig in shapes:
            for _ in range(3):
                nf = random_normal_form_aut(sig, rng, allow_eps=True)
                recovered = decompose_automorphism(FunctionalAut.from_aut(nf))
                assert recovered.same_data(nf), sig


class TestFunctionalAut:
    def test_assoc_invariant_enforced(self, desk):
        nf = NormalFormAut.identity(desk, mode=MODE_ASSOC)
        images = {key: nf.apply(generator_element(desk, key))
                  for key in generator_keys(desk)}
        images[("x", 1, 1)] = images[("x", 1, 1)].scale(2)
        with pytest.raises(NotAnAutomorphism):
            FunctionalAut(desk, MODE_ASSOC, images)
        FunctionalAut(desk, MODE_LIE, images)  # no product law in bracket mode

    def test_missing_image_rejected(self, desk):
        with pytest.raises(KeyError):
            FunctionalAut(desk, MODE_LIE, {("one",): desk.one()})


class TestAutomorphismJson:
    def test_normal_form_round_trip(self, desk):
        rng = random.Random(24)
        nf = random_normal_form_aut(desk, rng, allow_eps=True)
        blob = json.dumps(nf.to_dict())
        back = NormalFormAut.from_dict(json.loads(blob))
        assert back.same_data(nf)
        assert back.mode == nf.mode
        assert json.dumps(back.to_dict()) == blob

    def test_functional_round_trip(self, desk):
        rng = random.Random(25)
        nf = random_normal_form_aut(desk, rng, allow_eps=False)
        phi = FunctionalAut.from_aut(nf, mode=MODE_ASSOC)
        blob = json.dumps(phi.to_dict())
        back = FunctionalAut.from_dict(json.loads(blob))
        assert back.images == phi.images
        assert back.mode == MODE_ASSOC
        assert json.dumps(back.to_dict()) == blob

    def test_schema_fields(self, desk):
        nf = NormalFormAut.identity(desk)
        data = nf.to_dict()
        assert set(data) == {"tau", "u", "v", "eps", "mode"}
        assert data["eps"] == 0
        assert data["tau"]["G"] == [["1", "0"], ["0", "1"]]
        assert data["v"] == ["0", "0"]
