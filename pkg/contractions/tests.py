import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from common.exceptions import (InvalidParameterError, NotIncreasingContractionError,
                               NotNormalContractionError)
from common.measure import FiniteMeasureSpace
from contractions import named
from contractions.helper import (apply, bp_compose, bp_from_contraction, build_Dn,
                                 contraction_from_bp, generator_family, limit_sequence,
                                 random_increasing_normal, random_normal_contraction,
                                 random_piecewise)
from contractions.piecewise import PiecewiseLinear, compose, identity
from contractions.serializers import PiecewiseLinearSerializer
from common.helper import load_data

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def named_normal_contractions():
    return [
        identity(), named.negation(), named.zero(), named.absolute(), named.pos_part(),
        named.clamp_sym(1.5), named.min_alpha(0.75), named.clamp_0_alpha(2.0),
        named.clamp(-1.0, 3.0), named.clamp(b=0.5), named.tent(2.0), named.tent(0.3),
        named.phi_x(1.0), named.phi_x(-2.0), named.phi_x1x2(0.5, 2.0),
        named.phi_x1x2(-1.0, 2.0), named.phi_x1x2(-3.0, -1.0), named.sigma_x(1.5),
        named.case2_sigma(0.5, 2.0), named.case2_psi(0.5, 2.0), named.case3_psi(-1.0, 2.0),
        named.scaled(0.5),
    ]


class PiecewiseLinearTest(SimpleTestCase):
    def test_eval_examples(self):
        self.assertEqual(named.absolute().eval(-2.0), 2.0)
        self.assertEqual(named.tent(2.0).eval(3.0), -1.0)
        self.assertEqual(compose(named.absolute(), named.clamp_sym(1.0)).eval(2.0), 1.0)

    def test_eval_array(self):
        values = named.clamp_sym(1.0).eval(np.array([-3.0, 0.5, 2.0]))
        self.assertEqual(values.tolist(), [-1.0, 0.5, 1.0])

    def test_canonical_form_merges_equal_slopes(self):
        C = PiecewiseLinear((-1.0, 0.0, 1.0), (1.0, 1.0, 1.0, 0.0), 0.0)
        self.assertEqual(C.breakpoints, (1.0,))
        self.assertEqual(C.slopes, (1.0, 0.0))

    def test_rejects_bad_data(self):
        with self.assertRaises(InvalidParameterError):
            PiecewiseLinear((0.0,), (1.0,), 0.0)
        with self.assertRaises(InvalidParameterError):
            PiecewiseLinear((1.0, 0.0), (1.0, 0.0, 1.0), 0.0)
        with self.assertRaises(InvalidParameterError):
            PiecewiseLinear((), (np.inf,), 0.0)

    def test_continuity_at_breakpoints(self):
        rng = np.random.default_rng(7)
        for _ in range(50):
            C = random_piecewise(rng)
            for b in C.breakpoints:
                h = 1e-9
                from_left = C.eval(b - h) + C.left_slope_at(b) * h
                from_right = C.eval(b + h) - C.slope_at(b) * h
                self.assertAlmostEqual(C.eval(b), from_left, delta=1e-11)
                self.assertAlmostEqual(C.eval(b), from_right, delta=1e-11)

    def test_verify_normal(self):
        self.assertTrue(named.absolute().verify_normal())
        verdict = named.scaled(2.0).verify_normal()
        self.assertFalse(verdict)
        self.assertIn('slope', verdict.description)
        verdict = (identity() + 1.0).verify_normal()
        self.assertFalse(verdict)
        self.assertIn('C(0)', verdict.description)

    def test_named_contractions_are_normal(self):
        for C in named_normal_contractions():
            self.assertTrue(C.verify_normal(), C)
            self.assertEqual(C.eval(0.0), 0.0)

    def test_tent_is_identity_on_middle_band(self):
        alpha = 3.0
        C = named.tent(alpha)
        grid = np.linspace(-alpha / 2, alpha / 2, 101)
        np.testing.assert_array_equal(C.eval(grid), grid)
        self.assertEqual(C.slopes, (-1.0, 1.0, -1.0))

    def test_clamp_0_alpha_is_pos_part_of_clamp_sym(self):
        for alpha in (0.0, 0.5, 2.0, 7.25):
            self.assertEqual(named.clamp_0_alpha(alpha),
                             compose(named.pos_part(), named.clamp_sym(alpha)))

    def test_phi_at_zero(self):
        phi = named.phi_x(0.0)
        self.assertEqual(phi.eval(1.0), -1.0)
        self.assertEqual(phi.eval(-1.0), -1.0)

    def test_straddling_phi_closed_form(self):
        x1, x2 = -1.0, 2.0
        phi = named.phi_x1x2(x1, x2)
        t = np.linspace(-10, 10, 1001)
        expected = -t - 2 * np.maximum(x1 - t, 0) + 2 * np.maximum(t - x2, 0)
        np.testing.assert_allclose(phi.eval(t), expected, atol=1e-12)

    def test_case3_psi_matches_composition(self):
        for x1, x2 in ((-1.0, 2.0), (-0.25, 0.5), (-3.0, 1.0)):
            self.assertEqual(named.case3_psi(x1, x2), named.case3_psi_by_composition(x1, x2))

    def test_make_named(self):
        self.assertEqual(named.make_named('clamp_sym', alpha=1.0), named.clamp_sym(1.0))
        with self.assertRaises(InvalidParameterError):
            named.make_named('tent', alpha=-1.0)
        with self.assertRaises(InvalidParameterError):
            named.make_named('phi_x1x2', x1=2.0, x2=1.0)
        with self.assertRaises(InvalidParameterError):
            named.make_named('no_such_kind')
        with self.assertRaises(InvalidParameterError):
            named.make_named('abs', alpha=1.0)

    def test_algebra(self):
        C = named.absolute() + named.pos_part()
        self.assertEqual(C.eval(-2.0), 2.0)
        self.assertEqual(C.eval(2.0), 4.0)
        self.assertEqual((2.0 * named.clamp_sym(1.0)).eval(5.0), 2.0)
        self.assertEqual(named.pos_part().scale_argument(-1.0).eval(-3.0), 3.0)
        self.assertEqual(named.absolute().shift_argument(1.0).eval(0.0), 1.0)


class CompositionTest(SimpleTestCase):
    def test_composition_is_exact(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            C1, C2 = random_piecewise(rng), random_piecewise(rng)
            C = compose(C1, C2)
            t = rng.uniform(-5, 5, size=100)
            direct = C1.eval(C2.eval(t))
            np.testing.assert_allclose(C.eval(t), direct, rtol=0, atol=1e-12 * 50)

    def test_identity_law(self):
        for C in named_normal_contractions():
            self.assertEqual(compose(identity(), C), C)
            self.assertEqual(compose(C, identity()), C)

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_normality_is_closed_under_composition(self, seed):
        rng = np.random.default_rng(seed)
        C1, C2 = random_normal_contraction(rng), random_normal_contraction(rng)
        self.assertTrue(compose(C1, C2).verify_normal())

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_normal_contraction_shrinks_functions(self, seed):
        rng = np.random.default_rng(seed)
        C = random_normal_contraction(rng)
        space = FiniteMeasureSpace.counting(6)
        f = space.function(rng.uniform(-5, 5, size=6))
        self.assertTrue(np.all(np.abs(apply(C, f).values) <= np.abs(f.values) + 1e-12))

    def test_apply_examples(self):
        space = FiniteMeasureSpace.counting(2)
        f = space.function([-1.0, 2.0])
        self.assertEqual(apply(identity(), f), f)
        self.assertEqual(apply(named.absolute(), f).values.tolist(), [1.0, 2.0])
        g = space.function([-3.0, 0.5])
        self.assertEqual(apply(named.clamp_sym(1.0), g).values.tolist(), [-1.0, 0.5])


class BenilanPicardTest(SimpleTestCase):
    def test_examples(self):
        self.assertEqual(bp_from_contraction(identity()), named.zero())
        self.assertEqual(bp_from_contraction(named.negation()), identity())
        p = bp_from_contraction(named.pos_part())
        self.assertEqual(p.eval(-2.0), -1.0)
        self.assertEqual(p.eval(2.0), 0.0)

    def test_bijection_on_named_contractions(self):
        for C in named_normal_contractions():
            p = bp_from_contraction(C)
            self.assertTrue(p.verify_increasing_normal(), C)
            self.assertEqual(contraction_from_bp(p), C)

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_bijection_on_random_contractions(self, seed):
        C = random_normal_contraction(np.random.default_rng(seed))
        self.assertEqual(contraction_from_bp(bp_from_contraction(C)), C)

    def test_preconditions(self):
        with self.assertRaises(NotNormalContractionError):
            bp_from_contraction(named.scaled(2.0))
        with self.assertRaises(NotIncreasingContractionError):
            contraction_from_bp(named.negation())

    def test_bp_compose_examples(self):
        p = named.pos_part() * 0.5
        self.assertEqual(bp_compose(named.zero(), p), p)
        self.assertEqual(bp_compose(p, named.zero()), p)
        zero = bp_compose(identity(), identity())
        self.assertEqual(zero.eval(1.0), 0.0)
        self.assertEqual(zero, named.zero())

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_bp_compose_corresponds_to_composition(self, seed):
        rng = np.random.default_rng(seed)
        p1, p2 = random_increasing_normal(rng), random_increasing_normal(rng)
        p = bp_compose(p1, p2)
        self.assertTrue(p.verify_increasing_normal())
        # p1 acts first: the combination belongs to C2 ∘ C1
        expected = compose(contraction_from_bp(p2), contraction_from_bp(p1))
        t = np.linspace(-8, 8, 401)
        np.testing.assert_allclose(contraction_from_bp(p).eval(t), expected.eval(t),
                                   rtol=0, atol=1e-12)
        self.assertEqual(contraction_from_bp(p), expected)


class DnTest(SimpleTestCase):
    def test_D0_is_tent(self):
        D0 = build_Dn(0)
        self.assertEqual(D0, named.tent(2.0))
        self.assertEqual(abs(D0.eval(3.0)), 1.0)

    def test_D1_on_grid(self):
        grid = np.linspace(-9, 9, 10001)
        self.assertLessEqual(np.max(np.abs(build_Dn(1).eval(grid))), 1 / 3 + 1e-12)

    def test_convergence_to_zero(self):
        for n in range(7):
            D = build_Dn(n)
            self.assertTrue(D.verify_normal(), n)
            self.assertEqual(D.eval(0.0), 0.0)
            grid = np.linspace(-3.0 ** (n + 1), 3.0 ** (n + 1), 10 ** 4)
            self.assertLessEqual(np.max(np.abs(D.eval(grid))), 3.0 ** -n + 1e-12, n)

    def test_negative_n(self):
        with self.assertRaises(InvalidParameterError):
            build_Dn(-1)


class FamiliesTest(SimpleTestCase):
    def test_generator_family(self):
        self.assertEqual(generator_family(-1), named.negation())
        self.assertEqual(generator_family(1, 2.0), named.phi_x(2.0))
        self.assertEqual(generator_family(-1, -1.0, 2.0), -named.phi_x1x2(-1.0, 2.0))
        for member in (generator_family(1, 0.5), generator_family(-1, 0.5, 1.5)):
            self.assertTrue(member.verify_normal())
        with self.assertRaises(InvalidParameterError):
            generator_family(2)

    def test_limit_sequences(self):
        approximants, limit = limit_sequence('min_alpha', 30, alpha=1.0)
        self.assertEqual(limit, named.min_alpha(1.0))
        t = np.linspace(-3, 3, 61)
        gaps = [np.max(np.abs(C.eval(t) - limit.eval(t))) for C in approximants]
        self.assertTrue(all(b <= a for a, b in zip(gaps, gaps[1:])))
        self.assertLess(gaps[-1], 1e-8)
        approximants, limit = limit_sequence('Dn', 4)
        self.assertEqual(limit, named.zero())
        self.assertEqual(len(approximants), 4)
        with self.assertRaises(InvalidParameterError):
            limit_sequence('nope', 3)


class PiecewiseLinearSerializerTest(SimpleTestCase):
    def test_raw_form(self):
        C = load_data(PiecewiseLinearSerializer,
                      {'breakpoints': [0.0], 'slopes': [-1.0, 1.0], 'anchor': 0.0})
        self.assertEqual(C, named.absolute())

    def test_named_form(self):
        C = load_data(PiecewiseLinearSerializer, {'kind': 'tent', 'params': {'alpha': 2.0}})
        self.assertEqual(C, named.tent(2.0))

    def test_invalid_documents(self):
        from rest_framework.exceptions import ValidationError
        with self.assertRaises(ValidationError):
            load_data(PiecewiseLinearSerializer, {'anchor': 1.0})
        with self.assertRaises(ValidationError):
            load_data(PiecewiseLinearSerializer, {'kind': 'tent', 'params': {'alpha': -2.0}})
        with self.assertRaises(ValidationError):
            load_data(PiecewiseLinearSerializer, {'breakpoints': [1.0], 'slopes': [1.0]})
