import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from rest_framework.exceptions import ValidationError

from common.exceptions import (DomainMismatchError, InvalidBandError, InvalidFunctionalError,
                               InvalidParameterError, SolverDidNotConverge, UnknownCheckError)
from common.helper import load_data
from common.measure import FiniteMeasureSpace, norm
from common.utility import sample_values
from contractions import named
from criteria.checks import compatibility_residual
from functionals.edges import (HuberEdge, IntervalIndicator, PowerEdge, QuadraticWeighted,
                               TruncatedAbsEdge)
from functionals.energies import (Edge, MixedDirichletEnergy, QuadraticForm, ZeroFunctional,
                                  f_shift, make_mixed_energy)
from functionals.helper import random_mixed_energy
from resolvent.evolution import evolve, evolve_path, monotone_energy_residuals, semigroup_defect
from resolvent.projection import (band_projection, in_band, product_inner,
                                  product_projection_residual, projection_characterization)
from resolvent.properties import PROPERTY_KINDS, convergence_residual, resolvent_property_check
from resolvent.serializers import SolverConfigSerializer
from resolvent.solvers import (ADMM, EXACT, INDICATORS, PROXIMAL_GRADIENT, SolverConfig,
                               quadratic_resolvent, resolvent, select_strategy)

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)

# edge kinds with a closed-form proximal map
PROX_KINDS = ('power1', 'power2', 'huber', 'interval_indicator', 'pwl_convex',
              'quadratic_weighted')

TWO_POINTS = FiniteMeasureSpace.counting(2)
DIFFERENCE_SQUARED = QuadraticForm(TWO_POINTS, [[1.0, -1.0], [-1.0, 1.0]])


def convex_instance(seed, kinds=PROX_KINDS):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 5))
    space = FiniteMeasureSpace(range(n), rng.uniform(0.5, 2.0, size=n))
    return rng, space, random_mixed_energy(space, rng, kinds=kinds, edge_probability=0.6)


def random_fn(space, rng):
    return space.function(sample_values(rng, len(space)))


class SolverConfigTest(SimpleTestCase):
    def test_defaults(self):
        cfg = SolverConfig()
        self.assertEqual(cfg.tolerance, 1e-8)
        self.assertEqual(cfg.max_iterations, 20000)
        self.assertEqual(cfg.strategy, 'auto')

    def test_invalid(self):
        with self.assertRaises(InvalidParameterError):
            SolverConfig(tolerance=0.0)
        with self.assertRaises(InvalidParameterError):
            SolverConfig(max_iterations=0)
        with self.assertRaises(InvalidParameterError):
            SolverConfig(strategy='newton')

    def test_serializer(self):
        cfg = load_data(SolverConfigSerializer, {'tolerance': 1e-6, 'strategy': 'admm'})
        self.assertEqual(cfg.tolerance, 1e-6)
        self.assertEqual(cfg.strategy, ADMM)
        with self.assertRaises(ValidationError):
            load_data(SolverConfigSerializer, {'strategy': 'newton'})

    def test_strategy_selection(self):
        indicator = make_mixed_energy(TWO_POINTS, [Edge(0, 1, IntervalIndicator(0.0))])
        absolute = make_mixed_energy(TWO_POINTS, [Edge(0, 1, PowerEdge(1.0))])
        huber = make_mixed_energy(TWO_POINTS, [Edge(0, 1, HuberEdge(1.0))])
        self.assertEqual(select_strategy(ZeroFunctional(TWO_POINTS)), EXACT)
        self.assertEqual(select_strategy(indicator), INDICATORS)
        self.assertEqual(select_strategy(huber), PROXIMAL_GRADIENT)
        self.assertEqual(select_strategy(DIFFERENCE_SQUARED), PROXIMAL_GRADIENT)
        self.assertEqual(select_strategy(absolute), ADMM)
        self.assertEqual(select_strategy(f_shift(absolute, TWO_POINTS.function([1.0, 0.0]))), ADMM)


class ResolventTest(SimpleTestCase):
    def test_zero_functional(self):
        f = TWO_POINTS.function([3.0, -7.0])
        result = resolvent(ZeroFunctional(TWO_POINTS), 2.0, f)
        self.assertEqual(result.minimizer, f)
        self.assertTrue(result.converged)
        self.assertEqual(result.optimality_residual, 0.0)

    def test_two_point_quadratic(self):
        f = TWO_POINTS.function([1.0, -1.0])
        result = resolvent(DIFFERENCE_SQUARED, 0.25, f)
        self.assertTrue(result.converged)
        self.assertTrue(result.minimizer.allclose(TWO_POINTS.function([0.5, -0.5]), atol=1e-8))

    def test_quadratic_matches_linear_solve(self):
        cfg = SolverConfig()
        f = TWO_POINTS.function([1.0, -1.0])
        for lam in (1e-2, 1e-1, 1.0, 10.0):
            with self.subTest(lam=lam):
                result = resolvent(DIFFERENCE_SQUARED, lam, f, cfg)
                self.assertTrue(result.converged)
                d = result.minimizer.values
                self.assertAlmostEqual(d[0] - d[1], 2.0 / (1.0 + 4.0 * lam),
                                       delta=10 * cfg.tolerance)
                exact = quadratic_resolvent(DIFFERENCE_SQUARED, lam, f)
                self.assertLessEqual(norm(result.minimizer - exact), 10 * cfg.tolerance)

    def test_weighted_quadratic_matches_linear_solve(self):
        space = FiniteMeasureSpace(range(3), [0.5, 1.0, 2.0])
        E = QuadraticForm(space, [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]])
        f = space.function([2.0, -1.0, 0.5])
        result = resolvent(E, 0.7, f)
        self.assertTrue(result.converged)
        self.assertLessEqual(norm(result.minimizer - quadratic_resolvent(E, 0.7, f)), 1e-7)
        exact = resolvent(E, 0.7, f, SolverConfig(strategy='exact'))
        self.assertLessEqual(exact.optimality_residual, 1e-10)

    def test_quadratic_edges_agree_with_quadratic_form(self):
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, QuadraticWeighted(1.0))])
        f = TWO_POINTS.function([1.0, -1.0])
        result = resolvent(E, 0.25, f)
        self.assertTrue(result.converged)
        self.assertTrue(result.minimizer.allclose(TWO_POINTS.function([0.5, -0.5]), atol=1e-8))

    def test_equality_indicator_weighted_mean(self):
        space = FiniteMeasureSpace(['a', 'b'], [1.0, 3.0])
        E = make_mixed_energy(space, [Edge(0, 1, IntervalIndicator(0.0))])
        f = space.function([2.0, -2.0])
        for lam in (0.1, 1.0, 50.0):
            with self.subTest(lam=lam):
                result = resolvent(E, lam, f)
                self.assertEqual(result.strategy, INDICATORS)
                self.assertTrue(result.converged)
                self.assertTrue(result.minimizer.allclose(space.constant(-1.0), atol=1e-10))

    def test_equality_indicator_components(self):
        space = FiniteMeasureSpace.counting(4)
        E = make_mixed_energy(space, [Edge(0, 1, IntervalIndicator(0.0)),
                                      Edge(3, 2, IntervalIndicator(0.0))])
        result = resolvent(E, 1.0, space.function([1.0, 3.0, -4.0, 0.0]))
        np.testing.assert_allclose(result.minimizer.values, [2.0, 2.0, -2.0, -2.0], atol=1e-12)

    def test_admm_on_equality_indicator(self):
        space = FiniteMeasureSpace(['a', 'b'], [1.0, 3.0])
        E = make_mixed_energy(space, [Edge(0, 1, IntervalIndicator(0.0))])
        result = resolvent(E, 1.0, space.function([2.0, -2.0]), SolverConfig(strategy='admm'))
        self.assertTrue(result.converged)
        self.assertTrue(result.minimizer.allclose(space.constant(-1.0), atol=1e-8))
        self.assertTrue(math.isfinite(result.objective))

    def test_absolute_difference(self):
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, PowerEdge(1.0))])
        f = TWO_POINTS.function([1.0, -1.0])
        # soft threshold of the difference: (1 - λ, -1 + λ) for λ < 1, the mean 0 otherwise
        for lam, expected in ((0.25, [0.75, -0.75]), (2.0, [0.0, 0.0])):
            with self.subTest(lam=lam):
                result = resolvent(E, lam, f)
                self.assertEqual(result.strategy, ADMM)
                self.assertTrue(result.converged)
                self.assertTrue(result.minimizer.allclose(TWO_POINTS.function(expected),
                                                          atol=1e-7))

    def test_box_constraint_active(self):
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, IntervalIndicator(1.0)),
                                           Edge(0, 1, QuadraticWeighted(0.5))])
        result = resolvent(E, 1.0, TWO_POINTS.function([3.0, -3.0]))
        self.assertTrue(result.converged)
        # the difference is pushed onto the edge of [-1, 1]; the mean is kept
        np.testing.assert_allclose(result.minimizer.values, [0.5, -0.5], atol=1e-7)

    def test_smooth_and_admm_agree(self):
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, HuberEdge(0.5, 2.0)),
                                           Edge(1, 0, QuadraticWeighted(0.3))])
        f = TWO_POINTS.function([2.0, -0.5])
        smooth = resolvent(E, 0.8, f)
        split = resolvent(E, 0.8, f, SolverConfig(strategy='admm'))
        self.assertTrue(smooth.converged)
        self.assertTrue(split.converged)
        self.assertLessEqual(norm(smooth.minimizer - split.minimizer), 1e-7)

    def test_f_shift_center(self):
        base = make_mixed_energy(TWO_POINTS, [Edge(0, 1, PowerEdge(1.0))])
        E = f_shift(base, TWO_POINTS.function([2.0, 0.0]))
        result = resolvent(E, 0.5, TWO_POINTS.function([1.0, -1.0]))
        self.assertEqual(result.strategy, ADMM)
        self.assertTrue(result.converged)

    def test_subgradient_fallback(self):
        result = resolvent(DIFFERENCE_SQUARED, 0.25, TWO_POINTS.function([1.0, -1.0]),
                           SolverConfig(strategy='subgradient_diminishing', tolerance=1e-6))
        self.assertTrue(result.minimizer.allclose(TWO_POINTS.function([0.5, -0.5]), atol=1e-4))

    def test_non_convergence_is_flagged(self):
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, PowerEdge(1.0))])
        with self.assertLogs('resolvent.solvers', level='WARNING'):
            result = resolvent(E, 0.25, TWO_POINTS.function([1.0, -1.0]),
                               SolverConfig(max_iterations=1))
        self.assertFalse(result.converged)
        self.assertEqual(result.iterations, 1)

    def test_errors(self):
        f = TWO_POINTS.function([1.0, -1.0])
        nonconvex = MixedDirichletEnergy(TWO_POINTS, [Edge(0, 1, TruncatedAbsEdge(1.0))],
                                         allow_nonconvex=True)
        with self.assertRaises(InvalidFunctionalError):
            resolvent(nonconvex, 1.0, f)
        for lam in (0.0, -1.0, math.inf):
            with self.assertRaises(InvalidParameterError):
                resolvent(DIFFERENCE_SQUARED, lam, f)
        with self.assertRaises(DomainMismatchError):
            resolvent(DIFFERENCE_SQUARED, 1.0, FiniteMeasureSpace.counting(3).zeros())
        with self.assertRaises(InvalidParameterError):
            resolvent(DIFFERENCE_SQUARED, 1.0, f, SolverConfig(strategy='admm'))

    def test_result_document(self):
        data = resolvent(DIFFERENCE_SQUARED, 0.25, TWO_POINTS.function([1.0, -1.0])).to_dict()
        self.assertEqual(set(data), {'minimizer', 'objective', 'optimality_residual',
                                     'iterations', 'converged', 'strategy', 'lambda'})
        self.assertEqual(data['lambda'], 0.25)

    @settings(max_examples=15, deadline=None)
    @given(seed=seeds)
    def test_certificate_bounds_the_error(self, seed):
        rng, space, E = convex_instance(seed)
        lam = float(rng.uniform(0.1, 2.0))
        f = random_fn(space, rng)
        result = resolvent(E, lam, f)
        reference = resolvent(E, lam, f, SolverConfig(tolerance=1e-11))
        self.assertTrue(result.converged, result)
        self.assertLessEqual(result.optimality_residual, SolverConfig().tolerance)
        # a certificate r at g gives Φ(g) - min Φ <= λ r² / 2
        gap = lam * result.optimality_residual ** 2 / 2.0
        self.assertLessEqual(result.objective,
                             reference.objective + gap + 1e-9 * max(1.0, abs(result.objective)),
                             (result, reference))
        if reference.converged:
            self.assertLessEqual(norm(result.minimizer - reference.minimizer),
                                 result.distance_bound + reference.distance_bound + 1e-10)

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds)
    def test_admm_matches_soft_threshold(self, seed):
        rng = np.random.default_rng(seed)
        w, q = (float(x) for x in rng.uniform(0.1, 2.0, size=2))
        lam = float(np.exp(rng.uniform(-3.0, 2.0)))
        f = random_fn(TWO_POINTS, rng)
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, PowerEdge(1.0, w)),
                                           Edge(1, 0, QuadraticWeighted(q))])
        result = resolvent(E, lam, f, SolverConfig(strategy='admm'))
        d0 = f.values[0] - f.values[1]
        d = math.copysign(max(abs(d0) - 2.0 * lam * w, 0.0), d0) / (1.0 + 4.0 * lam * q)
        mean = float(np.mean(f.values))
        expected = TWO_POINTS.function([mean + d / 2.0, mean - d / 2.0])
        self.assertTrue(result.converged, result)
        self.assertLessEqual(norm(result.minimizer - expected), result.distance_bound + 1e-10,
                             (result, expected))


class EvolutionTest(SimpleTestCase):
    def test_trivial(self):
        f = TWO_POINTS.function([1.0, -1.0])
        self.assertIs(evolve(DIFFERENCE_SQUARED, 0.0, 5, f), f)
        self.assertEqual(evolve_path(DIFFERENCE_SQUARED, 0.0, 5, f), [])
        self.assertEqual(evolve(ZeroFunctional(TWO_POINTS), 3.0, 4, f), f)

    def test_invalid_horizon(self):
        f = TWO_POINTS.function([1.0, -1.0])
        with self.assertRaises(InvalidParameterError):
            evolve(DIFFERENCE_SQUARED, -1.0, 5, f)
        with self.assertRaises(InvalidParameterError):
            evolve(DIFFERENCE_SQUARED, 1.0, 0, f)
        with self.assertRaises(InvalidParameterError):
            evolve(DIFFERENCE_SQUARED, 1.0, 2.5, f)

    def test_two_point_closed_form(self):
        f = TWO_POINTS.function([1.0, -1.0])
        g = evolve(DIFFERENCE_SQUARED, 0.25, 100, f)
        d = g.values[0] - g.values[1]
        self.assertAlmostEqual(d, 2.0 / 1.01 ** 100, delta=1e-6)
        self.assertAlmostEqual(g.values[0] + g.values[1], 0.0, delta=1e-8)

    def test_converges_to_exponential(self):
        f = TWO_POINTS.function([1.0, -1.0])
        cfg = SolverConfig(strategy='exact')
        limit = 2.0 * math.exp(-1.0)
        errors = []
        for steps in (10, 100, 1000):
            g = evolve(DIFFERENCE_SQUARED, 0.25, steps, f, cfg)
            errors.append(g.values[0] - g.values[1] - limit)
        self.assertGreater(errors[0], 0.0)
        self.assertLessEqual(errors[1], errors[0] / 2.0)
        self.assertLessEqual(errors[2], errors[1] / 2.0)
        self.assertGreater(errors[2], 0.0)

    def test_semigroup_defect_shrinks(self):
        f = TWO_POINTS.function([1.0, -1.0])
        cfg = SolverConfig(strategy='exact')
        # both runs use the same step; the defect is rounding only
        self.assertLess(semigroup_defect(DIFFERENCE_SQUARED, 0.5, 8, f, cfg), 1e-12)
        defects = [norm(evolve(DIFFERENCE_SQUARED, 0.5, n, f, cfg)
                        - evolve(DIFFERENCE_SQUARED, 0.25, n,
                                 evolve(DIFFERENCE_SQUARED, 0.25, n, f, cfg), cfg))
                   for n in (4, 8, 16, 32)]
        self.assertTrue(all(b < a for a, b in zip(defects, defects[1:])), defects)

    def test_energy_decreases(self):
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, PowerEdge(1.0)),
                                           Edge(1, 0, QuadraticWeighted(0.5))])
        f = TWO_POINTS.function([2.0, -1.0])
        path = evolve_path(E, 1.0, 10, f)
        self.assertEqual(len(path), 10)
        residuals = monotone_energy_residuals(E, f, path)
        self.assertEqual(len(residuals), 10)
        self.assertFalse(any(r.violated for r in residuals))

    def test_non_convergence_raises(self):
        E = make_mixed_energy(TWO_POINTS, [Edge(0, 1, PowerEdge(1.0))])
        with self.assertLogs('resolvent', level='WARNING'):
            with self.assertRaises(SolverDidNotConverge) as raised:
                evolve(E, 1.0, 3, TWO_POINTS.function([1.0, -1.0]),
                       SolverConfig(max_iterations=1))
        self.assertFalse(raised.exception.result.converged)


class BandProjectionTest(SimpleTestCase):
    def test_single_point(self):
        space = FiniteMeasureSpace.counting(1)
        pu, pv = band_projection(space.function([4.0]), space.function([0.0]), 0.0, 1.0)
        self.assertEqual(pu.values.tolist(), [3.0])
        self.assertEqual(pv.values.tolist(), [1.0])

    def test_inside_band_unchanged(self):
        space = FiniteMeasureSpace.counting(3)
        u, v = space.function([1.0, 0.5, -1.0]), space.function([0.5, 0.5, -2.0])
        pu, pv = band_projection(u, v, -1.0, 1.0)
        self.assertTrue(pu.allclose(u))
        self.assertTrue(pv.allclose(v))

    def test_open_bounds(self):
        space = FiniteMeasureSpace.counting(2)
        u, v = space.function([5.0, -5.0]), space.function([0.0, 0.0])
        pu, pv = band_projection(u, v, None, 1.0)
        np.testing.assert_allclose(pu.values, [3.5, -5.0])
        np.testing.assert_allclose(pv.values, [1.5, 0.0])
        pu, pv = band_projection(u, v, -math.inf, math.inf)
        self.assertTrue(pu.allclose(u))

    def test_invalid_band(self):
        space = FiniteMeasureSpace.counting(1)
        u = space.function([1.0])
        with self.assertRaises(InvalidBandError):
            band_projection(u, u, 0.5, 1.0)
        with self.assertRaises(InvalidBandError):
            band_projection(u, u, -1.0, -0.5)
        with self.assertRaises(DomainMismatchError):
            band_projection(u, FiniteMeasureSpace.counting(2).zeros(), 0.0, 1.0)

    @settings(max_examples=50, deadline=None)
    @given(seed=seeds)
    def test_projection_properties(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 6))
        space = FiniteMeasureSpace(range(n), rng.uniform(0.5, 2.0, size=n))
        a, b = -float(rng.uniform(0.0, 2.0)), float(rng.uniform(0.0, 2.0))
        u, v, u2, v2 = (random_fn(space, rng) for _ in range(4))
        pu, pv = band_projection(u, v, a, b)
        self.assertTrue(in_band(pu, pv, a, b))
        self.assertTrue((pu + pv).allclose(u + v, atol=1e-12))
        # idempotent
        qu, qv = band_projection(pu, pv, a, b)
        self.assertTrue(qu.allclose(pu, atol=1e-12) and qv.allclose(pv, atol=1e-12))
        # variational inequality against a point of the band
        ou, ov = band_projection(u2, v2, a, b)
        self.assertLessEqual(projection_characterization(u, v, ou, ov, a, b), 1e-9)
        # 1-Lipschitz in the product space
        ru, rv = band_projection(u2, v2, a, b)
        moved = product_inner((pu - ru, pv - rv), (pu - ru, pv - rv))
        original = product_inner((u - u2, v - v2), (u - u2, v - v2))
        self.assertLessEqual(moved, original + 1e-9)

    @settings(max_examples=25, deadline=None)
    @given(seed=seeds)
    def test_projection_invariance_is_compatibility(self, seed):
        rng, space, E = convex_instance(seed)
        u, v = random_fn(space, rng), random_fn(space, rng)
        a, b = -float(rng.uniform(0.0, 2.0)), float(rng.uniform(0.0, 2.0))
        residual = product_projection_residual(E, u, v, a, b)
        self.assertFalse(residual.violated)
        expected = compatibility_residual(E, named.clamp(a, b), (u + v) / 2.0, (u - v) / 2.0)
        if math.isinf(expected.rhs):
            self.assertTrue(residual.vacuous)
        else:
            self.assertAlmostEqual(residual.lhs, expected.lhs,
                                   delta=1e-9 * max(1.0, abs(expected.lhs)))


class PropertyCheckTest(SimpleTestCase):
    def test_nonexpansive_same_input(self):
        f = TWO_POINTS.function([1.0, -1.0])
        residual = resolvent_property_check('nonexpansive', DIFFERENCE_SQUARED, 1.0, f, f)
        self.assertTrue(residual.satisfied)
        self.assertEqual(residual.lhs, 0.0)
        self.assertEqual(residual.rhs, 0.0)

    def test_order_preserving_quadratic(self):
        v = TWO_POINTS.function([0.3, -0.2])
        u = v + TWO_POINTS.function([1.0, 2.0])
        for lam in (0.1, 1.0, 10.0):
            with self.subTest(lam=lam):
                residual = resolvent_property_check('order_preserving', DIFFERENCE_SQUARED,
                                                    lam, u, v)
                self.assertTrue(residual.satisfied)
                self.assertLessEqual(residual.lhs, 0.0 + 1e-7)

    def test_linfty_band_power2(self):
        space = FiniteMeasureSpace(range(3), [1.0, 2.0, 0.5])
        E = make_mixed_energy(space, [Edge(0, 1, PowerEdge(2.0)), Edge(1, 2, PowerEdge(2.0, 3.0))])
        v = space.function([0.0, 1.0, -1.0])
        u = v + space.function([0.5, -2.0, 0.2])
        residual = resolvent_property_check('linfty_band', E, 0.5, u, v, alpha=0.5)
        self.assertFalse(residual.violated)
        self.assertFalse(residual.vacuous)

    def test_vacuous_without_hypothesis(self):
        u = TWO_POINTS.function([1.0, -1.0])
        v = TWO_POINTS.function([0.0, 0.0])
        for kind in ('order_preserving', 'invariance_0_alpha'):
            residual = resolvent_property_check(kind, DIFFERENCE_SQUARED, 1.0, u, v, alpha=5.0)
            self.assertTrue(residual.vacuous)
        residual = resolvent_property_check('linfty_band', DIFFERENCE_SQUARED, 1.0, u, v,
                                            alpha=0.5)
        self.assertTrue(residual.vacuous)

    def test_non_converged_solve_is_vacuous(self):
        space = FiniteMeasureSpace.counting(3)
        E = make_mixed_energy(space, [Edge(0, 1, PowerEdge(1.0)), Edge(1, 2, PowerEdge(1.0)),
                                      Edge(0, 2, IntervalIndicator(0.1))])
        v = space.function([0.0, 1.0, -1.0])
        u = v + space.function([0.5, 0.5, 0.5])
        cfg = SolverConfig(max_iterations=1)
        with self.assertLogs('resolvent', level='WARNING'):
            jv = resolvent(E, 0.5, v, cfg)
            for kind in PROPERTY_KINDS:
                residual = resolvent_property_check(kind, E, 0.5, u, v, alpha=1.0, cfg=cfg)
                self.assertTrue(residual.vacuous, (kind, residual))
                self.assertFalse(residual.satisfied)
        self.assertEqual(jv.optimality_residual, math.inf)
        self.assertTrue(convergence_residual(jv, cfg).violated)

    def test_reused_solves(self):
        v = TWO_POINTS.function([0.3, -0.2])
        u = v + TWO_POINTS.function([1.0, 2.0])
        ju, jv = resolvent(DIFFERENCE_SQUARED, 0.5, u), resolvent(DIFFERENCE_SQUARED, 0.5, v)
        self.assertTrue(convergence_residual(ju).satisfied)
        shared = resolvent_property_check('order_preserving', DIFFERENCE_SQUARED, 0.5, u, v,
                                          ju=ju, jv=jv)
        fresh = resolvent_property_check('order_preserving', DIFFERENCE_SQUARED, 0.5, u, v)
        self.assertEqual(shared.lhs, fresh.lhs)
        with self.assertRaises(InvalidParameterError):
            resolvent_property_check('order_preserving', DIFFERENCE_SQUARED, 1.0, u, v, jv=jv)

    def test_errors(self):
        f = TWO_POINTS.function([1.0, -1.0])
        with self.assertRaises(UnknownCheckError):
            resolvent_property_check('monotone', DIFFERENCE_SQUARED, 1.0, f, f)
        with self.assertRaises(InvalidParameterError):
            resolvent_property_check('linfty_band', DIFFERENCE_SQUARED, 1.0, f, f)
        with self.assertRaises(InvalidParameterError):
            resolvent_property_check('invariance_0_alpha', DIFFERENCE_SQUARED, 1.0, f, f,
                                     alpha=-1.0)

    @settings(max_examples=10, deadline=None)
    @given(seed=seeds)
    def test_properties_on_random_instances(self, seed):
        rng, space, E = convex_instance(seed)
        lam = float(rng.uniform(0.1, 2.0))
        alpha = float(rng.uniform(0.5, 3.0))
        v = random_fn(space, rng)
        pairs = {
            'nonexpansive': random_fn(space, rng),
            'order_preserving': v + space.function(rng.uniform(0.0, 2.0, size=len(space))),
            'linfty_band': v + space.function(rng.uniform(-3.0, alpha, size=len(space))),
            'invariance_0_alpha': v + space.function(rng.uniform(0.0, alpha, size=len(space))),
        }
        for kind in PROPERTY_KINDS:
            residual = resolvent_property_check(kind, E, lam, pairs[kind], v, alpha=alpha)
            self.assertFalse(residual.violated, (kind, residual))
            self.assertFalse(residual.vacuous, (kind, residual))
