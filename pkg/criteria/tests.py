import math
from unittest import mock

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st

from common.exceptions import (ImproperCenterError, InvalidParameterError, NotHomogeneousError,
                               NotIncreasingContractionError, NotNormalContractionError,
                               UnknownCheckError)
from common.measure import FiniteMeasureSpace
from common.utility import rng_for, sample_values
from contractions import named
from contractions.helper import build_Dn, contraction_from_bp, limit_sequence
from contractions.piecewise import PiecewiseLinear, compose
from criteria.checks import (bh_residuals, bp_star_residual, cg_residuals, composition_chain,
                             compatibility_residual, homogeneous_reduction_check,
                             lemma_chain_check, pointwise_limit_check)
from criteria.helper import (INCREASING_FAMILY, NORMAL_FAMILY, case2_psi_values,
                             case2_sigma_values, case3_psi_values, contraction_values,
                             phi2_values, phi_values, resolve_family, sample_contraction,
                             sigma_values, tent_values)
from criteria.identities import IDENTITY_KINDS, identity_check
from criteria.reports import Report
from criteria.residuals import Residual, Tolerance, classify_inequalities
from criteria.sweeps import fuzz_sweep, homogeneity_degree, resolve_checks
from functionals.edges import HuberEdge, IntervalIndicator, PowerEdge, TruncatedAbsEdge
from functionals.energies import (Edge, MixedDirichletEnergy, QuadraticForm, ZeroFunctional,
                                  make_mixed_energy)
from functionals.helper import random_mixed_energy

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)

GRID = np.linspace(-10.0, 10.0, 2001)
LAPLACIAN = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]]


def negative_control_instance():
    space = FiniteMeasureSpace.counting(2)
    E = MixedDirichletEnergy(space, [Edge(0, 1, TruncatedAbsEdge(1.0))], allow_nonconvex=True)
    return space, E


def convex_instance(seed, n=None, kinds=None):
    rng = np.random.default_rng(seed)
    n = n or int(rng.integers(2, 5))
    space = FiniteMeasureSpace(range(n), rng.uniform(0.5, 2.0, size=n))
    kwargs = {'kinds': kinds} if kinds else {}
    return rng, space, random_mixed_energy(space, rng, edge_probability=0.7, **kwargs)


def random_pair(space, rng):
    return (space.function(sample_values(rng, len(space))),
            space.function(sample_values(rng, len(space))))


class ResidualTest(SimpleTestCase):
    def test_classification(self):
        self.assertTrue(Residual(1.0, 2.0).satisfied)
        self.assertTrue(Residual(1.0 + 5e-10, 1.0).satisfied)
        self.assertTrue(Residual(1.0 + 2e-9, 1.0).violated)
        self.assertTrue(Residual(math.inf, math.inf).vacuous)
        self.assertTrue(Residual(3.0, math.inf).vacuous)

    def test_infinite_lhs_against_finite_rhs(self):
        r = Residual(math.inf, 1.0)
        self.assertTrue(r.violated)
        self.assertEqual(r.slack, -math.inf)
        self.assertEqual(r.to_dict()['slack'], '-inf')

    def test_relative_part_of_the_tolerance(self):
        r = Residual(1e6 + 1e-5, 1e6, Tolerance(atol=0.0, rtol=1e-12))
        self.assertTrue(r.violated)
        r = Residual(1e6 + 1e-5, 1e6, Tolerance(atol=0.0, rtol=1e-9))
        self.assertTrue(r.satisfied)

    def test_equality(self):
        self.assertTrue(Residual(2.0, 2.0, equality=True).satisfied)
        r = Residual(1.0, 2.0, equality=True)
        self.assertTrue(r.violated)
        self.assertEqual(r.slack, -1.0)
        self.assertTrue(Residual(math.inf, 1.0, equality=True).violated)

    def test_batch_codes(self):
        slack, code = classify_inequalities([0.0, 2.0, 1.0, math.inf], [1.0, 1.0, math.inf, 0.0])
        self.assertEqual(code.tolist(), [0, 1, 2, 1])
        self.assertEqual(slack[1], -1.0)


class CompatibilityTest(SimpleTestCase):
    def test_zero_functional(self):
        space = FiniteMeasureSpace.counting(3)
        rng = np.random.default_rng(0)
        f, g = random_pair(space, rng)
        r = compatibility_residual(ZeroFunctional(space), named.absolute(), f, g)
        self.assertEqual(r.slack, 0.0)
        self.assertTrue(r.satisfied)

    def test_negative_control_example(self):
        space, E = negative_control_instance()
        f, g = space.function([1.0, 0.0]), space.function([1.0, 0.0])
        r = compatibility_residual(E, named.scaled(0.5), f, g)
        self.assertEqual(r.lhs, 1.5)
        self.assertEqual(r.rhs, 1.0)
        self.assertAlmostEqual(r.slack, -0.5, delta=1e-9)
        self.assertTrue(r.violated)

    def test_rejects_non_normal(self):
        space = FiniteMeasureSpace.counting(2)
        f = space.zeros()
        with self.assertRaises(NotNormalContractionError):
            compatibility_residual(ZeroFunctional(space), named.scaled(2.0), f, f)
        with self.assertRaises(NotNormalContractionError):
            compatibility_residual(ZeroFunctional(space), PiecewiseLinear((), (1.0,), 1.0), f, f)

    def test_laplacian_with_abs(self):
        space = FiniteMeasureSpace.counting(3)
        E = QuadraticForm(space, LAPLACIAN)
        rng = np.random.default_rng(11)
        for _ in range(50):
            f, g = random_pair(space, rng)
            self.assertFalse(compatibility_residual(E, named.absolute(), f, g).violated)

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_convex_mixed_energies(self, seed):
        rng, space, E = convex_instance(seed)
        f, g = random_pair(space, rng)
        kind, params = sample_contraction(rng, resolve_family('named'))
        C = named.make_named(kind, **params)
        self.assertFalse(compatibility_residual(E, C, f, g).violated)


class PairCriteriaTest(SimpleTestCase):
    def setUp(self):
        self.rng, self.space, self.E = convex_instance(5, n=4)

    def test_diagonal_is_fixed(self):
        u = self.space.function(sample_values(self.rng, 4, heavy_rate=0.0))
        for r in cg_residuals(self.E, u, u, 0.7):
            self.assertIn(r.slack, (0.0, math.inf))
        for r in bh_residuals(self.E, u, u, 0.7):
            self.assertIn(r.slack, (0.0, math.inf))

    def test_bad_parameters(self):
        u = self.space.zeros()
        with self.assertRaises(InvalidParameterError):
            cg_residuals(self.E, u, u, 0.0)
        with self.assertRaises(InvalidParameterError):
            bh_residuals(self.E, u, u, -1.0)
        with self.assertRaises(NotIncreasingContractionError):
            bp_star_residual(self.E, named.negation(), u, u)

    def test_convex_energy_satisfies_all(self):
        for _ in range(50):
            u, v = random_pair(self.space, self.rng)
            alpha = float(self.rng.uniform(0.01, 10.0))
            for r in (*cg_residuals(self.E, u, v, alpha), *bh_residuals(self.E, u, v, alpha),
                      bp_star_residual(self.E, named.clamp_sym(alpha), u, v)):
                self.assertFalse(r.violated, r)

    def test_bp_star_matches_compatibility(self):
        for _ in range(20):
            u, v = random_pair(self.space, self.rng)
            p = named.clamp_0_alpha(1.3)
            a = bp_star_residual(self.E, p, u, v)
            b = compatibility_residual(self.E, contraction_from_bp(p), (u + v) / 2.0,
                                       (u - v) / 2.0)
            if a.vacuous:
                self.assertTrue(b.vacuous)
            else:
                self.assertLessEqual(abs(a.slack - b.slack), 1e-10 * max(1.0, abs(a.rhs)))


class HomogeneousReductionTest(SimpleTestCase):
    def test_alpha_one_is_exact(self):
        rng, space, E = convex_instance(2, n=3, kinds=('power2',))
        f, g = random_pair(space, rng)
        r = homogeneous_reduction_check(E, f, g, 1.0, 2.0)
        self.assertEqual(r.slack, 0.0)

    @settings(max_examples=50, deadline=None)
    @given(seeds)
    def test_power_energies(self, seed):
        rng = np.random.default_rng(seed)
        p = float(rng.uniform(1.0, 4.0))
        space = FiniteMeasureSpace.counting(3)
        E = make_mixed_energy(space, [Edge(0, 1, PowerEdge(p)), Edge(1, 2, PowerEdge(p, 0.5))])
        f, g = random_pair(space, rng)
        r = homogeneous_reduction_check(E, f, g, float(rng.uniform(0.05, 5.0)), p)
        self.assertFalse(r.violated, r)

    def test_zero_functional(self):
        space = FiniteMeasureSpace.counting(2)
        f = space.function([1.0, -2.0])
        r = homogeneous_reduction_check(ZeroFunctional(space), f, f, 0.5, 3.0)
        self.assertEqual(r.slack, 0.0)

    def test_errors(self):
        space = FiniteMeasureSpace.counting(2)
        f = space.function([1.0, -2.0])
        huber = make_mixed_energy(space, [Edge(0, 1, HuberEdge(1.0))])
        with self.assertRaises(NotHomogeneousError):
            homogeneous_reduction_check(huber, f, f, 0.5, 2.0)
        indicator = make_mixed_energy(space, [Edge(0, 1, IntervalIndicator(0.0))])
        with self.assertRaises(ImproperCenterError):
            homogeneous_reduction_check(indicator, f, f, 0.5, 1.0)

    def test_homogeneity_degree(self):
        space = FiniteMeasureSpace.counting(2)
        self.assertEqual(homogeneity_degree(make_mixed_energy(space, [Edge(0, 1, PowerEdge(3.0))])),
                         3.0)
        self.assertEqual(homogeneity_degree(QuadraticForm(space, np.eye(2))), 2.0)
        huber = make_mixed_energy(space, [Edge(0, 1, HuberEdge(1.0))])
        self.assertIsNone(homogeneity_degree(huber))


class ChainTest(SimpleTestCase):
    def setUp(self):
        self.space = FiniteMeasureSpace.counting(3)
        self.E = QuadraticForm(self.space, LAPLACIAN)
        self.rng = np.random.default_rng(21)

    def test_lemma_chains_on_a_graph_form(self):
        cases = [('case1', {'x': 0.5}), ('case1', {'x': -1.2}), ('case1', {'x': 0.0}),
                 ('case2', {'x1': 0.5, 'x2': 1.5}), ('case2', {'x1': -2.0, 'x2': -0.5}),
                 ('case2', {'x1': 0.0, 'x2': 1.0}), ('case3', {'x1': -1.0, 'x2': 2.0}),
                 ('convexity_via_Dn', {'n': 2})]
        for _ in range(20):
            f, g = random_pair(self.space, self.rng)
            for kind, params in cases:
                report = lemma_chain_check(kind, self.E, f, g, params)
                self.assertEqual(report.violation_count, 0, (kind, params, report.to_dict()))
                self.assertIn(f'{kind}.target' if kind != 'convexity_via_Dn'
                              else 'convexity_via_Dn.midpoint', report.checks)

    def test_zero_functional_has_zero_slack(self):
        E = ZeroFunctional(self.space)
        f, g = random_pair(self.space, self.rng)
        report = lemma_chain_check('case1', E, f, g, {'x': 1.0})
        for summary in report.checks.values():
            self.assertEqual(summary.min_slack, 0.0)

    def test_dn_chain_midpoint(self):
        for _ in range(20):
            f = self.space.function(self.rng.uniform(-3, 3, size=3))
            g = self.space.function(self.rng.uniform(-3, 3, size=3))
            report = lemma_chain_check('convexity_via_Dn', self.E, f, g, {'n': 3})
            self.assertGreaterEqual(report.checks['convexity_via_Dn.midpoint'].min_slack, -1e-9)
            self.assertEqual(report.checks['convexity_via_Dn.Dn_range'].violations, 0)

    def test_bad_parameters(self):
        f = self.space.zeros()
        with self.assertRaises(InvalidParameterError):
            lemma_chain_check('case2', self.E, f, f, {'x1': -1.0, 'x2': 1.0})
        with self.assertRaises(InvalidParameterError):
            lemma_chain_check('case3', self.E, f, f, {'x1': 0.5, 'x2': 1.0})
        with self.assertRaises(UnknownCheckError):
            lemma_chain_check('case4', self.E, f, f, {})

    def test_composition_chain(self):
        for _ in range(20):
            f, g = random_pair(self.space, self.rng)
            residuals = composition_chain(self.E, named.tent(1.0), named.clamp_sym(2.0), f, g)
            self.assertEqual([r.violated for r in residuals], [False, False, False])

    def test_pointwise_limits(self):
        f, g = random_pair(self.space, self.rng)
        approximants, limit = limit_sequence('min_alpha', 48, alpha=0.5)
        report = pointwise_limit_check(self.E, approximants, limit, f, g)
        self.assertEqual(report.violation_count, 0)
        self.assertIn('limit.lsc', report.checks)
        approximants, limit = limit_sequence('Dn', 4)
        report = pointwise_limit_check(self.E, approximants, limit, f, g)
        self.assertEqual(report.violation_count, 0)
        self.assertEqual(len(report.checks), 6)


class IdentityTest(SimpleTestCase):
    def test_grid_identities(self):
        atol = 1e-12
        self.assertLessEqual(identity_check('case1_ids', {'t': GRID, 'x': 1.5}), atol)
        self.assertLessEqual(identity_check('case1_ids', {'t': GRID, 'x': -0.7}), atol)
        self.assertLessEqual(identity_check('case1_ids', {'t': GRID, 'x': 0.0}), atol)
        self.assertLessEqual(identity_check('case2_ids', {'t': GRID, 'x1': 0.5, 'x2': 2.0}), atol)
        self.assertLessEqual(identity_check('case2_ids', {'t': GRID, 'x1': -3.0, 'x2': -1.0}),
                             atol)
        self.assertLessEqual(identity_check('case3_ids', {'t': GRID, 'x1': -1.0, 'x2': 2.5}), atol)
        self.assertLessEqual(identity_check('cg_compositions', {'t': GRID, 'alpha': 0.3}), atol)

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_pairing_identities(self, seed):
        rng = np.random.default_rng(seed)
        space = FiniteMeasureSpace.counting(int(rng.integers(1, 8)))
        f, g = random_pair(space, rng)
        alpha = float(rng.uniform(0.01, 10.0))
        for kind in ('cg_median', 'cg_palpha', 'bh_veewedge', 'bh_halpha', 'reflection_mean'):
            self.assertLessEqual(identity_check(kind, {'f': f, 'g': g, 'alpha': alpha}), 1e-12,
                                 kind)
        for C in (named.tent(alpha), named.absolute(), named.phi_x(1.0), named.zero()):
            self.assertLessEqual(identity_check('bp_subst', {'f': f, 'g': g, 'contraction': C}),
                                 1e-12)

    @settings(max_examples=50, deadline=None)
    @given(st.floats(min_value=-5.0, max_value=5.0), st.floats(min_value=0.01, max_value=5.0))
    def test_lemma_identities_for_random_parameters(self, x, width):
        self.assertLessEqual(identity_check('case1_ids', {'t': GRID, 'x': x}), 1e-12)
        if x >= 0:
            params = {'x1': x, 'x2': x + width}
        else:
            params = {'x1': x - width, 'x2': min(x, -1e-3)}
        if params['x1'] < params['x2']:
            self.assertLessEqual(identity_check('case2_ids', {'t': GRID, **params}), 1e-12)
        self.assertLessEqual(identity_check('case3_ids', {'t': GRID, 'x1': -width, 'x2': width}),
                             1e-12)

    def test_reflection_mean_compares_independent_forms(self):
        f, g = np.array([2.0, -1.0, 0.5]), np.array([-1.0, 3.0, 0.5])
        self.assertLessEqual(identity_check('reflection_mean', {'f': f, 'g': g}), 1e-12)
        with mock.patch('criteria.identities.pos', lambda x: 1.01 * np.maximum(x, 0.0)):
            self.assertGreater(identity_check('reflection_mean', {'f': f, 'g': g}), 1e-3)

    def test_every_kind_has_a_check(self):
        self.assertEqual(len(IDENTITY_KINDS), 10)

    def test_errors(self):
        with self.assertRaises(UnknownCheckError):
            identity_check('parallelogram', {'t': GRID})
        with self.assertRaises(InvalidParameterError):
            identity_check('case1_ids', {})
        with self.assertRaises(InvalidParameterError):
            identity_check('cg_median', {'f': [1.0, 2.0]})
        with self.assertRaises(InvalidParameterError):
            identity_check('case3_ids', {'t': GRID, 'x1': 0.5, 'x2': 1.0})


class ClosedFormTest(SimpleTestCase):
    def test_closed_forms_match_named_maps(self):
        t = GRID
        for x in (0.0, 0.8, -1.3):
            np.testing.assert_allclose(phi_values(t, x), named.phi_x(x).eval(t), atol=1e-12)
        np.testing.assert_allclose(sigma_values(t, 1.1), named.sigma_x(1.1).eval(t), atol=1e-12)
        for x1, x2 in ((0.5, 2.0), (-1.0, 2.0), (-3.0, -0.5)):
            np.testing.assert_allclose(phi2_values(t, x1, x2), named.phi_x1x2(x1, x2).eval(t),
                                       atol=1e-12)
        np.testing.assert_allclose(case2_sigma_values(t, 0.5, 2.0),
                                   named.case2_sigma(0.5, 2.0).eval(t), atol=1e-12)
        np.testing.assert_allclose(case2_psi_values(t, 0.5, 2.0),
                                   named.case2_psi(0.5, 2.0).eval(t), atol=1e-12)
        np.testing.assert_allclose(case3_psi_values(t, -1.0, 2.0),
                                   named.case3_psi(-1.0, 2.0).eval(t), atol=1e-12)
        np.testing.assert_allclose(tent_values(t, 0.6), named.tent(0.6).eval(t), atol=1e-12)

    def test_family_samples_are_normal(self):
        rng = np.random.default_rng(4)
        G = rng.uniform(-5, 5, size=(1, 50))
        for catalogue in (NORMAL_FAMILY, INCREASING_FAMILY):
            for kind in catalogue:
                params = catalogue[kind][0](rng)
                values = contraction_values([kind], [params], G, catalogue)[0]
                self.assertTrue(np.all(np.abs(values) <= np.abs(G[0]) + 1e-12), kind)
                diffs = np.abs(values[:, None] - values[None, :])
                self.assertTrue(np.all(diffs <= np.abs(G[0][:, None] - G[0][None, :]) + 1e-12))

    def test_named_family(self):
        self.assertNotIn('random', resolve_family('named'))
        self.assertEqual(resolve_family('abs, tent'), ['abs', 'tent'])
        with self.assertRaises(InvalidParameterError):
            resolve_family(['tent', 'bogus'])

    def test_dn_matches_its_factors(self):
        D = build_Dn(1)
        h = GRID.copy()
        for alpha in (6.0, 2.0, 2.0 / 3.0):
            h = tent_values(h, alpha)
        np.testing.assert_allclose(h, D.eval(GRID), atol=1e-12)
        np.testing.assert_allclose(
            compose(named.tent(2.0), named.tent(6.0)).eval(GRID),
            tent_values(tent_values(GRID, 6.0), 2.0), atol=1e-12)


class SweepTest(SimpleTestCase):
    def test_empty_report(self):
        _, _, E = convex_instance(0)
        report = fuzz_sweep(E, seed=1, n_samples=0)
        self.assertTrue(report.is_empty())
        self.assertEqual(report.to_dict()['checks'], [])
        self.assertEqual(report.violation_count, 0)

    def test_reproducible(self):
        _, _, E = convex_instance(3)
        a = fuzz_sweep(E, seed=17, n_samples=20, checks='compatibility,cg,case2')
        b = fuzz_sweep(E, seed=17, n_samples=20, checks=['compatibility', 'cg', 'case2'])
        self.assertEqual(a.to_dict(), b.to_dict())
        c = fuzz_sweep(E, seed=18, n_samples=20, checks='compatibility')
        self.assertNotEqual(a.checks['compatibility'].worst_case_inputs,
                            c.checks['compatibility'].worst_case_inputs)

    def test_sample_streams_are_per_index(self):
        first = sample_values(rng_for(5, 'compatibility', 3), 4)
        again = sample_values(rng_for(5, 'compatibility', 3), 4)
        np.testing.assert_array_equal(first, again)

    def test_convex_instances_have_no_violations(self):
        for seed in range(3):
            _, _, E = convex_instance(seed)
            report = fuzz_sweep(E, seed=seed, n_samples=200)
            self.assertEqual(report.violation_count, 0, report.to_dict())
            self.assertTrue(report.passed)
            self.assertIn('transport.bp', report.checks)
            self.assertIn('case3.target', report.checks)

    def test_transport_equalities(self):
        _, _, E = convex_instance(9, n=4)
        report = fuzz_sweep(E, family='named', seed=2, n_samples=300, checks='transport')
        self.assertEqual(set(report.checks), {'transport.bp', 'transport.cg', 'transport.bh'})
        self.assertEqual(report.violation_count, 0)
        self.assertEqual(report.checks['transport.cg'].n, 600)

    def test_homogeneous_sweep(self):
        rng = np.random.default_rng(8)
        space = FiniteMeasureSpace.counting(3)
        E = random_mixed_energy(space, rng, kinds=('power1',), edge_probability=1.0)
        report = fuzz_sweep(E, seed=3, n_samples=100, checks='homogeneous_reduction,shift')
        self.assertEqual(report.violation_count, 0)
        self.assertGreater(report.checks['homogeneous_reduction'].n, 0)
        self.assertGreater(report.checks['shift.explicit'].n, 0)

    def test_negative_control(self):
        _, E = negative_control_instance()
        report = fuzz_sweep(E, family='scaled', seed=0, n_samples=10 ** 4,
                            checks='compatibility', negative_control=True)
        summary = report.checks['compatibility']
        self.assertGreaterEqual(summary.violations, 1)
        self.assertTrue(summary.negative_control)
        self.assertIsNotNone(summary.first_violation_inputs)
        self.assertEqual(report.violation_count, 0)
        self.assertTrue(report.passed)

    def test_report_formats(self):
        _, _, E = convex_instance(1)
        report = fuzz_sweep(E, seed=4, n_samples=10, checks='compatibility,convexity')
        data = report.to_dict()
        self.assertEqual(data['schema_version'], '1.0')
        self.assertEqual([c['name'] for c in data['checks']], ['compatibility', 'convexity'])
        worst = data['checks'][0]['worst_case_inputs']
        if worst is not None:
            self.assertEqual(set(worst), {'sample', 'f', 'g', 'contraction'})
        self.assertTrue(report.to_csv().startswith('name,n,violations,vacuous,min_slack'))

    def test_errors(self):
        _, _, E = convex_instance(1)
        with self.assertRaises(UnknownCheckError):
            resolve_checks('compatibility,nope')
        with self.assertRaises(InvalidParameterError):
            fuzz_sweep(E, n_samples=-1)

    def test_merge(self):
        _, _, E = convex_instance(6)
        a = fuzz_sweep(E, seed=1, n_samples=10, checks='compatibility')
        b = fuzz_sweep(E, seed=2, n_samples=15, checks='compatibility')
        merged = Report(seed=1).merge(a).merge(b)
        self.assertEqual(merged.checks['compatibility'].n, 25)
        self.assertEqual(merged.min_slack, min(a.min_slack, b.min_slack))
