import math

import numpy as np
from django.test import SimpleTestCase
from hypothesis import given, settings, strategies as st
from rest_framework.exceptions import ValidationError

from common.exceptions import (DomainMismatchError, ImproperCenterError,
                               InvalidEdgeFunctionError, InvalidFunctionalError)
from common.helper import load_data
from common.measure import FiniteMeasureSpace
from common.utility import sample_values
from contractions.piecewise import PiecewiseLinear
from functionals.edges import (HuberEdge, IntervalIndicator, PowerEdge, PwlConvexEdge,
                               QuadraticWeighted, ShiftedEdge, TruncatedAbsEdge, shifted_edge)
from functionals.energies import (Edge, FShift, MixedDirichletEnergy, QuadraticForm,
                                  ZeroFunctional, f_shift, make_mixed_energy,
                                  make_quadratic_form)
from functionals.helper import (find_midpoint_violation, midpoint_gaps, random_edge_function,
                                random_mixed_energy)
from functionals.serializers import EdgeFunctionSerializer, EnergyFunctionalSerializer

seeds = st.integers(min_value=0, max_value=2 ** 32 - 1)


def close(a, b, rtol=1e-10):
    if math.isinf(a) or math.isinf(b):
        return a == b
    return abs(a - b) <= rtol * max(1.0, abs(a), abs(b))


def random_instance(seed, kinds=None):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 6))
    space = FiniteMeasureSpace(range(n), rng.uniform(0.5, 2.0, size=n))
    kwargs = {'kinds': kinds} if kinds else {}
    E = random_mixed_energy(space, rng, edge_probability=0.7, **kwargs)
    return rng, space, E


def moderate_function(space, rng):
    return space.function(sample_values(rng, len(space), heavy_rate=0.0))


class EdgeFunctionTest(SimpleTestCase):
    def test_values(self):
        self.assertEqual(PowerEdge(2)(3.0), 9.0)
        self.assertEqual(PowerEdge(1, 2.0)(-1.5), 3.0)
        self.assertEqual(HuberEdge(1.0)(0.5), 0.125)
        self.assertEqual(HuberEdge(1.0)(3.0), 2.5)
        self.assertEqual(IntervalIndicator(1.0)(1.0), 0.0)
        self.assertEqual(IntervalIndicator(1.0)(-3.0), math.inf)
        self.assertEqual(QuadraticWeighted(0.5)(2.0), 2.0)
        b = PwlConvexEdge.from_half([1.0], [0.5, 2.0])
        self.assertEqual(b(-0.5), 0.25)
        self.assertEqual(b(2.0), 2.5)

    def test_invariants_of_the_library(self):
        rng = np.random.default_rng(3)
        t = np.linspace(-8, 8, 801)
        for kind in ('power', 'power1', 'huber', 'interval_indicator', 'pwl_convex',
                     'quadratic_weighted'):
            for _ in range(10):
                b = random_edge_function(rng, kind)
                self.assertEqual(b(0.0), 0.0)
                np.testing.assert_allclose(b(t), b(-t), rtol=1e-12, atol=1e-12)
                self.assertTrue(np.all(b(t) >= 0))

    def test_rejects_bad_parameters(self):
        with self.assertRaises(InvalidEdgeFunctionError):
            PowerEdge(0.5)
        with self.assertRaises(InvalidEdgeFunctionError):
            HuberEdge(0.0)
        with self.assertRaises(InvalidEdgeFunctionError):
            IntervalIndicator(-1.0)
        with self.assertRaises(InvalidEdgeFunctionError):
            QuadraticWeighted(-2.0)

    def test_pwl_convex_validation(self):
        with self.assertRaises(InvalidEdgeFunctionError):
            PwlConvexEdge(PiecewiseLinear((0.0,), (1.0, -1.0), 0.0))
        with self.assertRaises(InvalidEdgeFunctionError):
            PwlConvexEdge(PiecewiseLinear((0.0,), (-1.0, 2.0), 0.0))
        with self.assertRaises(InvalidEdgeFunctionError):
            PwlConvexEdge(PiecewiseLinear((0.0,), (-1.0, 1.0), 1.0))
        self.assertEqual(PwlConvexEdge(PiecewiseLinear((0.0,), (-1.0, 1.0), 0.0))(-2.0), 2.0)

    def test_shifted_edge_examples(self):
        square = PowerEdge(2)
        self.assertIs(shifted_edge(square, 3.0), square)
        absolute = PowerEdge(1)
        self.assertIs(shifted_edge(absolute, 0.0), absolute)
        b = shifted_edge(absolute, 1.0)
        self.assertEqual(b(2.0), 1.0)
        self.assertEqual(b(0.5), 0.0)
        with self.assertRaises(ImproperCenterError):
            shifted_edge(IntervalIndicator(1.0), 2.0)

    def test_shifted_indicator_is_narrower_indicator(self):
        b = ShiftedEdge(IntervalIndicator(2.0), 0.5)
        self.assertEqual(b(1.5), 0.0)
        self.assertEqual(b(1.6), math.inf)
        self.assertEqual(b.radius, 1.5)

    def test_derivative_outside_the_domain(self):
        with np.errstate(all='raise'):
            self.assertEqual(PowerEdge(2.0).derivative(1.5), 3.0)
            self.assertEqual(IntervalIndicator(1.0).derivative(0.5), 0.0)
            self.assertTrue(math.isnan(IntervalIndicator(1.0).derivative(2.0)))
            self.assertTrue(math.isnan(IntervalIndicator(0.0).derivative(0.0)))
            self.assertTrue(math.isnan(ShiftedEdge(IntervalIndicator(2.0), 0.5).derivative(3.0)))
            d = IntervalIndicator(1.0).derivative(np.array([0.5, -4.0]))
        self.assertEqual(d[0], 0.0)
        self.assertTrue(np.isnan(d[1]))

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_prox_satisfies_optimality(self, seed):
        rng = np.random.default_rng(seed)
        kind = ['power', 'power1', 'power2', 'huber', 'interval_indicator', 'pwl_convex',
                'quadratic_weighted'][seed % 7]
        b = random_edge_function(rng, kind)
        if rng.random() < 0.5:
            b = shifted_edge(b, float(rng.uniform(-1.0, 1.0)))
        tau = float(np.exp(rng.uniform(-3, 2)))
        v = rng.uniform(-8, 8, size=20)
        x = b.prox(v, tau)
        lo, hi = b.subdifferential(x)
        tol = 1e-8 * np.maximum(1.0, np.abs(v))
        residual = (v - x) / tau
        self.assertTrue(np.all(residual >= lo - tol / tau), (b, v, x))
        self.assertTrue(np.all(residual <= hi + tol / tau), (b, v, x))
        self.assertTrue(np.all(np.isfinite(b(x))))

    def test_truncated_abs_is_flagged_nonconvex(self):
        self.assertFalse(TruncatedAbsEdge(1.0).convex)


class EnergyFunctionalTest(SimpleTestCase):
    def setUp(self):
        self.pair = FiniteMeasureSpace(['a', 'b'])
        self.path = FiniteMeasureSpace(['a', 'b', 'c'])

    def test_single_edge(self):
        E = make_mixed_energy(self.pair, [Edge(0, 1, PowerEdge(2))])
        self.assertEqual(E(self.pair.function([1.0, 0.0])), 1.0)

    def test_violated_indicator_is_infinite(self):
        E = make_mixed_energy(self.pair, [Edge(0, 1, IntervalIndicator(1.0))])
        self.assertEqual(E(self.pair.function([3.0, 0.0])), math.inf)
        self.assertEqual(E(self.pair.function([1.0, 0.0])), 0.0)

    def test_path_graph(self):
        E = make_mixed_energy(self.path, [Edge(0, 1, PowerEdge(2)), Edge(1, 2, PowerEdge(2))])
        self.assertEqual(E(self.path.function([1.0, 0.0, 0.0])), 1.0)

    def test_empty_edge_set_is_zero(self):
        E = make_mixed_energy(self.path, [])
        self.assertIsInstance(E, ZeroFunctional)
        self.assertEqual(E(self.path.function([1.0, 2.0, 3.0])), 0.0)

    def test_laplacian_form(self):
        E = make_quadratic_form(self.pair, [[1.0, -1.0], [-1.0, 1.0]])
        self.assertEqual(E(self.pair.function([1.0, -1.0])), 4.0)

    def test_quadratic_form_validation(self):
        with self.assertRaises(InvalidFunctionalError):
            make_quadratic_form(self.pair, [[1.0, 0.5], [0.0, 1.0]])
        with self.assertRaises(InvalidFunctionalError):
            make_quadratic_form(self.pair, [[1.0, 2.0], [2.0, 1.0]])
        with self.assertRaises(InvalidFunctionalError):
            make_quadratic_form(self.pair, [[1.0]])

    def test_mixed_energy_validation(self):
        with self.assertRaises(InvalidFunctionalError):
            make_mixed_energy(self.pair, [Edge(0, 2, PowerEdge(2))])
        with self.assertRaises(InvalidFunctionalError):
            make_mixed_energy(self.pair, [Edge(0, 1, TruncatedAbsEdge())])
        E = make_mixed_energy(self.pair, [Edge(0, 1, TruncatedAbsEdge())], allow_nonconvex=True)
        self.assertFalse(E.convex)

    def test_space_mismatch(self):
        E = make_mixed_energy(self.pair, [Edge(0, 1, PowerEdge(2))])
        with self.assertRaises(DomainMismatchError):
            E(self.path.zeros())

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_zero_function_has_zero_energy(self, seed):
        _, space, E = random_instance(seed)
        self.assertEqual(E(space.zeros()), 0.0)

    @settings(max_examples=100, deadline=None)
    @given(seeds)
    def test_midpoint_convexity(self, seed):
        rng, space, E = random_instance(seed)
        F = sample_values(rng, (50, len(space)))
        G = sample_values(rng, (50, len(space)))
        ends = (E.evaluate_many(F) + E.evaluate_many(G)) / 2.0
        gaps = midpoint_gaps(E, F, G)
        self.assertTrue(np.all(gaps <= 1e-10 * np.maximum(1.0, np.where(np.isinf(ends), 1.0,
                                                                          ends))))

    def test_nonconvex_energy_fails_midpoint_convexity(self):
        E = make_mixed_energy(self.pair, [Edge(0, 1, TruncatedAbsEdge(1.0))], allow_nonconvex=True)
        found = find_midpoint_violation(E, np.random.default_rng(0), n_samples=1000)
        self.assertIsNotNone(found)
        self.assertGreater(found[2], 0)

    def test_vacuity_discipline(self):
        rng = np.random.default_rng(11)
        E = make_mixed_energy(self.pair, [Edge(0, 1, IntervalIndicator(1.0)),
                                          Edge(1, 0, PowerEdge(2))])
        for _ in range(200):
            f = self.pair.function(sample_values(rng, 2))
            g = self.pair.function(sample_values(rng, 2))
            if math.isinf(E(f)):
                self.assertEqual(E(f + g) + E(f - g), math.inf)


class FShiftTest(SimpleTestCase):
    def setUp(self):
        self.pair = FiniteMeasureSpace(['a', 'b'])

    def test_bilinear_form_is_its_own_shift(self):
        rng = np.random.default_rng(5)
        E = make_quadratic_form(self.pair, [[2.0, -1.0], [-1.0, 1.0]])
        for _ in range(50):
            f = self.pair.function(rng.uniform(-3, 3, size=2))
            g = self.pair.function(rng.uniform(-3, 3, size=2))
            self.assertTrue(close(f_shift(E, f)(g), E(g), rtol=1e-12))

    def test_quartic_shift(self):
        E = make_mixed_energy(self.pair, [Edge(0, 1, PowerEdge(4))])
        f = self.pair.function([1.0, 0.0])
        g = self.pair.function([1.0, 0.0])
        self.assertEqual(f_shift(E, f)(g), 7.0)

    def test_shift_is_symmetric_and_vanishes_at_zero(self):
        rng = np.random.default_rng(9)
        for seed in range(20):
            _, space, E = random_instance(seed)
            f = space.zeros()
            g = moderate_function(space, rng)
            Ef = f_shift(E, f)
            self.assertEqual(Ef(space.zeros()), 0.0)
            self.assertEqual(Ef(g), Ef(-g))

    def test_improper_center(self):
        E = make_mixed_energy(self.pair, [Edge(0, 1, IntervalIndicator(1.0))])
        with self.assertRaises(ImproperCenterError):
            f_shift(E, self.pair.function([5.0, 0.0]))

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_shift_matches_explicit_shifted_edges(self, seed):
        rng, space, E = random_instance(seed)
        f = moderate_function(space, rng)
        if math.isinf(E(f)) or isinstance(E, ZeroFunctional):
            return
        g = moderate_function(space, rng)
        lhs, rhs = f_shift(E, f)(g), E.explicit_shift(f)(g)
        if math.isinf(lhs) or math.isinf(rhs):
            self.assertEqual(lhs, rhs)
        else:
            scale = E(f + g) + E(f - g) + E(f)
            self.assertLessEqual(abs(lhs - rhs), 1e-10 * max(1.0, scale))

    @settings(max_examples=200, deadline=None)
    @given(seeds)
    def test_nested_shift_identity(self, seed):
        rng, space, E = random_instance(seed)
        f, g, h = (moderate_function(space, rng) for _ in range(3))
        if math.isinf(E(f)):
            return
        Ef = f_shift(E, f)
        if math.isinf(Ef(g)):
            return
        lhs = f_shift(Ef, g)(h)
        rhs = (f_shift(E, f + g)(h) + f_shift(E, f - g)(h)) / 2.0
        scale = sum(abs(E(f + s * g + t * h)) for s in (-1, 1) for t in (-1, 1)
                    if math.isfinite(E(f + s * g + t * h)))
        if math.isinf(lhs) or math.isinf(rhs):
            self.assertEqual(lhs, rhs)
        else:
            self.assertLessEqual(abs(lhs - rhs), 1e-10 * max(1.0, scale))

    @settings(max_examples=100, deadline=None)
    @given(seeds, st.floats(min_value=0.1, max_value=10.0))
    def test_power_energies_are_homogeneous(self, seed, alpha):
        rng = np.random.default_rng(seed)
        p = float(rng.uniform(1.0, 4.0))
        space = FiniteMeasureSpace.counting(int(rng.integers(2, 6)))
        n = len(space)
        E = make_mixed_energy(space, [Edge(x, y, PowerEdge(p, float(rng.uniform(0.2, 2.0))))
                                      for x in range(n) for y in range(n) if x != y])
        self.assertTrue(E.is_homogeneous(p))
        self.assertFalse(E.is_homogeneous(p + 1.0))
        f, g = moderate_function(space, rng), moderate_function(space, rng)
        self.assertTrue(close(E(alpha * f), alpha ** p * E(f)))
        scale = alpha ** p * (E(f + g) + E(f - g) + E(f))
        self.assertLessEqual(abs(f_shift(E, alpha * f)(alpha * g) - alpha ** p * f_shift(E, f)(g)),
                             1e-9 * max(1.0, scale))


class EnergyFunctionalSerializerTest(SimpleTestCase):
    def setUp(self):
        self.space = FiniteMeasureSpace(['a', 'b'])
        self.context = {'space': self.space}

    def test_mixed_document(self):
        E = load_data(EnergyFunctionalSerializer,
                      {'type': 'mixed', 'edges': [{'from': 0, 'to': 1, 'b': {'kind': 'power', 'p': 2}}]},
                      self.context)
        self.assertIsInstance(E, MixedDirichletEnergy)
        self.assertEqual(E(self.space.function([1.0, 0.0])), 1.0)

    def test_quadratic_and_shift_documents(self):
        Q = load_data(EnergyFunctionalSerializer,
                      {'type': 'quadratic', 'matrix': [[1, -1], [-1, 1]]}, self.context)
        self.assertIsInstance(Q, QuadraticForm)
        S = load_data(EnergyFunctionalSerializer,
                      {'type': 'fshift', 'base': {'type': 'quadratic', 'matrix': [[1, -1], [-1, 1]]},
                       'center': [1.0, 2.0]}, self.context)
        self.assertIsInstance(S, FShift)
        self.assertEqual(S(self.space.function([1.0, -1.0])), 4.0)

    def test_round_trip_of_mixed_energy(self):
        rng = np.random.default_rng(1)
        E = random_mixed_energy(self.space, rng, edge_probability=1.0)
        again = load_data(EnergyFunctionalSerializer, E.to_dict(), self.context)
        f = self.space.function([0.5, -0.25])
        self.assertEqual(again(f), E(f))

    def test_edge_documents(self):
        b = load_data(EdgeFunctionSerializer, {'kind': 'pwl_convex', 'knots': [1], 'slopes': [0.5, 1]})
        self.assertIsInstance(b, PwlConvexEdge)
        s = load_data(EdgeFunctionSerializer,
                      {'kind': 'shifted', 'base': {'kind': 'power', 'p': 1}, 'c': 1.0})
        self.assertEqual(s(2.0), 1.0)

    def test_invalid_documents(self):
        with self.assertRaises(ValidationError):
            load_data(EdgeFunctionSerializer, {'kind': 'power'})
        with self.assertRaises(ValidationError):
            load_data(EdgeFunctionSerializer, {'kind': 'huber', 'delta': -1})
        with self.assertRaises(ValidationError):
            load_data(EnergyFunctionalSerializer, {'type': 'mixed'}, self.context)
        with self.assertRaises(ValidationError):
            load_data(EnergyFunctionalSerializer, {'type': 'zero'})
        with self.assertRaises(ValidationError):
            load_data(EnergyFunctionalSerializer,
                      {'type': 'quadratic', 'matrix': [[1, 2], [2, 1]]}, self.context)
