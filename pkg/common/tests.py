import numpy as np
from django.test import SimpleTestCase, override_settings
from hypothesis import given, settings, strategies as st
from rest_framework.exceptions import ValidationError

from common.exceptions import (DomainMismatchError, InvalidBandError, InvalidParameterError,
                               LabError, SolverDidNotConverge)
from common.helper import load_data
from common.measure import (FiniteMeasureSpace, band_clamp, inner, median_clamp, norm,
                            pointwise_lattice, sup_norm, vee, wedge)
from common.serializers import FiniteMeasureSpaceSerializer, FnSerializer
from common.utility import derive_seed, lab_setting, rng_for, sample_alpha, sample_values

reals = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False)
vectors = st.lists(reals, min_size=1, max_size=6)


def paired(values, shift):
    space = FiniteMeasureSpace.counting(len(values))
    return space.function(values), space.function([v + shift for v in values])


class FiniteMeasureSpaceTest(SimpleTestCase):
    def test_counting(self):
        space = FiniteMeasureSpace.counting(3)
        self.assertEqual(space.point_ids, (0, 1, 2))
        self.assertEqual(space.weights.tolist(), [1.0, 1.0, 1.0])
        self.assertEqual(FiniteMeasureSpace.counting(['a', 'b']).point_ids, ('a', 'b'))

    def test_invalid(self):
        with self.assertRaises(InvalidParameterError):
            FiniteMeasureSpace(['a', 'a'])
        with self.assertRaises(InvalidParameterError):
            FiniteMeasureSpace(['a', 'b'], [1.0, 0.0])
        with self.assertRaises(InvalidParameterError):
            FiniteMeasureSpace(['a', 'b'], [1.0, np.inf])
        with self.assertRaises(InvalidParameterError):
            FiniteMeasureSpace(['a', 'b'], [1.0])

    def test_equality_and_immutability(self):
        a = FiniteMeasureSpace(['a', 'b'], [2.0, 1.0])
        self.assertEqual(a, FiniteMeasureSpace(['a', 'b'], [2.0, 1.0]))
        self.assertNotEqual(a, FiniteMeasureSpace(['b', 'a'], [2.0, 1.0]))
        self.assertEqual(hash(a), hash(FiniteMeasureSpace(['a', 'b'], [2.0, 1.0])))
        with self.assertRaises(ValueError):
            a.weights[0] = 5.0

    def test_functions(self):
        space = FiniteMeasureSpace.counting(2)
        with self.assertRaises(InvalidParameterError):
            space.function([1.0])
        with self.assertRaises(InvalidParameterError):
            space.function([1.0, np.nan])
        f = space.function([1.0, -2.0])
        self.assertEqual((2 * f - 1).values.tolist(), [1.0, -5.0])
        self.assertEqual(f.negative_part().values.tolist(), [0.0, 2.0])
        self.assertEqual(f.positive_part().values.tolist(), [1.0, 0.0])
        with self.assertRaises(DomainMismatchError):
            f + FiniteMeasureSpace.counting(['x', 'y']).function([0.0, 0.0])


class InnerTest(SimpleTestCase):
    def test_counting_measure(self):
        space = FiniteMeasureSpace.counting(['a', 'b'])
        self.assertEqual(inner(space.function([1, 2]), space.function([3, 4])), 11.0)

    def test_weighted(self):
        space = FiniteMeasureSpace(['a', 'b'], [2.0, 1.0])
        self.assertEqual(inner(space.function([1, 2]), space.function([3, 4]), space), 14.0)
        self.assertEqual(inner(space.function([1, 2]), space.zeros()), 0.0)
        self.assertEqual(norm(space.function([3, 0])), np.sqrt(18.0))
        self.assertEqual(sup_norm(space.function([3, -4])), 4.0)

    def test_mismatched_spaces(self):
        f = FiniteMeasureSpace.counting(2).function([1, 2])
        g = FiniteMeasureSpace(range(2), [1.0, 2.0]).function([1, 2])
        with self.assertRaises(DomainMismatchError):
            inner(f, g)

    @given(vectors, st.integers(min_value=0, max_value=2 ** 32 - 1))
    @settings(max_examples=50, deadline=None)
    def test_symmetric_and_positive(self, values, seed):
        rng = np.random.default_rng(seed)
        space = FiniteMeasureSpace(range(len(values)), rng.uniform(0.1, 3.0, size=len(values)))
        f = space.function(values)
        g = space.function(rng.normal(size=len(values)))
        self.assertEqual(inner(f, g), inner(g, f))
        self.assertGreaterEqual(inner(f, f), 0.0)
        self.assertEqual(inner(space.zeros(), space.zeros()), 0.0)


class LatticeTest(SimpleTestCase):
    def test_vee_wedge(self):
        space = FiniteMeasureSpace.counting(2)
        f, g = space.function([1.0, -1.0]), space.zeros()
        self.assertEqual(vee(f, g).values.tolist(), [1.0, 0.0])
        self.assertEqual(wedge(f, g).values.tolist(), [0.0, -1.0])
        self.assertEqual(vee(f, f), f)
        self.assertEqual(wedge(f, f), f)
        self.assertEqual(vee(f, 0.5).values.tolist(), [1.0, 0.5])

    def test_unknown_op(self):
        f = FiniteMeasureSpace.counting(1).function([1.0])
        with self.assertRaises(InvalidParameterError):
            pointwise_lattice(f, f, 'join')

    @given(vectors, reals)
    @settings(max_examples=100, deadline=None)
    def test_sum_identity(self, values, shift):
        f, g = paired(values, shift)
        self.assertEqual((wedge(f, g) + vee(f, g)).values.tolist(), (f + g).values.tolist())
        self.assertEqual(vee(f, g), vee(g, f))
        self.assertEqual(wedge(f, g), wedge(g, f))


class MedianClampTest(SimpleTestCase):
    def test_examples(self):
        space = FiniteMeasureSpace.counting(1)
        f = space.function([1.0])
        self.assertEqual(median_clamp(f, space.zeros(), space.constant(2.0)), f)
        self.assertEqual(median_clamp(space.function([5.0]), space.zeros(),
                                      space.constant(2.0)).values.tolist(), [2.0])
        with self.assertRaises(InvalidBandError):
            median_clamp(f, space.constant(3.0), space.constant(2.0))

    def test_degenerate_band(self):
        space = FiniteMeasureSpace.counting(3)
        f, g = space.function([4.0, -1.0, 0.5]), space.function([1.0, 2.0, 3.0])
        self.assertEqual(band_clamp(f, g, 0.0), g)
        with self.assertRaises(InvalidParameterError):
            band_clamp(f, g, -1.0)

    @given(vectors, reals, st.floats(min_value=0.0, max_value=1e3))
    @settings(max_examples=100, deadline=None)
    def test_band(self, values, shift, alpha):
        f, g = paired(values, shift)
        h = band_clamp(f, g, alpha)
        self.assertTrue(np.all(np.abs(h.values - g.values) <= alpha * (1 + 1e-12) + 1e-9))


class UtilityTest(SimpleTestCase):
    def test_lab_setting(self):
        self.assertEqual(lab_setting('ATOL'), 1e-9)
        self.assertEqual(lab_setting('ATOL', 1e-3), 1e-3)
        with override_settings(DIRICHLET_LAB={'ATOL': 1e-6}):
            self.assertEqual(lab_setting('ATOL'), 1e-6)

    def test_streams(self):
        self.assertEqual(derive_seed(1, 'cg', 3), derive_seed(1, 'cg', 3))
        self.assertNotEqual(derive_seed(1, 'cg', 3), derive_seed(1, 'cg', 4))
        self.assertNotEqual(derive_seed(1, 'cg', 3), derive_seed(2, 'cg', 3))
        np.testing.assert_array_equal(sample_values(rng_for(0, 'x'), 5),
                                      sample_values(rng_for(0, 'x'), 5))

    def test_samplers(self):
        rng = rng_for(7, 'samplers')
        values = sample_values(rng, 10000)
        self.assertTrue(np.all(np.abs(values) <= 30.0))
        self.assertGreater(np.mean(np.abs(values) > 3.0), 0.0)
        alpha = sample_alpha(rng, 1000)
        self.assertTrue(np.all((alpha >= 1e-2 * (1 - 1e-12)) & (alpha <= 1e1 * (1 + 1e-12))))


class ExceptionTest(SimpleTestCase):
    def test_codes(self):
        self.assertEqual(InvalidBandError('empty').code, 'invalid_band')
        self.assertIsInstance(DomainMismatchError('x'), LabError)
        error = SolverDidNotConverge('stopped', result='partial')
        self.assertEqual(error.code, 'not_converged')
        self.assertEqual(error.result, 'partial')


class SerializerTest(SimpleTestCase):
    def test_space(self):
        space = load_data(FiniteMeasureSpaceSerializer, {'points': ['a', 'b'], 'weights': [2, 1]})
        self.assertEqual(space, FiniteMeasureSpace(['a', 'b'], [2.0, 1.0]))
        self.assertEqual(FiniteMeasureSpaceSerializer(space).data,
                         {'points': ['a', 'b'], 'weights': [2.0, 1.0]})
        with self.assertRaises(ValidationError):
            load_data(FiniteMeasureSpaceSerializer, {'points': ['a', 'b'], 'weights': [1]})
        with self.assertRaises(ValidationError):
            load_data(FiniteMeasureSpaceSerializer, {'points': ['a', 'b'], 'weights': [1, -1]})

    def test_function(self):
        spaces = [FiniteMeasureSpace.counting(2), FiniteMeasureSpace.counting(3)]
        f = load_data(FnSerializer, {'space': 1, 'values': [1, 2, 3]}, {'spaces': spaces})
        self.assertEqual(f.space, spaces[1])
        with self.assertRaises(ValidationError):
            load_data(FnSerializer, {'space': 2, 'values': [1]}, {'spaces': spaces})
        with self.assertRaises(ValidationError):
            load_data(FnSerializer, {'space': 0, 'values': [1, 2, 3]}, {'spaces': spaces})
        with self.assertRaises(ValidationError):
            load_data(FnSerializer, {'values': [1, 2]})
