"""
Finite measure spaces and real functions on them.

A ``FiniteMeasureSpace`` is an ordered point set with a strictly positive
weight per point; ``Fn`` is an element of L^2(X, m) for such a space.  Both
are immutable once built.
"""
import logging
import numbers

import numpy as np

from common.exceptions import DomainMismatchError, InvalidBandError, InvalidParameterError

logger = logging.getLogger(__name__)

LATTICE_OPS = ('vee', 'wedge')


def _frozen(values):
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


class FiniteMeasureSpace:
    """
    Finite point set with the measure given by per-point weights.
    """

    def __init__(self, point_ids, weights=None):
        point_ids = tuple(point_ids)
        if len(set(point_ids)) != len(point_ids):
            raise InvalidParameterError('Point ids must be distinct.')
        if weights is None:
            weights = np.ones(len(point_ids))
        weights = _frozen(weights)
        if weights.shape != (len(point_ids),):
            raise InvalidParameterError(
                f'Expected {len(point_ids)} weights, got {weights.size}.')
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise InvalidParameterError('Weights must be strictly positive and finite.')
        self._point_ids = point_ids
        self._weights = weights

    @classmethod
    def counting(cls, size_or_ids):
        """Counting measure on ``n`` points (ids 0..n-1) or on the given ids."""
        if isinstance(size_or_ids, numbers.Integral):
            return cls(range(size_or_ids))
        return cls(size_or_ids)

    @property
    def point_ids(self):
        return self._point_ids

    @property
    def weights(self):
        return self._weights

    def __len__(self):
        return len(self._point_ids)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FiniteMeasureSpace):
            return NotImplemented
        return (self._point_ids == other._point_ids
                and np.array_equal(self._weights, other._weights))

    def __hash__(self):
        return hash((self._point_ids, self._weights.tobytes()))

    def __repr__(self):
        return f'FiniteMeasureSpace(points={list(self._point_ids)!r}, weights={self._weights.tolist()!r})'

    def index(self, point_id):
        return self._point_ids.index(point_id)

    def function(self, values):
        return Fn(self, values)

    def zeros(self):
        return Fn(self, np.zeros(len(self)))

    def constant(self, value):
        return Fn(self, np.full(len(self), float(value)))

    def to_dict(self):
        return {'points': list(self._point_ids), 'weights': self._weights.tolist()}


class Fn:
    """
    Real-valued function on a ``FiniteMeasureSpace``.

    Supports the vector-space operations and comparisons with scalars or with
    functions on the same space; mixing spaces raises ``DomainMismatchError``.
    """
    __array_priority__ = 100

    def __init__(self, space, values):
        values = _frozen(values)
        if values.shape != (len(space),):
            raise InvalidParameterError(
                f'Function needs {len(space)} values, got {values.size}.')
        if not np.all(np.isfinite(values)):
            raise InvalidParameterError('Function values must be finite.')
        self._space = space
        self._values = values

    @property
    def space(self):
        return self._space

    @property
    def values(self):
        return self._values

    def __len__(self):
        return len(self._values)

    def __repr__(self):
        return f'Fn({self._values.tolist()!r})'

    def _other(self, other):
        if isinstance(other, Fn):
            check_same_space(self, other)
            return other._values
        if isinstance(other, numbers.Real):
            return float(other)
        return NotImplemented

    def _lift(self, values):
        return Fn(self._space, values)

    def __add__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._lift(self._values + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._lift(self._values - o)

    def __rsub__(self, other):
        o = self._other(other)
        return NotImplemented if o is NotImplemented else self._lift(o - self._values)

    def __mul__(self, other):
        if isinstance(other, numbers.Real):
            return self._lift(self._values * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, numbers.Real):
            return self._lift(self._values / float(other))
        return NotImplemented

    def __neg__(self):
        return self._lift(-self._values)

    def __abs__(self):
        return self._lift(np.abs(self._values))

    def __eq__(self, other):
        if not isinstance(other, Fn):
            return NotImplemented
        return self._space == other._space and np.array_equal(self._values, other._values)

    __hash__ = None

    def positive_part(self):
        return self._lift(np.maximum(self._values, 0.0))

    def negative_part(self):
        """``f_- = (-f)_+``, a nonnegative function."""
        return self._lift(np.maximum(-self._values, 0.0))

    def allclose(self, other, atol=1e-12):
        check_same_space(self, other)
        return bool(np.max(np.abs(self._values - other._values), initial=0.0) <= atol)

    def to_dict(self):
        return {'values': self._values.tolist()}


def check_same_space(*functions):
    first = functions[0].space
    for f in functions[1:]:
        if f.space != first:
            raise DomainMismatchError('Functions live on different measure spaces.')
    return first


def _values_of(space, x):
    if isinstance(x, Fn):
        if x.space != space:
            raise DomainMismatchError('Functions live on different measure spaces.')
        return x.values
    return np.full(len(space), float(x))


def inner(f, g, space=None):
    """
    Weighted L^2 pairing ``sum_x m_x f(x) g(x)``.

    Args:
        f (Fn): First function.
        g (Fn): Second function.
        space (FiniteMeasureSpace, optional): Expected space of both arguments.

    Returns:
        float: The inner product.

    Raises:
        DomainMismatchError: If the functions (or ``space``) disagree.
    """
    space = space if space is not None else f.space
    fv = _values_of(space, f)
    gv = _values_of(space, g)
    return float(np.dot(space.weights, fv * gv))


def norm(f):
    return float(np.sqrt(max(inner(f, f), 0.0)))


def sup_norm(f):
    return float(np.max(np.abs(f.values), initial=0.0))


def pointwise_lattice(f, g, op):
    """
    Pointwise maximum (``op='vee'``) or minimum (``op='wedge'``).

    Either argument may be a real number standing for the constant function.
    """
    if op not in LATTICE_OPS:
        raise InvalidParameterError(f'Unknown lattice operation {op!r}.')
    space = f.space if isinstance(f, Fn) else g.space
    fv = _values_of(space, f)
    gv = _values_of(space, g)
    combine = np.maximum if op == 'vee' else np.minimum
    return Fn(space, combine(fv, gv))


def vee(f, g):
    return pointwise_lattice(f, g, 'vee')


def wedge(f, g):
    return pointwise_lattice(f, g, 'wedge')


def median_clamp(f, lower, upper):
    """
    ``lower ∨ f ∧ upper``, read as ``lower ∨ (f ∧ upper)``.

    Raises:
        InvalidBandError: If ``lower > upper`` at some point.
    """
    space = f.space
    lo = _values_of(space, lower)
    hi = _values_of(space, upper)
    bad = np.flatnonzero(lo > hi)
    if bad.size:
        raise InvalidBandError(
            f'Band is empty at point {space.point_ids[bad[0]]!r}: lower > upper.')
    return Fn(space, np.maximum(lo, np.minimum(f.values, hi)))


def band_clamp(f, g, alpha):
    """``H_alpha(f, g) = (g - alpha) ∨ f ∧ (g + alpha)``, the clamp of f to the band around g."""
    if alpha < 0:
        raise InvalidParameterError('Band half-width must be nonnegative.')
    return median_clamp(f, g - alpha, g + alpha)
