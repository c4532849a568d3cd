"""
Extended-value energy functionals ``E: L^2(X, m) -> [0, ∞]``.

Values are Python floats with ``math.inf`` for +∞.  Every functional
evaluates a single ``Fn`` (``E(f)``) or a stack of value vectors at once
(``E.evaluate_many(V)`` with ``V`` of shape ``(k, n)``); the sweeps use the
latter.
"""
import logging
import math
from collections import namedtuple

import numpy as np

from common.exceptions import DomainMismatchError, ImproperCenterError, InvalidFunctionalError
from common.measure import Fn, FiniteMeasureSpace
from functionals.edges import EdgeFunction, shifted_edge

logger = logging.getLogger(__name__)

INF = math.inf

Edge = namedtuple('Edge', ['source', 'target', 'function'])


class EnergyFunctional:
    """Base class: a convex functional on the functions of one finite measure space."""
    type = None
    convex = True

    def __init__(self, space):
        if not isinstance(space, FiniteMeasureSpace):
            raise InvalidFunctionalError('A functional needs a FiniteMeasureSpace.')
        self._space = space

    @property
    def space(self):
        return self._space

    @property
    def smooth(self):
        """True when ``E`` is finite and differentiable everywhere with a locally Lipschitz gradient."""
        return False

    def _check(self, f):
        if not isinstance(f, Fn) or f.space != self._space:
            raise DomainMismatchError('Function does not live on the functional\'s space.')

    def evaluate(self, f):
        self._check(f)
        return float(self.evaluate_many(f.values[None, :])[0])

    eval = evaluate
    __call__ = evaluate

    def evaluate_many(self, values):
        raise NotImplementedError

    def gradient(self, values):
        """Euclidean gradient at the value vector ``values`` (smooth functionals only)."""
        raise InvalidFunctionalError(f'{type(self).__name__} has no gradient.')

    def is_homogeneous(self, p):
        """Whether ``E(a f) = a^p E(f)`` for every ``a > 0``."""
        return False

    def to_dict(self):
        return {'type': self.type}


class ZeroFunctional(EnergyFunctional):
    type = 'zero'

    @property
    def smooth(self):
        return True

    def evaluate_many(self, values):
        return np.zeros(np.shape(values)[0])

    def gradient(self, values):
        return np.zeros_like(np.asarray(values, dtype=float))

    def is_homogeneous(self, p):
        return True


class QuadraticForm(EnergyFunctional):
    """
    ``E(f) = f^T M f`` for a symmetric positive semidefinite matrix ``M``
    (counting-measure coordinates).
    """
    type = 'quadratic'

    def __init__(self, space, matrix):
        super().__init__(space)
        matrix = np.asarray(matrix, dtype=float)
        n = len(space)
        if matrix.shape != (n, n):
            raise InvalidFunctionalError(f'Quadratic form needs a {n}x{n} matrix, got {matrix.shape}.')
        if not np.all(np.isfinite(matrix)):
            raise InvalidFunctionalError('Quadratic form matrix must be finite.')
        scale = max(1.0, float(np.max(np.abs(matrix), initial=0.0)))
        if not np.allclose(matrix, matrix.T, rtol=0, atol=1e-12 * scale):
            raise InvalidFunctionalError('Quadratic form matrix must be symmetric.')
        matrix = (matrix + matrix.T) / 2.0
        smallest = float(np.min(np.linalg.eigvalsh(matrix), initial=0.0))
        if smallest < -1e-10 * scale:
            raise InvalidFunctionalError(
                f'Quadratic form matrix is not positive semidefinite (eigenvalue {smallest:.3g}).')
        matrix.setflags(write=False)
        self.matrix = matrix

    @property
    def smooth(self):
        return True

    def evaluate_many(self, values):
        V = np.asarray(values, dtype=float)
        return np.maximum(np.einsum('ki,ij,kj->k', V, self.matrix, V), 0.0)

    def gradient(self, values):
        return 2.0 * self.matrix @ np.asarray(values, dtype=float)

    def is_homogeneous(self, p):
        return float(p) == 2.0 or not np.any(self.matrix)

    def to_dict(self):
        return {'type': self.type, 'matrix': self.matrix.tolist()}


class MixedDirichletEnergy(EnergyFunctional):
    """
    ``E(f) = sum over edges (x, y) of b_xy(f(x) - f(y))``.

    Edges are ordered pairs of point indices; a symmetric graph lists both
    orientations.

    Args:
        space (FiniteMeasureSpace): The underlying space.
        edges (iterable of Edge or (source, target, EdgeFunction)): The terms.
        allow_nonconvex (bool): Accept non-convex edge functions. Only the
            negative-control generators set this.
    """
    type = 'mixed'

    def __init__(self, space, edges, allow_nonconvex=False):
        super().__init__(space)
        n = len(space)
        checked = []
        for edge in edges:
            source, target, function = edge
            if not isinstance(function, EdgeFunction):
                raise InvalidFunctionalError(f'Edge {source}->{target} has no edge function.')
            for index in (source, target):
                if not (isinstance(index, (int, np.integer)) and 0 <= index < n):
                    raise InvalidFunctionalError(f'Edge endpoint {index!r} is not a point index.')
            if not function.convex and not allow_nonconvex:
                raise InvalidFunctionalError(
                    f'Edge function {function!r} is not convex.', code='not_convex')
            checked.append(Edge(int(source), int(target), function))
        self.edges = tuple(checked)
        self.convex = all(e.function.convex for e in self.edges)

    @property
    def smooth(self):
        return all(e.function.smooth for e in self.edges)

    def differences(self, values):
        V = np.asarray(values, dtype=float)
        sources = [e.source for e in self.edges]
        targets = [e.target for e in self.edges]
        return V[..., sources] - V[..., targets]

    def evaluate_many(self, values):
        V = np.atleast_2d(np.asarray(values, dtype=float))
        total = np.zeros(V.shape[0])
        for e in self.edges:
            total = total + e.function._values(V[:, e.source] - V[:, e.target])
        return total

    def gradient(self, values):
        values = np.asarray(values, dtype=float)
        grad = np.zeros_like(values)
        for e in self.edges:
            g = e.function.derivative(values[e.source] - values[e.target])
            grad[e.source] += g
            grad[e.target] -= g
        return grad

    def is_homogeneous(self, p):
        return all(e.function.is_homogeneous(p) for e in self.edges)

    def explicit_shift(self, f):
        """
        The f-shift written as a mixed energy: each edge function shifted by
        its offset ``f(x) - f(y)``.

        Raises:
            ImproperCenterError: If ``E(f) = ∞``.
        """
        self._check(f)
        v = f.values
        return MixedDirichletEnergy(
            self._space,
            [Edge(e.source, e.target, shifted_edge(e.function, v[e.source] - v[e.target]))
             for e in self.edges],
            allow_nonconvex=not self.convex)

    def explicit_shift_many(self, centers, values):
        """
        Row-wise values of the explicit shifted-edge energy: row ``i`` is the
        shift around ``centers[i]`` evaluated at ``values[i]``.  Rows whose
        center has infinite energy are NaN.
        """
        F = np.atleast_2d(np.asarray(centers, dtype=float))
        G = np.atleast_2d(np.asarray(values, dtype=float))
        total = np.zeros(F.shape[0])
        with np.errstate(invalid='ignore'):
            for e in self.edges:
                b = e.function
                c = F[:, e.source] - F[:, e.target]
                t = G[:, e.source] - G[:, e.target]
                total = total + (b._values(c + t) + b._values(c - t)) / 2.0 - b._values(c)
        return total

    def to_dict(self):
        data = {'type': self.type,
                'edges': [{'from': e.source, 'to': e.target, 'b': e.function.to_dict()}
                          for e in self.edges]}
        if not self.convex:
            data['allow_nonconvex'] = True
        return data


class FShift(EnergyFunctional):
    """
    ``E_f(g) = (E(f + g) + E(f - g)) / 2 - E(f)`` for a center with ``E(f) < ∞``.
    """
    type = 'fshift'

    def __init__(self, base, center):
        super().__init__(base.space)
        base._check(center)
        base_at_center = base(center)
        if not math.isfinite(base_at_center):
            raise ImproperCenterError('The f-shift needs a center with finite energy.')
        self.base = base
        self.center = center
        self.base_at_center = base_at_center
        self.convex = base.convex

    @property
    def smooth(self):
        return self.base.smooth

    def evaluate_many(self, values):
        V = np.atleast_2d(np.asarray(values, dtype=float))
        c = self.center.values
        return (self.base.evaluate_many(c + V) + self.base.evaluate_many(c - V)) / 2.0 \
            - self.base_at_center

    def gradient(self, values):
        c = self.center.values
        values = np.asarray(values, dtype=float)
        return (self.base.gradient(c + values) - self.base.gradient(c - values)) / 2.0

    def is_homogeneous(self, p):
        return isinstance(self.base, (ZeroFunctional, QuadraticForm)) and self.base.is_homogeneous(p)

    def to_dict(self):
        return {'type': self.type, 'base': self.base.to_dict(),
                'center': self.center.values.tolist()}


def f_shift(E, f):
    """
    The f-shift ``E_f``.

    Raises:
        ImproperCenterError: If ``E(f) = ∞``.
        DomainMismatchError: If ``f`` is not on ``E``'s space.
    """
    return FShift(E, f)


def make_mixed_energy(space, edges, allow_nonconvex=False):
    """Mixed Dirichlet energy on ``space``; an empty edge list gives the zero functional."""
    edges = list(edges)
    if not edges:
        return ZeroFunctional(space)
    return MixedDirichletEnergy(space, edges, allow_nonconvex=allow_nonconvex)


def make_quadratic_form(space, matrix):
    return QuadraticForm(space, matrix)


def is_homogeneous(E, p):
    return E.is_homogeneous(p)


def f_shift_many(E, centers, values):
    """
    Row-wise ``E_f(g)`` for stacks of centers and arguments; rows whose center
    has infinite energy (where the shift is undefined) are NaN.
    """
    F = np.atleast_2d(np.asarray(centers, dtype=float))
    G = np.atleast_2d(np.asarray(values, dtype=float))
    base = E.evaluate_many(F)
    with np.errstate(invalid='ignore'):
        out = (E.evaluate_many(F + G) + E.evaluate_many(F - G)) / 2.0 - base
    return np.where(np.isinf(base), np.nan, out)
