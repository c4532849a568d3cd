import logging

import numpy as np

from common.exceptions import InvalidParameterError
from common.utility import sample_values
from functionals.edges import (HuberEdge, IntervalIndicator, PowerEdge, PwlConvexEdge,
                               QuadraticWeighted, TruncatedAbsEdge)
from functionals.energies import Edge, make_mixed_energy

logger = logging.getLogger(__name__)

CONVEX_EDGE_KINDS = ('power', 'power1', 'power2', 'huber', 'interval_indicator', 'pwl_convex',
                     'quadratic_weighted')


def random_edge_function(rng, kind):
    """
    Random member of the edge family ``kind``.

    ``power`` draws p from [1, 4]; ``power1``/``power2`` fix p; indicator
    half-widths are drawn from [2, 6] so that sampled functions are often
    feasible.
    """
    weight = float(rng.uniform(0.2, 2.0))
    if kind == 'power':
        return PowerEdge(float(rng.uniform(1.0, 4.0)), weight)
    if kind == 'power1':
        return PowerEdge(1.0, weight)
    if kind == 'power2':
        return PowerEdge(2.0, weight)
    if kind == 'huber':
        return HuberEdge(float(rng.uniform(0.2, 2.0)), weight)
    if kind == 'interval_indicator':
        return IntervalIndicator(float(rng.uniform(2.0, 6.0)))
    if kind == 'pwl_convex':
        k = int(rng.integers(1, 4))
        knots = np.sort(rng.uniform(0.2, 3.0, size=k))
        slopes = np.cumsum(rng.uniform(0.0, 1.0, size=k + 1))
        return PwlConvexEdge.from_half(knots, slopes)
    if kind == 'quadratic_weighted':
        return QuadraticWeighted(weight)
    if kind == 'truncated_abs':
        return TruncatedAbsEdge(float(rng.uniform(0.5, 2.0)))
    raise InvalidParameterError(f'Unknown edge kind {kind!r}.')


def random_mixed_energy(space, rng, kinds=CONVEX_EDGE_KINDS, edge_probability=0.5,
                        allow_nonconvex=False):
    """Mixed energy with each ordered pair of distinct points joined with ``edge_probability``."""
    n = len(space)
    edges = []
    for x in range(n):
        for y in range(n):
            if x != y and rng.random() < edge_probability:
                kind = kinds[int(rng.integers(len(kinds)))]
                edges.append(Edge(x, y, random_edge_function(rng, kind)))
    return make_mixed_energy(space, edges, allow_nonconvex=allow_nonconvex)


def random_function(space, rng):
    return space.function(sample_values(rng, len(space)))


def midpoint_gaps(E, F, G):
    """
    ``E((f + g) / 2) - (E(f) + E(g)) / 2`` row by row; positive entries are
    midpoint-convexity failures.  Rows where ``E(f)`` or ``E(g)`` is infinite
    give ``-inf``.
    """
    mid = E.evaluate_many((F + G) / 2.0)
    ends = (E.evaluate_many(F) + E.evaluate_many(G)) / 2.0
    with np.errstate(invalid='ignore'):
        gaps = mid - ends
    return np.where(np.isinf(ends), -np.inf, gaps)


def find_midpoint_violation(E, rng, n_samples=1000, atol=1e-10):
    """
    Search sampled pairs for a midpoint-convexity failure.

    Returns:
        tuple or None: ``(f, g, gap)`` for the first failing pair.
    """
    n = len(E.space)
    F = sample_values(rng, (n_samples, n))
    G = sample_values(rng, (n_samples, n))
    gaps = midpoint_gaps(E, F, G)
    bad = np.flatnonzero(gaps > atol)
    if not bad.size:
        return None
    i = int(bad[0])
    logger.debug('midpoint convexity fails on sample %d with gap %.3g', i, gaps[i])
    return E.space.function(F[i]), E.space.function(G[i]), float(gaps[i])
