import logging

import numpy as np

from common.exceptions import (InvalidParameterError, NotIncreasingContractionError,
                               NotNormalContractionError)
from contractions import named
from contractions.piecewise import PiecewiseLinear, compose, identity

logger = logging.getLogger(__name__)


def require_normal(C, what='contraction'):
    verdict = C.verify_normal()
    if not verdict:
        raise NotNormalContractionError(f'{what} is not a normal contraction: {verdict.description}')
    return C


def require_increasing_normal(p, what='p'):
    verdict = p.verify_increasing_normal()
    if not verdict:
        raise NotIncreasingContractionError(
            f'{what} is not an increasing normal contraction: {verdict.description}')
    return p


def apply(C, f):
    """Pointwise ``C f``."""
    return C.apply(f)


def bp_from_contraction(C):
    """
    ``p(x) = x/2 - C(x/2)``, the increasing normal contraction paired with ``C``.

    Raises:
        NotNormalContractionError: If ``C`` is not normal.
    """
    require_normal(C, 'C')
    return 0.5 * identity() - C.scale_argument(0.5)


def contraction_from_bp(p):
    """
    ``C(x) = x - p(2x)``, inverse of :func:`bp_from_contraction`.

    Raises:
        NotIncreasingContractionError: If ``p`` is not an increasing normal contraction.
    """
    require_increasing_normal(p)
    return identity() - p.scale_argument(2.0)


def bp_compose(p1, p2):
    """``x -> p1(x) + p2(x - 2 p1(x))``."""
    require_increasing_normal(p1, 'p1')
    require_increasing_normal(p2, 'p2')
    return p1 + compose(p2, identity() - 2.0 * p1)


def build_Dn(n):
    """
    ``D_n = C_{2·3^-n} ∘ ... ∘ C_{2·3^n}``, innermost factor ``C_{2·3^n}``.

    ``D_n`` maps [-3^(n+1), 3^(n+1)] into [-3^-n, 3^-n] and converges pointwise
    to the zero map.
    """
    n = int(n)
    if n < 0:
        raise InvalidParameterError(f'n must be >= 0, got {n}.')
    D = named.tent(2.0 * 3.0 ** n)
    for k in range(n - 1, -n - 1, -1):
        D = compose(named.tent(2.0 * 3.0 ** k), D)
    return D


def Dn_factors(n):
    """Tent parameters of ``D_n`` in application order (innermost first)."""
    return [2.0 * 3.0 ** k for k in range(int(n), -int(n) - 1, -1)]


def generator_family(sign, x1=None, x2=None):
    """
    Members of the generator set: ``±id``, ``±phi_x`` and ``±phi_{x1,x2}``.

    Args:
        sign (int): +1 or -1.
        x1 (float, optional): First sign change.
        x2 (float, optional): Second sign change (requires ``x1``).
    """
    if sign not in (1, -1):
        raise InvalidParameterError('sign must be +1 or -1.')
    if x1 is None:
        base = identity()
    elif x2 is None:
        base = named.phi_x(x1)
    else:
        base = named.phi_x1x2(x1, x2)
    return base if sign == 1 else -base


def limit_sequence(kind, length, **params):
    """
    Approximants converging pointwise to a limit contraction.

    ``'Dn'`` gives ``D_0, ..., D_{length-1}`` (limit: the zero map);
    ``'min_alpha'`` gives ``x ∧ (alpha + 2^-k)`` (limit: ``x ∧ alpha``).

    Returns:
        tuple: (list of approximants, limit)
    """
    if kind == 'Dn':
        return [build_Dn(k) for k in range(length)], named.zero()
    if kind == 'min_alpha':
        alpha = float(params.get('alpha', 0.0))
        return ([named.min_alpha(alpha + 2.0 ** -k) for k in range(length)],
                named.min_alpha(alpha))
    raise InvalidParameterError(f'Unknown limit sequence {kind!r}.')


def random_piecewise(rng, max_breakpoints=5, spread=3.0, slope_range=2.0):
    """Random piecewise-linear map, not necessarily a contraction."""
    k = int(rng.integers(0, max_breakpoints + 1))
    breakpoints = np.sort(rng.uniform(-spread, spread, size=k))
    slopes = rng.uniform(-slope_range, slope_range, size=k + 1)
    anchor = float(rng.uniform(-spread, spread))
    return PiecewiseLinear(breakpoints, slopes, anchor)


def random_normal_contraction(rng, max_breakpoints=5, spread=3.0):
    """Random normal contraction: C(0) = 0, slopes uniform on [-1, 1]."""
    k = int(rng.integers(0, max_breakpoints + 1))
    breakpoints = np.sort(rng.uniform(-spread, spread, size=k))
    slopes = rng.uniform(-1.0, 1.0, size=k + 1)
    # pin a few slopes to the extremes so the Lipschitz bound is attained
    pinned = rng.random(size=k + 1) < 0.3
    slopes[pinned] = np.sign(slopes[pinned])
    return PiecewiseLinear(breakpoints, slopes, 0.0)


def random_increasing_normal(rng, max_breakpoints=5, spread=3.0):
    k = int(rng.integers(0, max_breakpoints + 1))
    breakpoints = np.sort(rng.uniform(-spread, spread, size=k))
    slopes = rng.uniform(0.0, 1.0, size=k + 1)
    return PiecewiseLinear(breakpoints, slopes, 0.0)
