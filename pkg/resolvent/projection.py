"""
Projection onto the band ``{(u, v) : 2a <= u - v <= 2b}`` of the product space.

Writing ``u = f + g`` and ``v = f - g`` the projection keeps ``f`` and clamps
``g`` to ``[a, b]``.
"""
import math

import numpy as np

from common.exceptions import InvalidBandError
from common.measure import check_same_space, inner, median_clamp
from criteria.residuals import Residual


def _bounds(a, b):
    a = -math.inf if a is None else float(a)
    b = math.inf if b is None else float(b)
    if math.isnan(a) or math.isnan(b) or a > 0 or b < 0:
        raise InvalidBandError(f'The band needs a <= 0 <= b, got a={a!r}, b={b!r}.')
    return a, b


def band_projection(u, v, a=None, b=None):
    """
    ``P(u, v) = (f + C g, f - C g)`` with ``C(x) = a ∨ x ∧ b``.

    Args:
        u (Fn): First component.
        v (Fn): Second component, on the same space.
        a (float, optional): Lower bound ``<= 0``; None or -inf leaves the band
            open below.
        b (float, optional): Upper bound ``>= 0``; None or +inf leaves it open above.

    Raises:
        InvalidBandError: If ``a > 0`` or ``b < 0``.
        DomainMismatchError: If ``u`` and ``v`` live on different spaces.
    """
    a, b = _bounds(a, b)
    check_same_space(u, v)
    f = (u + v) / 2.0
    cg = median_clamp((u - v) / 2.0, a, b)
    return f + cg, f - cg


def in_band(u, v, a=None, b=None, atol=1e-12):
    a, b = _bounds(a, b)
    d = (u - v).values
    return bool(np.all(d >= 2.0 * a - atol) and np.all(d <= 2.0 * b + atol))


def product_inner(first, second):
    """``<(u1, v1), (u2, v2)> = <u1, u2>_m + <v1, v2>_m``."""
    return inner(first[0], second[0]) + inner(first[1], second[1])


def projection_characterization(u, v, other_u, other_v, a=None, b=None):
    """
    ``<(u, v) - P, (u~, v~) - P>`` for a pair ``(u~, v~)`` in the band; it is
    ``<= 0`` exactly when ``P`` is the Hilbert projection.
    """
    pu, pv = band_projection(u, v, a, b)
    return product_inner((u - pu, v - pv), (other_u - pu, other_v - pv))


def product_projection_residual(E, u, v, a=None, b=None, tolerance=None):
    """
    ``E(P1) + E(P2) <= E(u) + E(v)`` for ``(P1, P2) = band_projection(u, v, a, b)``;
    the same residual as the compatibility of ``E`` with the clamp ``a ∨ x ∧ b``
    at ``f = (u + v)/2``, ``g = (u - v)/2``.
    """
    pu, pv = band_projection(u, v, a, b)
    return Residual(E(pu) + E(pv), E(u) + E(v), tolerance, name='projection_invariance')
