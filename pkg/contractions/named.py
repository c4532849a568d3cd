"""
Named normal contractions and the auxiliary maps used in the lemma proofs.

Every constructor returns an exact ``PiecewiseLinear``; ``make_named`` looks
them up by string kind so that CLI configs and JSON documents can refer to
them.
"""
from common.exceptions import InvalidParameterError
from contractions.piecewise import PiecewiseLinear, compose, identity


def _nonnegative(name, value):
    value = float(value)
    if not value >= 0:
        raise InvalidParameterError(f'{name} must be >= 0, got {value!r}.')
    return value


def _ordered(x1, x2):
    x1, x2 = float(x1), float(x2)
    if not x1 < x2:
        raise InvalidParameterError(f'Need x1 < x2, got x1={x1!r}, x2={x2!r}.')
    return x1, x2


def negation():
    return PiecewiseLinear((), (-1.0,), 0.0)


def zero():
    return PiecewiseLinear((), (0.0,), 0.0)


def absolute():
    """``x -> |x|``."""
    return PiecewiseLinear((0.0,), (-1.0, 1.0), 0.0)


def pos_part():
    """``x -> x_+ = 0 ∨ x``."""
    return PiecewiseLinear((0.0,), (0.0, 1.0), 0.0)


def clamp_sym(alpha):
    """``x -> -alpha ∨ x ∧ alpha``."""
    alpha = _nonnegative('alpha', alpha)
    return PiecewiseLinear((-alpha, alpha), (0.0, 1.0, 0.0), 0.0)


def min_alpha(alpha):
    """``x -> x ∧ alpha``."""
    alpha = _nonnegative('alpha', alpha)
    return PiecewiseLinear((alpha,), (1.0, 0.0), 0.0)


def clamp_0_alpha(alpha):
    """``x -> 0 ∨ x ∧ alpha``."""
    alpha = _nonnegative('alpha', alpha)
    return PiecewiseLinear((0.0, alpha), (0.0, 1.0, 0.0), 0.0)


def clamp(a=None, b=None):
    """
    ``x -> a ∨ x ∧ b`` for ``a <= 0 <= b``; a missing bound means no clamp on that side.
    """
    if a is not None and a > 0 or b is not None and b < 0:
        raise InvalidParameterError(f'Need a <= 0 <= b, got a={a!r}, b={b!r}.')
    bps, slopes = [], [1.0]
    if a is not None:
        bps.append(float(a))
        slopes = [0.0, 1.0]
    if b is not None:
        bps.append(float(b))
        slopes.append(0.0)
    return PiecewiseLinear(bps, slopes, 0.0)


def tent(alpha):
    """
    ``C_alpha: x -> (-alpha - x) ∨ x ∧ (alpha - x)``.

    Identity on [-alpha/2, alpha/2], slope -1 outside.
    """
    alpha = _nonnegative('alpha', alpha)
    return PiecewiseLinear((-alpha / 2.0, alpha / 2.0), (-1.0, 1.0, -1.0), 0.0)


def phi_x(x):
    """
    One sign change at ``x``, slope starting at +1.

    ``t - 2(t - x)_+`` for ``x >= 0`` and ``-t - 2(x - t)_+`` for ``x < 0``.
    """
    return PiecewiseLinear((float(x),), (1.0, -1.0), 0.0)


def phi_x1x2(x1, x2):
    """
    Two sign changes at ``x1 < x2``, slope starting at +1, value 0 at 0.

    Same sign (``0 <= x1`` or ``x2 <= 0``) and straddling (``x1 < 0 < x2``)
    parameters give the same slope pattern; in the straddling case the map is
    ``-t - 2(x1 - t)_+ + 2(t - x2)_+``, the form fixed by the identities
    ``psi = phi_x1 ∘ (id ∧ x2)`` and ``phi_2x2(id - psi) = id ∧ x2 - phi_x1x2``.
    """
    x1, x2 = _ordered(x1, x2)
    return PiecewiseLinear((x1, x2), (1.0, -1.0, 1.0), 0.0)


def sigma_x(x):
    """Companion ``sigma_x(t) = phi_x(t_+)`` for ``x >= 0``."""
    x = _nonnegative('x', x)
    return PiecewiseLinear((0.0, x), (0.0, 1.0, -1.0), 0.0)


def case2_sigma(x1, x2):
    """``sigma(x) = (0 ∧ (x1 - x)) ∨ (x + x1 - 2 x2)`` for ``0 <= x1 < x2``."""
    x1, x2 = _ordered(x1, x2)
    _nonnegative('x1', x1)
    return PiecewiseLinear((x1, x2), (0.0, -1.0, 1.0), 0.0)


def case2_psi(x1, x2):
    """``psi(x) = phi_{x1,x2}(x_+)`` for ``0 <= x1 < x2``."""
    x1, x2 = _ordered(x1, x2)
    _nonnegative('x1', x1)
    return PiecewiseLinear((0.0, x1, x2), (0.0, 1.0, -1.0, 1.0), 0.0)


def case3_psi(x1, x2):
    """``psi(x) = (x - 2 x1) ∧ -(x ∧ x2)`` for ``x1 < 0 < x2``."""
    x1, x2 = _ordered(x1, x2)
    if not x1 < 0 < x2:
        raise InvalidParameterError(f'Need x1 < 0 < x2, got x1={x1!r}, x2={x2!r}.')
    return PiecewiseLinear((x1, x2), (1.0, -1.0, 0.0), 0.0)


def scaled(factor):
    """``t -> factor * t``; a normal contraction iff ``|factor| <= 1``."""
    return PiecewiseLinear((), (float(factor),), 0.0)


NAMED_CONTRACTIONS = {
    'identity': identity,
    'negation': negation,
    'zero': zero,
    'abs': absolute,
    'pos_part': pos_part,
    'clamp_sym': clamp_sym,
    'min_alpha': min_alpha,
    'clamp_0_alpha': clamp_0_alpha,
    'clamp': clamp,
    'tent': tent,
    'phi_x': phi_x,
    'phi_x1x2': phi_x1x2,
    'sigma_x': sigma_x,
    'case2_sigma': case2_sigma,
    'case2_psi': case2_psi,
    'case3_psi': case3_psi,
    'scaled': scaled,
}


def make_named(kind, **params):
    """
    Build the named contraction ``kind`` with keyword parameters.

    Raises:
        InvalidParameterError: Unknown kind, missing/extra parameters or a
            parameter out of range.
    """
    try:
        builder = NAMED_CONTRACTIONS[kind]
    except KeyError:
        raise InvalidParameterError(f'Unknown contraction kind {kind!r}.')
    try:
        return builder(**params)
    except TypeError as e:
        raise InvalidParameterError(f'Bad parameters for {kind!r}: {e}')


def case3_psi_by_composition(x1, x2):
    """``phi_x1 ∘ (id ∧ x2)``, the compositional form of ``case3_psi``."""
    return compose(phi_x(x1), min_alpha_unchecked(x2))


def min_alpha_unchecked(alpha):
    """``x -> x ∧ alpha`` for any real alpha (not normal when alpha < 0)."""
    return PiecewiseLinear((float(alpha),), (1.0, 0.0), min(0.0, float(alpha)))
