"""
Pointwise identities behind the substitutions between the criteria.

``identity_check(kind, inputs)`` evaluates both sides of every identity of
``kind`` on the supplied points and returns the largest absolute deviation;
anything at rounding level (``IDENTITY_ATOL``) certifies the identity.
"""
import numpy as np

from common.exceptions import InvalidParameterError, UnknownCheckError
from common.measure import Fn
from contractions import named
from contractions.helper import bp_from_contraction, contraction_from_bp
from contractions.piecewise import compose
from criteria.helper import (case2_psi_values, case2_sigma_values, case3_psi_values, cg_p1,
                             cg_p2, h_alpha, phi2_values, phi_values, pos, sigma_values)


def _array(x):
    if isinstance(x, Fn):
        return x.values
    return np.asarray(x, dtype=float)


def _pair(inputs):
    try:
        f, g = _array(inputs['f']), _array(inputs['g'])
    except KeyError:
        raise InvalidParameterError('This identity needs functions "f" and "g".')
    if f.shape != g.shape:
        raise InvalidParameterError('"f" and "g" must have the same shape.')
    return f, g


def _grid(inputs):
    t = inputs.get('t', inputs.get('grid'))
    if t is None:
        raise InvalidParameterError('This identity needs evaluation points "t".')
    return _array(t)


def _positive(inputs, name, default):
    value = float(inputs.get(name, default))
    if not value > 0:
        raise InvalidParameterError(f'{name} must be > 0, got {value!r}.')
    return value


def _deviation(*pairs):
    return max((float(np.max(np.abs(a - b), initial=0.0)) for a, b in pairs), default=0.0)


def cg_median(inputs):
    f, g = _pair(inputs)
    u, v = f + g, f - g
    return _deviation(((u + np.minimum(u, v)) / 2.0, f - pos(-g)),
                      ((v + np.maximum(u, v)) / 2.0, f + pos(-g)))


def cg_palpha(inputs):
    f, g = _pair(inputs)
    alpha = _positive(inputs, 'alpha', 1.0)
    cg = named.clamp_sym(alpha).eval(g)
    return _deviation((cg_p1(f + g, f - g, 2.0 * alpha), f + cg),
                      (cg_p2(f + g, f - g, 2.0 * alpha), f - cg))


def bp_subst(inputs):
    f, g = _pair(inputs)
    C = inputs.get('contraction') or named.tent(1.0)
    p = bp_from_contraction(C)
    u, v = f + g, f - g
    pd = p.eval(u - v)
    cg = C.eval(g)
    return _deviation((pd, g - cg), (u - pd, f + cg), (v + pd, f - cg),
                      (contraction_from_bp(p).eval(g), cg))


def bh_veewedge(inputs):
    f, g = _pair(inputs)
    mean, half = (f + g) / 2.0, np.abs((f - g) / 2.0)
    return _deviation((np.maximum(f, g), mean + half), (np.minimum(f, g), mean - half))


def bh_halpha(inputs):
    f, g = _pair(inputs)
    alpha = float(inputs.get('alpha', 1.0))
    if alpha < 0:
        raise InvalidParameterError(f'alpha must be >= 0, got {alpha!r}.')
    mean = (f + g) / 2.0
    cd = named.tent(alpha).eval((f - g) / 2.0)
    return _deviation((h_alpha(f, g, alpha), mean + cd), (h_alpha(g, f, alpha), mean - cd))


def reflection_mean(inputs):
    f, g = _pair(inputs)
    alpha = _positive(inputs, 'alpha', 1.0)
    # the lattice map (f ∧ g, f ∨ g) in its mean-and-spread form
    mean, half = (f + g) / 2.0, np.abs(f - g) / 2.0
    step = pos(f - g) / 2.0
    return _deviation(
        ((f + np.minimum(f, g)) / 2.0, f - step),
        ((g + np.maximum(f, g)) / 2.0, g + step),
        ((f + mean - half) / 2.0, f - step),
        ((g + mean + half) / 2.0, g + step),
        (cg_p1(f, g, alpha), (f + h_alpha(f, g, alpha)) / 2.0),
        (cg_p2(f, g, alpha), (g + h_alpha(g, f, alpha)) / 2.0),
    )


def case1_ids(inputs):
    t = _grid(inputs)
    x = float(inputs.get('x', 1.0))
    mirror = (named.phi_x(x).eval(t), named.phi_x(-x).eval(-t))
    if x < 0:
        x, t = -x, -t
    phi = named.phi_x(x).eval(t)
    sigma = named.sigma_x(x).eval(t)
    tp = pos(t)
    return _deviation(
        mirror,
        (phi + tp, sigma + t),
        (tp - phi, np.abs(sigma - t)),
        (sigma, named.tent(2.0 * x).eval(tp)),
        (phi, phi_values(t, x)),
        (sigma, sigma_values(t, x)),
    )


def case2_ids(inputs):
    t = _grid(inputs)
    x1, x2 = float(inputs.get('x1', 0.5)), float(inputs.get('x2', 1.5))
    if not x1 < x2 or (x1 < 0 < x2):
        raise InvalidParameterError('case2 needs 0 <= x1 < x2 or x1 < x2 <= 0.')
    mirror = (named.phi_x1x2(x1, x2).eval(t), -named.phi_x1x2(-x2, -x1).eval(-t))
    if x2 <= 0:
        x1, x2, t = -x2, -x1, -t
    sigma = named.case2_sigma(x1, x2).eval(t)
    psi = named.case2_psi(x1, x2).eval(t)
    phi = named.phi_x1x2(x1, x2).eval(t)
    tp = pos(t)
    shifted = pos(t - x1)
    return _deviation(
        mirror,
        (named.tent(2.0 * x1).eval(tp - sigma), psi - shifted),
        (named.tent(2.0 * (x2 - x1)).eval(shifted), -sigma),
        (np.abs(psi - t), tp - phi),
        (psi + shifted, tp + sigma),
        (sigma, case2_sigma_values(t, x1, x2)),
        (psi, case2_psi_values(t, x1, x2)),
        (phi, phi2_values(t, x1, x2)),
    )


def case3_ids(inputs):
    t = _grid(inputs)
    x1, x2 = float(inputs.get('x1', -1.0)), float(inputs.get('x2', 2.0))
    if not x1 < 0 < x2:
        raise InvalidParameterError('case3 needs x1 < 0 < x2.')
    psi = named.case3_psi(x1, x2).eval(t)
    phi = named.phi_x1x2(x1, x2).eval(t)
    capped = np.minimum(t, x2)
    return _deviation(
        (psi, named.case3_psi_by_composition(x1, x2).eval(t)),
        (named.phi_x(2.0 * x2).eval(t - psi), capped - phi),
        (phi + capped, t + psi),
        (psi, case3_psi_values(t, x1, x2)),
        (phi, phi2_values(t, x1, x2)),
    )


def cg_compositions(inputs):
    t = _grid(inputs)
    alpha = _positive(inputs, 'alpha', 1.0)
    neg = named.negation()
    positive_part = compose(neg, compose(named.min_alpha(0.0), neg))
    symmetric = compose(named.min_alpha(alpha),
                        compose(neg, compose(named.min_alpha(alpha), neg)))
    band = compose(named.pos_part(), named.clamp_sym(alpha))
    return _deviation(
        (positive_part.eval(t), named.pos_part().eval(t)),
        (symmetric.eval(t), named.clamp_sym(alpha).eval(t)),
        (band.eval(t), named.clamp_0_alpha(alpha).eval(t)),
    )


IDENTITY_KINDS = {
    'cg_median': cg_median,
    'cg_palpha': cg_palpha,
    'bp_subst': bp_subst,
    'bh_veewedge': bh_veewedge,
    'bh_halpha': bh_halpha,
    'reflection_mean': reflection_mean,
    'case1_ids': case1_ids,
    'case2_ids': case2_ids,
    'case3_ids': case3_ids,
    'cg_compositions': cg_compositions,
}

GRID_KINDS = ('case1_ids', 'case2_ids', 'case3_ids', 'cg_compositions')


def identity_check(kind, inputs):
    """
    Largest absolute deviation between the two sides of the identities of ``kind``.

    Args:
        kind (str): One of ``IDENTITY_KINDS``.
        inputs (dict): ``f``/``g`` (arrays or ``Fn``) for the pairing
            identities, evaluation points ``t`` for the lemma identities, and
            the parameters ``alpha``, ``x``, ``x1``, ``x2`` or ``contraction``
            where the kind uses them.

    Raises:
        UnknownCheckError: If ``kind`` is not known.
    """
    try:
        check = IDENTITY_KINDS[kind]
    except KeyError:
        raise UnknownCheckError(f'Unknown identity kind {kind!r}.')
    return check(inputs)
