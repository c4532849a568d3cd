"""
Closed forms of the named contractions and of the pairing maps, vectorized
over numpy arrays with per-row parameters, plus the samplers that draw
contractions for the sweeps.

The exact ``PiecewiseLinear`` constructors live in ``contractions.named``;
the forms here are what the batch checks evaluate, and the identity checks
hold the two against each other.
"""
import numpy as np

from common.exceptions import InvalidParameterError
from common.utility import lab_setting, sample_alpha
from contractions.helper import random_increasing_normal, random_normal_contraction


def pos(x):
    return np.maximum(x, 0.0)


def neg(x):
    """``x_- = (-x)_+``."""
    return np.maximum(-x, 0.0)


def tent_values(t, alpha):
    """``C_alpha(t) = (-alpha - t) ∨ t ∧ (alpha - t)``."""
    return np.maximum(-alpha - t, np.minimum(t, alpha - t))


def phi_values(t, x):
    """``phi_x``: ``t - 2(t - x)_+`` for ``x >= 0``, ``-t - 2(x - t)_+`` for ``x < 0``."""
    return np.where(x >= 0, t - 2.0 * pos(t - x), -t - 2.0 * pos(x - t))


def phi2_values(t, x1, x2):
    """``phi_{x1,x2}``: slopes 1, -1, 1 with sign changes at ``x1 < x2``, zero at 0."""
    return t - 2.0 * (pos(t - x1) - pos(-x1)) + 2.0 * (pos(t - x2) - pos(-x2))


def sigma_values(t, x):
    """``sigma_x(t) = phi_x(t_+)``, ``x >= 0``."""
    return phi_values(pos(t), x)


def case2_sigma_values(t, x1, x2):
    return np.maximum(np.minimum(0.0, x1 - t), t + x1 - 2.0 * x2)


def case2_psi_values(t, x1, x2):
    return phi2_values(pos(t), x1, x2)


def case3_psi_values(t, x1, x2):
    return np.minimum(t - 2.0 * x1, -np.minimum(t, x2))


def cg_p1(u, v, alpha):
    """``P^1_{2,alpha}(u, v) = v + [(u - v + alpha)_+ - (u - v - alpha)_-] / 2``."""
    return v + (pos(u - v + alpha) - neg(u - v - alpha)) / 2.0


def cg_p2(u, v, alpha):
    """``P^2_{2,alpha}(u, v) = u - [(u - v + alpha)_+ - (u - v - alpha)_-] / 2``."""
    return u - (pos(u - v + alpha) - neg(u - v - alpha)) / 2.0


def h_alpha(f, g, alpha):
    """``H_alpha(f, g) = (g - alpha) ∨ f ∧ (g + alpha)``."""
    return np.maximum(g - alpha, np.minimum(f, g + alpha))


def _value_range():
    return lab_setting('VALUE_RANGE')


def _ordered_pair(rng, lo, hi):
    x1, x2 = np.sort(rng.uniform(lo, hi, size=2))
    if x1 == x2:
        x2 = x1 + 1.0
    return float(x1), float(x2)


# kind -> (parameter sampler, closed form)
NORMAL_FAMILY = {
    'identity': (lambda rng: {}, lambda t: t),
    'negation': (lambda rng: {}, lambda t: -t),
    'zero': (lambda rng: {}, np.zeros_like),
    'abs': (lambda rng: {}, np.abs),
    'pos_part': (lambda rng: {}, pos),
    'clamp_sym': (lambda rng: {'alpha': float(sample_alpha(rng))},
                  lambda t, alpha: np.clip(t, -alpha, alpha)),
    'min_alpha': (lambda rng: {'alpha': float(sample_alpha(rng))},
                  lambda t, alpha: np.minimum(t, alpha)),
    'clamp_0_alpha': (lambda rng: {'alpha': float(sample_alpha(rng))},
                      lambda t, alpha: np.clip(t, 0.0, alpha)),
    'clamp': (lambda rng: {'a': -float(sample_alpha(rng)), 'b': float(sample_alpha(rng))},
              lambda t, a, b: np.clip(t, a, b)),
    'tent': (lambda rng: {'alpha': float(sample_alpha(rng))}, tent_values),
    'phi_x': (lambda rng: {'x': float(rng.uniform(-_value_range(), _value_range()))}, phi_values),
    'phi_x1x2': (lambda rng: dict(zip(('x1', 'x2'),
                                      _ordered_pair(rng, -_value_range(), _value_range()))),
                 phi2_values),
    'scaled': (lambda rng: {'factor': float(rng.uniform(-1.0, 1.0))}, lambda t, factor: factor * t),
    'random': (lambda rng: {'pwl': random_normal_contraction(rng)}, None),
}

# increasing normal contractions p for the Bénilan-Picard inequality
INCREASING_FAMILY = {
    'identity': NORMAL_FAMILY['identity'],
    'zero': NORMAL_FAMILY['zero'],
    'pos_part': NORMAL_FAMILY['pos_part'],
    'clamp_sym': NORMAL_FAMILY['clamp_sym'],
    'min_alpha': NORMAL_FAMILY['min_alpha'],
    'clamp_0_alpha': NORMAL_FAMILY['clamp_0_alpha'],
    'clamp': NORMAL_FAMILY['clamp'],
    'scaled': (lambda rng: {'factor': float(rng.uniform(0.0, 1.0))}, lambda t, factor: factor * t),
    'random': (lambda rng: {'pwl': random_increasing_normal(rng)}, None),
}


def resolve_family(family, catalogue=None):
    """
    List of kinds for a family spec: ``None``/``'all'`` for the whole
    catalogue, ``'named'`` for everything but the random maps, or an explicit
    list of kinds.
    """
    catalogue = NORMAL_FAMILY if catalogue is None else catalogue
    if family in (None, 'all'):
        return list(catalogue)
    if family == 'named':
        return [k for k in catalogue if k != 'random']
    if isinstance(family, str):
        family = [k.strip() for k in family.split(',') if k.strip()]
    unknown = [k for k in family if k not in catalogue]
    if unknown or not family:
        raise InvalidParameterError(f'Unknown contraction kinds in family: {unknown or family}.')
    return list(family)


def sample_contraction(rng, kinds, catalogue=None):
    """Draw ``(kind, params)`` uniformly over ``kinds``."""
    catalogue = NORMAL_FAMILY if catalogue is None else catalogue
    kind = kinds[int(rng.integers(len(kinds)))]
    return kind, catalogue[kind][0](rng)


def contraction_values(kinds, params, G, catalogue=None):
    """
    Apply the per-row contraction ``(kinds[i], params[i])`` to row ``G[i]``.
    """
    catalogue = NORMAL_FAMILY if catalogue is None else catalogue
    G = np.asarray(G, dtype=float)
    out = np.empty_like(G)
    kinds = np.asarray(kinds)
    for kind in np.unique(kinds):
        rows = np.flatnonzero(kinds == kind)
        closed_form = catalogue[kind][1]
        if closed_form is None:
            for r in rows:
                out[r] = params[r]['pwl'].eval(G[r])
            continue
        names = list(params[rows[0]])
        columns = {name: np.array([params[r][name] for r in rows])[:, None] for name in names}
        out[rows] = closed_form(G[rows], **columns)
    return out


def describe_contraction(kind, params):
    """JSON record from which ``make_named`` (or the raw form) rebuilds the map."""
    if 'pwl' in params:
        return params['pwl'].to_dict()
    return {'kind': kind, 'params': dict(params)}
