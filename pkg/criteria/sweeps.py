"""
Randomized sweeps over every criterion.

Each check draws its samples from an independent stream
``rng_for(seed, check, i)``, stacks them and evaluates the whole batch at
once, so a report only depends on the seed and the configuration.
"""
import logging

import numpy as np

from common.exceptions import InvalidParameterError, UnknownCheckError
from common.utility import lab_setting, rng_for, sample_alpha, sample_values
from criteria.checks import (LEMMA_KINDS, bh_batch, bp_star_batch, cg_batch, compatibility_batch,
                             homogeneous_reduction_batch, lemma_chain_batch, pair_sum, slack_of,
                             transport_residuals)
from criteria.helper import (INCREASING_FAMILY, NORMAL_FAMILY, contraction_values,
                             describe_contraction, pos, resolve_family, sample_contraction,
                             tent_values)
from criteria.reports import Report
from criteria.residuals import Tolerance, classify_equalities, classify_inequalities
from functionals.energies import MixedDirichletEnergy, f_shift_many

logger = logging.getLogger(__name__)

HOMOGENEITY_CANDIDATES = (1.0, 2.0)
DN_DEPTHS = (0, 1, 2, 3)


def _finite_sum(*arrays):
    total = 0.0
    for a in arrays:
        a = np.abs(np.asarray(a, dtype=float))
        total = total + np.where(np.isfinite(a), a, 0.0)
    return total


def _record(i, draw):
    record = {'sample': int(i)}
    for key, value in draw.items():
        if isinstance(value, np.ndarray):
            record[key] = value.tolist()
        elif isinstance(value, tuple):
            record[key] = describe_contraction(*value)
        else:
            record[key] = value
    return record


class Sweep:
    """
    State shared by the checks of one ``fuzz_sweep`` call.

    Args:
        E (EnergyFunctional): Functional under test.
        report (Report): Report the summaries are folded into.
        kinds (list of str): Normal-contraction kinds to sample.
        increasing_kinds (list of str): Increasing-contraction kinds to sample.
        seed (int): Base seed.
        n_samples (int): Samples per check.
        negative_control (bool): Mark every summary as a negative control.
    """

    def __init__(self, E, report, kinds, increasing_kinds, seed, n_samples, negative_control):
        self.E = E
        self.report = report
        self.kinds = kinds
        self.increasing_kinds = increasing_kinds
        self.seed = seed
        self.n_samples = n_samples
        self.negative_control = negative_control
        self.n = len(E.space)

    @property
    def tolerance(self):
        return self.report.tolerance

    def draw(self, check, sampler):
        return [sampler(rng_for(self.seed, check, i)) for i in range(self.n_samples)]

    def values(self, rng):
        return sample_values(rng, self.n)

    def contraction(self, rng):
        return sample_contraction(rng, self.kinds)

    def increasing(self, rng):
        return sample_contraction(rng, self.increasing_kinds, INCREASING_FAMILY)

    def record(self, name, slack, code, draws, rows=None):
        rows = np.arange(len(draws)) if rows is None else np.asarray(rows)
        summary = self.report.check(name, negative_control=self.negative_control)
        summary.add_batch(slack, code, lambda j: _record(rows[j], draws[rows[j]]))

    def record_inequality(self, name, lhs, rhs, draws, rows=None):
        self.record(name, *classify_inequalities(lhs, rhs, self.tolerance), draws, rows)


def _stack(draws, key):
    return np.array([d[key] for d in draws], dtype=float)


def _column(draws, key):
    return np.array([d[key] for d in draws], dtype=float)[:, None]


def _apply(draws, key, G, catalogue=NORMAL_FAMILY):
    return contraction_values([d[key][0] for d in draws], [d[key][1] for d in draws], G, catalogue)


def _pair_draws(s, check, **extra):
    def sampler(rng):
        draw = {'f': s.values(rng), 'g': s.values(rng)}
        for key, sample in extra.items():
            draw[key] = sample(rng)
        return draw
    draws = s.draw(check, sampler)
    return draws, _stack(draws, 'f'), _stack(draws, 'g')


def _alpha(rng):
    return float(sample_alpha(rng))


# contraction criteria

def check_compatibility(s):
    draws, F, G = _pair_draws(s, 'compatibility', contraction=s.contraction)
    lhs, rhs = compatibility_batch(s.E, F, G, _apply(draws, 'contraction', G))
    s.record_inequality('compatibility', lhs, rhs, draws)


def check_cg(s):
    draws, U, V = _pair_draws(s, 'cg', alpha=_alpha)
    (l1, r1), (l2, r2) = cg_batch(s.E, U, V, _column(draws, 'alpha'))
    s.record_inequality('cg.lattice', l1, r1, draws)
    s.record_inequality('cg.palpha', l2, r2, draws)


def check_bp_star(s):
    draws, U, V = _pair_draws(s, 'bp_star', p=s.increasing)
    lhs, rhs = bp_star_batch(s.E, U, V, _apply(draws, 'p', U - V, INCREASING_FAMILY))
    s.record_inequality('bp_star', lhs, rhs, draws)


def check_bh(s):
    draws, F, G = _pair_draws(s, 'bh', alpha=_alpha)
    (l1, r1), (l2, r2) = bh_batch(s.E, F, G, _column(draws, 'alpha'))
    s.record_inequality('bh.veewedge', l1, r1, draws)
    s.record_inequality('bh.halpha', l2, r2, draws)


# the substitutions carry the slack of one criterion onto another

def _record_transport(s, name, a, b, draws):
    lhs_a, rhs_a = a
    lhs_b, rhs_b = b
    slack, code = transport_residuals(slack_of(lhs_a, rhs_a), slack_of(lhs_b, rhs_b),
                                      _finite_sum(lhs_a, rhs_a, lhs_b, rhs_b))
    s.record(name, slack, code, draws)


def check_transport(s):
    E = s.E
    draws, U, V = _pair_draws(s, 'transport.bp', p=s.increasing)
    F, G = (U + V) / 2.0, (U - V) / 2.0
    bp = bp_star_batch(E, U, V, _apply(draws, 'p', U - V, INCREASING_FAMILY))
    compat = compatibility_batch(E, F, G, G - _apply(draws, 'p', 2.0 * G, INCREASING_FAMILY))
    _record_transport(s, 'transport.bp', bp, compat, draws)

    draws, F, G = _pair_draws(s, 'transport.cg', alpha=_alpha)
    alpha = _column(draws, 'alpha')
    lattice, projected = cg_batch(E, F + G, F - G, alpha)
    _record_transport(s, 'transport.cg', lattice, compatibility_batch(E, F, -G, pos(-G)), draws)
    _record_transport(s, 'transport.cg', projected,
                      compatibility_batch(E, F, G, np.clip(G, -alpha / 2.0, alpha / 2.0)), draws)

    draws, F, G = _pair_draws(s, 'transport.bh', alpha=_alpha)
    alpha = _column(draws, 'alpha')
    veewedge, banded = bh_batch(E, F, G, alpha)
    mean, half = (F + G) / 2.0, (F - G) / 2.0
    _record_transport(s, 'transport.bh', veewedge,
                      compatibility_batch(E, mean, half, np.abs(half)), draws)
    _record_transport(s, 'transport.bh', banded,
                      compatibility_batch(E, mean, half, tent_values(half, alpha)), draws)


# f-shift

def check_shift(s):
    E = s.E
    tolerance = Tolerance(atol=lab_setting('SHIFT_ATOL'))
    if isinstance(E, MixedDirichletEnergy):
        draws, F, G = _pair_draws(s, 'shift.explicit')
        base = E.evaluate_many(F)
        rows = np.flatnonzero(np.isfinite(base))
        F, G = F[rows], G[rows]
        scale = _finite_sum(E.evaluate_many(F + G), E.evaluate_many(F - G), base[rows])
        slack, code = classify_equalities(f_shift_many(E, F, G), E.explicit_shift_many(F, G),
                                          tolerance, scale)
        s.record('shift.explicit', slack, code, draws, rows)

    draws = s.draw('shift.nested', lambda rng: {'f': s.values(rng), 'g': s.values(rng),
                                                'h': s.values(rng)})
    F, G, H = _stack(draws, 'f'), _stack(draws, 'g'), _stack(draws, 'h')
    centers = np.isfinite(E.evaluate_many(F)) & np.isfinite(pair_sum(E, F + G, F - G))
    rows = np.flatnonzero(centers)
    F, G, H = F[rows], G[rows], H[rows]
    nested = (f_shift_many(E, F, G + H) + f_shift_many(E, F, G - H)) / 2.0 - f_shift_many(E, F, G)
    averaged = (f_shift_many(E, F + G, H) + f_shift_many(E, F - G, H)) / 2.0
    scale = _finite_sum(*(E.evaluate_many(F + a * G + b * H) for a in (-1, 1) for b in (-1, 1)))
    slack, code = classify_equalities(nested, averaged, tolerance, scale)
    s.record('shift.nested', slack, code, draws, rows)


def homogeneity_degree(E):
    """A degree ``p >= 1`` for which ``E`` is positively homogeneous, or None."""
    candidates = []
    if isinstance(E, MixedDirichletEnergy):
        candidates = [e.function.p for e in E.edges if hasattr(e.function, 'p')]
    for p in [*candidates, *HOMOGENEITY_CANDIDATES]:
        if E.is_homogeneous(p):
            return float(p)
    return None


def check_homogeneous_reduction(s):
    E = s.E
    p = homogeneity_degree(E)
    if p is None:
        logger.debug('homogeneous_reduction skipped: functional is not homogeneous')
        return
    draws, F, G = _pair_draws(s, 'homogeneous_reduction', alpha=_alpha)
    alpha = _stack(draws, 'alpha')
    lhs, rhs, scale = homogeneous_reduction_batch(E, F, G, alpha, p)
    rows = np.flatnonzero(np.isfinite(E.evaluate_many(F)) & ~np.isnan(lhs) & ~np.isnan(rhs))
    tolerance = Tolerance(atol=lab_setting('SHIFT_ATOL'), rtol=lab_setting('HOMOGENEITY_RTOL'))
    slack, code = classify_equalities(lhs[rows], rhs[rows], tolerance, scale[rows])
    s.record('homogeneous_reduction', slack, code, draws, rows)


# consequences of convexity

def check_vacuity(s):
    draws, F, G = _pair_draws(s, 'vacuity')
    base = s.E.evaluate_many(F)
    rows = np.flatnonzero(np.isinf(base))
    rhs = pair_sum(s.E, F[rows] + G[rows], F[rows] - G[rows])
    s.record_inequality('vacuity', 2.0 * base[rows], rhs, draws, rows)


def check_convexity(s):
    draws, F, G = _pair_draws(s, 'convexity')
    s.record_inequality('convexity', 2.0 * s.E.evaluate_many((F + G) / 2.0),
                        pair_sum(s.E, F, G), draws)


def check_composition(s):
    draws, F, G = _pair_draws(s, 'composition', inner=s.contraction, outer=s.contraction)
    inner = _apply(draws, 'inner', G)
    composed = _apply(draws, 'outer', inner)
    s.record_inequality('composition.outer', *compatibility_batch(s.E, F, inner, composed), draws)
    s.record_inequality('composition.inner', *compatibility_batch(s.E, F, G, inner), draws)
    s.record_inequality('composition.composed', *compatibility_batch(s.E, F, G, composed), draws)


# lemma chains

def _case1_params(rng):
    r = lab_setting('VALUE_RANGE')
    return {'x': float(rng.uniform(-r, r))}


def _case2_params(rng):
    r = lab_setting('VALUE_RANGE')
    x1, x2 = np.sort(rng.uniform(0.0, r, size=2))
    if x1 == x2:
        x2 = x1 + 1.0
    if rng.random() < 0.5:
        x1, x2 = -x2, -x1
    return {'x1': float(x1), 'x2': float(x2)}


def _case3_params(rng):
    r = lab_setting('VALUE_RANGE')
    return {'x1': -r * (1.0 - rng.random()), 'x2': r * (1.0 - rng.random())}


def _dn_params(rng):
    return {'n': int(rng.choice(DN_DEPTHS))}


LEMMA_PARAMS = {
    'case1': _case1_params,
    'case2': _case2_params,
    'case3': _case3_params,
    'convexity_via_Dn': _dn_params,
}


def _lemma_check(kind):
    sample_params = LEMMA_PARAMS[kind]

    def check(s):
        draws, F, G = _pair_draws(s, kind, params=sample_params)
        names = list(draws[0]['params']) if draws else []
        if kind == 'convexity_via_Dn':
            depths = np.array([d['params']['n'] for d in draws])
            groups = [(np.flatnonzero(depths == n), {'n': n}) for n in np.unique(depths)]
        else:
            groups = [(np.arange(len(draws)),
                       {name: np.array([d['params'][name] for d in draws]) for name in names})]
        for rows, params in groups:
            for step, lhs, rhs in lemma_chain_batch(kind, s.E, F[rows], G[rows], params):
                s.record_inequality(f'{kind}.{step}', lhs, rhs, draws, rows)

    check.__name__ = f'check_{kind}'
    return check


CHECKS = {
    'compatibility': check_compatibility,
    'cg': check_cg,
    'bp_star': check_bp_star,
    'bh': check_bh,
    'transport': check_transport,
    'shift': check_shift,
    'homogeneous_reduction': check_homogeneous_reduction,
    'vacuity': check_vacuity,
    'convexity': check_convexity,
    'composition': check_composition,
    **{kind: _lemma_check(kind) for kind in LEMMA_KINDS},
}


def resolve_checks(checks):
    """Check names for ``None`` (all), a comma-separated string or a list."""
    if checks is None or checks == 'all':
        return list(CHECKS)
    if isinstance(checks, str):
        checks = [c.strip() for c in checks.split(',') if c.strip()]
    unknown = [c for c in checks if c not in CHECKS]
    if unknown:
        raise UnknownCheckError(f'Unknown checks: {", ".join(unknown)}; '
                                f'expected some of {", ".join(CHECKS)}.')
    return list(checks)


def _increasing_kinds(kinds):
    shared = [k for k in kinds if k in INCREASING_FAMILY]
    return shared or list(INCREASING_FAMILY)


def fuzz_sweep(E, family=None, seed=0, n_samples=1000, tolerance=None, checks=None,
               negative_control=False):
    """
    Randomized verification of every enabled check on ``E``.

    Args:
        E (EnergyFunctional): Functional under test.
        family (str or list, optional): Contraction kinds to draw (see
            ``resolve_family``); the increasing maps are the members of the
            family that are increasing, or the whole increasing catalogue.
        seed (int): Base seed; the report is a function of it.
        n_samples (int): Samples per check; 0 gives an empty report.
        tolerance (Tolerance or float, optional): Inequality tolerance.
        checks (str or list, optional): Subset of ``CHECKS``.
        negative_control (bool): The run is expected to find violations.

    Returns:
        Report
    """
    n_samples = int(n_samples)
    if n_samples < 0:
        raise InvalidParameterError(f'n_samples must be >= 0, got {n_samples}.')
    names = resolve_checks(checks)
    kinds = resolve_family(family)
    report = Report(seed=seed, tolerance=tolerance,
                    instances=[{'functional': E.type, 'points': len(E.space), 'convex': E.convex}])
    if n_samples == 0:
        return report
    sweep = Sweep(E, report, kinds, _increasing_kinds(kinds), seed, n_samples, negative_control)
    for name in names:
        logger.debug('running %s on %d samples', name, n_samples)
        CHECKS[name](sweep)
    logger.info('sweep seed=%s samples=%d: %d violations, min slack %s', seed, n_samples,
                report.violation_count, report.min_slack)
    return report
