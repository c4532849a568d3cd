"""
Residuals of the contraction-type inequalities.

Each check comes in two shapes: a ``*_batch`` function working on stacks of
value vectors (rows are independent samples, returning ``(lhs, rhs)``
arrays) and a single-sample function taking ``Fn`` arguments and returning a
``Residual``.  The sweeps use the former.
"""
import logging

import numpy as np

from common.exceptions import (DomainMismatchError, InvalidParameterError, NotHomogeneousError,
                               UnknownCheckError)
from common.measure import check_same_space
from common.utility import lab_setting
from contractions.helper import Dn_factors, require_increasing_normal, require_normal
from criteria.helper import (case2_psi_values, case2_sigma_values, case3_psi_values, cg_p1,
                             cg_p2, h_alpha, phi2_values, phi_values, pos, sigma_values,
                             tent_values)
from criteria.reports import Report
from criteria.residuals import Residual, Tolerance, classify_equalities
from functionals.energies import f_shift, f_shift_many

logger = logging.getLogger(__name__)

LEMMA_KINDS = ('case1', 'case2', 'case3', 'convexity_via_Dn')


def _on_space(E, *functions):
    check_same_space(*functions)
    if functions[0].space != E.space:
        raise DomainMismatchError('Functions do not live on the functional\'s space.')
    return [f.values[None, :] for f in functions]


def pair_sum(E, A, B):
    """``E(A) + E(B)`` row by row."""
    return E.evaluate_many(A) + E.evaluate_many(B)


def _single(lhs, rhs, tolerance, name):
    return Residual(lhs[0], rhs[0], tolerance, name=name)


# compatibility

def compatibility_batch(E, F, G, CG):
    """``E(f + Cg) + E(f - Cg) <= E(f + g) + E(f - g)`` with ``Cg`` given row by row."""
    return pair_sum(E, F + CG, F - CG), pair_sum(E, F + G, F - G)


def compatibility_residual(E, C, f, g, tolerance=None):
    """
    Residual of ``E(f + Cg) + E(f - Cg) <= E(f + g) + E(f - g)``.

    Raises:
        NotNormalContractionError: If ``C`` is not a normal contraction.
    """
    require_normal(C, 'C')
    F, G = _on_space(E, f, g)
    lhs, rhs = compatibility_batch(E, F, G, C.eval(G))
    return _single(lhs, rhs, tolerance, 'compatibility')


# Cipriani-Grillo pair

def cg_batch(E, U, V, alpha):
    """Both inequalities of the Cipriani-Grillo definition; ``alpha`` is per row or scalar."""
    alpha = np.reshape(alpha, (-1, 1)) if np.ndim(alpha) else alpha
    rhs = pair_sum(E, U, V)
    lattice = pair_sum(E, (U + np.minimum(U, V)) / 2.0, (V + np.maximum(U, V)) / 2.0)
    projected = pair_sum(E, cg_p1(U, V, alpha), cg_p2(U, V, alpha))
    return (lattice, rhs), (projected, rhs)


def cg_residuals(E, u, v, alpha, tolerance=None):
    """
    ``E((u + u∧v)/2) + E((v + u∨v)/2) <= E(u) + E(v)`` and
    ``E(P^1_{2,alpha}(u,v)) + E(P^2_{2,alpha}(u,v)) <= E(u) + E(v)``.

    Raises:
        InvalidParameterError: If ``alpha <= 0``.
    """
    if not alpha > 0:
        raise InvalidParameterError(f'alpha must be > 0, got {alpha!r}.')
    U, V = _on_space(E, u, v)
    (l1, r1), (l2, r2) = cg_batch(E, U, V, float(alpha))
    return _single(l1, r1, tolerance, 'cg.lattice'), _single(l2, r2, tolerance, 'cg.palpha')


# Bénilan-Picard

def bp_star_batch(E, U, V, PD):
    """``E(u - p(u-v)) + E(v + p(u-v)) <= E(u) + E(v)`` with ``p(u - v)`` given row by row."""
    return pair_sum(E, U - PD, V + PD), pair_sum(E, U, V)


def bp_star_residual(E, p, u, v, tolerance=None):
    """
    Residual of the Bénilan-Picard inequality for the increasing normal contraction ``p``.

    Raises:
        NotIncreasingContractionError: If ``p`` is not an increasing normal contraction.
    """
    require_increasing_normal(p)
    U, V = _on_space(E, u, v)
    lhs, rhs = bp_star_batch(E, U, V, p.eval(U - V))
    return _single(lhs, rhs, tolerance, 'bp_star')


# Brigati-Hartarsky

def bh_batch(E, F, G, alpha):
    alpha = np.reshape(alpha, (-1, 1)) if np.ndim(alpha) else alpha
    rhs = pair_sum(E, F, G)
    lattice = pair_sum(E, np.maximum(F, G), np.minimum(F, G))
    banded = pair_sum(E, h_alpha(F, G, alpha), h_alpha(G, F, alpha))
    return (lattice, rhs), (banded, rhs)


def bh_residuals(E, f, g, alpha, tolerance=None):
    """
    ``E(f∨g) + E(f∧g) <= E(f) + E(g)`` and
    ``E(H_alpha(f,g)) + E(H_alpha(g,f)) <= E(f) + E(g)``.
    """
    if not alpha >= 0:
        raise InvalidParameterError(f'alpha must be >= 0, got {alpha!r}.')
    F, G = _on_space(E, f, g)
    (l1, r1), (l2, r2) = bh_batch(E, F, G, float(alpha))
    return _single(l1, r1, tolerance, 'bh.veewedge'), _single(l2, r2, tolerance, 'bh.halpha')


# f-shift scaling

def homogeneous_reduction_batch(E, F, G, alpha, p):
    """
    ``E_f(0 ∨ g ∧ alpha)`` against ``alpha^p E_{f/alpha}(0 ∨ g/alpha ∧ 1)``.

    Returns:
        tuple: ``(lhs, rhs, scale)`` where ``scale`` bounds the size of the
        terms that cancel inside the shifts.
    """
    alpha = np.reshape(alpha, (-1, 1)) if np.ndim(alpha) else alpha
    clamped = np.clip(G, 0.0, alpha)
    lhs = f_shift_many(E, F, clamped)
    rhs = np.reshape(alpha, -1) ** p * f_shift_many(E, F / alpha, np.clip(G / alpha, 0.0, 1.0))
    with np.errstate(invalid='ignore'):
        scale = np.abs(E.evaluate_many(F + clamped)) + np.abs(E.evaluate_many(F - clamped)) \
            + np.abs(E.evaluate_many(F))
    return lhs, rhs, np.where(np.isfinite(scale), scale, 0.0)


def homogeneous_reduction_check(E, f, g, alpha, p, tolerance=None):
    """
    Equality residual of ``E_f(0∨g∧alpha) = alpha^p E_{f/alpha}(0 ∨ g/alpha ∧ 1)``.

    Raises:
        NotHomogeneousError: If ``E`` is not positively ``p``-homogeneous.
        ImproperCenterError: If ``E(f) = ∞``.
    """
    if not alpha > 0:
        raise InvalidParameterError(f'alpha must be > 0, got {alpha!r}.')
    if not p >= 1:
        raise InvalidParameterError(f'p must be >= 1, got {p!r}.')
    if not E.is_homogeneous(p):
        raise NotHomogeneousError(f'The functional is not positively {p}-homogeneous.')
    f_shift(E, f)
    F, G = _on_space(E, f, g)
    lhs, rhs, scale = homogeneous_reduction_batch(E, F, G, float(alpha), float(p))
    tolerance = tolerance or Tolerance(rtol=lab_setting('HOMOGENEITY_RTOL'))
    return Residual(lhs[0], rhs[0], tolerance, name='homogeneous_reduction', equality=True,
                    scale=scale[0])


# composition and limits

def composition_chain(E, C1, C2, f, g, tolerance=None):
    """
    The two-step chain for ``C1 ∘ C2``::

        E(f + C1 C2 g) + E(f - C1 C2 g) <= E(f + C2 g) + E(f - C2 g)
                                        <= E(f + g) + E(f - g)

    Returns:
        tuple: residuals of the outer step, the inner step and the composed
        inequality.
    """
    require_normal(C1, 'C1')
    require_normal(C2, 'C2')
    F, G = _on_space(E, f, g)
    inner = C2.eval(G)
    composed = C1.eval(inner)
    outer_res = compatibility_batch(E, F, inner, composed)
    inner_res = compatibility_batch(E, F, G, inner)
    composed_res = compatibility_batch(E, F, G, composed)
    return (_single(*outer_res, tolerance, 'composition.outer'),
            _single(*inner_res, tolerance, 'composition.inner'),
            _single(*composed_res, tolerance, 'composition.composed'))


def pointwise_limit_check(E, approximants, limit, f, g, tolerance=None):
    """
    Compatibility along an approximating sequence and for its pointwise limit.

    Records one residual per approximant, the lower-semicontinuity step
    ``E(f + Cg) + E(f - Cg) <= liminf E(f + C_n g) + E(f - C_n g)`` (the last
    approximant stands in for the limit inferior) and the limit's own
    compatibility residual.

    Returns:
        Report: residuals named ``limit.approximant_<k>``, ``limit.lsc`` and
        ``limit.compatibility``.
    """
    if not approximants:
        raise InvalidParameterError('Need at least one approximant.')
    require_normal(limit, 'limit')
    F, G = _on_space(E, f, g)
    report = Report(tolerance=tolerance)
    tolerance = report.tolerance
    approximant_sums = []
    rhs = pair_sum(E, F + G, F - G)
    for k, C in enumerate(approximants):
        require_normal(C, f'approximant {k}')
        CG = C.eval(G)
        approximant_sums.append(pair_sum(E, F + CG, F - CG))
        report.add(f'limit.approximant_{k}', _single(approximant_sums[-1], rhs, tolerance, None))
    CG = limit.eval(G)
    limit_sum = pair_sum(E, F + CG, F - CG)
    report.add('limit.lsc', _single(limit_sum, approximant_sums[-1], tolerance, None))
    report.add('limit.compatibility', _single(limit_sum, rhs, tolerance, None))
    return report


# lemma chains

def _chain_case1(E, F, G, x):
    """Inequalities of the one-sign-change lemma for ``x >= 0`` (per row)."""
    ph = phi_values(G, x)
    sg = sigma_values(G, x)
    gp = pos(G)
    ag = np.abs(G)
    EF = E.evaluate_many
    target_rhs = pair_sum(E, F + G, F - G)
    return [
        ('abs_plus', pair_sum(E, F + ph, F + gp), pair_sum(E, F + G, F + sg)),
        ('abs_minus', pair_sum(E, F - ph, F - gp), pair_sum(E, F - G, F - sg)),
        ('tent', pair_sum(E, F + sg, F - sg), pair_sum(E, F + gp, F - gp)),
        ('abs', pair_sum(E, F + ag, F - ag), target_rhs),
        ('convexity_plus', EF(F + gp), (EF(F + G) + EF(F + ag)) / 2.0),
        ('convexity_minus', EF(F - gp), (EF(F - G) + EF(F - ag)) / 2.0),
        ('finiteness', pair_sum(E, F + gp, F - gp), target_rhs),
        ('target', pair_sum(E, F + ph, F - ph), target_rhs),
    ]


def _chain_case2(E, F, G, x1, x2):
    """Inequalities of the two-sign-change lemma for ``0 <= x1 < x2`` (per row)."""
    sg = case2_sigma_values(G, x1, x2)
    ps = case2_psi_values(G, x1, x2)
    ph = phi2_values(G, x1, x2)
    gp = pos(G)
    tg = pos(G - x1)
    phi_gp = phi_values(gp, x1)
    EF = E.evaluate_many
    target_rhs = pair_sum(E, F + G, F - G)
    return [
        ('tent_plus', pair_sum(E, F + ps, F + tg), pair_sum(E, F + gp, F + sg)),
        ('tent_minus', pair_sum(E, F - ps, F - tg), pair_sum(E, F - gp, F - sg)),
        ('tent_sigma', pair_sum(E, F - sg, F + sg), pair_sum(E, F + tg, F - tg)),
        ('abs_plus', pair_sum(E, F + gp, F + ph), pair_sum(E, F + ps, F + G)),
        ('abs_minus', pair_sum(E, F - gp, F - ph), pair_sum(E, F - ps, F - G)),
        ('finiteness_pos', pair_sum(E, F + gp, F - gp), target_rhs),
        ('convexity_plus', EF(F + tg), (EF(F + gp) + EF(F - phi_gp)) / 2.0),
        ('convexity_minus', EF(F - tg), (EF(F - gp) + EF(F + phi_gp)) / 2.0),
        ('finiteness_shifted', pair_sum(E, F + tg, F - tg), target_rhs),
        ('target', pair_sum(E, F + ph, F - ph), target_rhs),
    ]


def _chain_case3(E, F, G, x1, x2):
    """Inequalities of the straddling lemma for ``x1 < 0 < x2`` (per row)."""
    ps = case3_psi_values(G, x1, x2)
    ph = phi2_values(G, x1, x2)
    mg = np.minimum(G, x2)
    phx2 = phi_values(G, x2)
    EF = E.evaluate_many
    target_rhs = pair_sum(E, F + G, F - G)
    return [
        ('phi_x1', pair_sum(E, F + ps, F - ps), pair_sum(E, F + mg, F - mg)),
        ('phi_plus', pair_sum(E, F + ph, F + mg), pair_sum(E, F + G, F + ps)),
        ('phi_minus', pair_sum(E, F - ph, F - mg), pair_sum(E, F - G, F - ps)),
        ('phi_x2', pair_sum(E, F + phx2, F - phx2), target_rhs),
        ('convexity_plus', EF(F + mg), (EF(F + G) + EF(F + phx2)) / 2.0),
        ('convexity_minus', EF(F - mg), (EF(F - G) + EF(F - phx2)) / 2.0),
        ('finiteness', pair_sum(E, F + mg, F - mg), target_rhs),
        ('target', pair_sum(E, F + ph, F - ph), target_rhs),
    ]


def _chain_dn(E, F, G, n):
    """Tent-by-tent chain from compatibility with ``C_alpha`` to midpoint convexity."""
    mid = (F + G) / 2.0
    h = (F - G) / 2.0
    out = []
    rhs_first = pair_sum(E, F, G)
    previous = rhs_first
    for k, alpha in enumerate(Dn_factors(n)):
        h = tent_values(h, alpha)
        current = pair_sum(E, mid + h, mid - h)
        out.append((f'tent_{k}', current, previous))
        previous = current
    out.append(('Dn', previous, rhs_first))
    bound = 3.0 ** -n
    spread = np.max(np.abs(F - G) / 2.0, axis=1)
    in_range = spread <= 3.0 ** (n + 1)
    out.append(('Dn_range', np.where(in_range, np.max(np.abs(h), axis=1), 0.0),
                np.where(in_range, bound, np.inf)))
    out.append(('midpoint', 2.0 * E.evaluate_many(mid), rhs_first))
    return out


def lemma_chain_batch(kind, E, F, G, params):
    """
    Named ``(step, lhs, rhs)`` triples of a lemma chain for stacks ``F``, ``G``.

    ``params`` holds per-row (or scalar) parameters: ``x`` for ``case1``,
    ``x1``/``x2`` for ``case2`` and ``case3``, ``n`` for ``convexity_via_Dn``.
    Negative parameters of the first two cases are handled by mirroring:
    the chain for ``(f, g, x)`` is the positive chain for ``(f, -g, -x)``.
    """
    if kind == 'case1':
        x = _column(params.get('x', 1.0))
        mirrored = x < 0
        G = np.where(mirrored, -G, G)
        return _chain_case1(E, F, G, np.abs(x))
    if kind == 'case2':
        x1 = _column(params.get('x1', 0.5))
        x2 = _column(params.get('x2', 1.5))
        if np.any(x1 >= x2):
            raise InvalidParameterError('case2 needs x1 < x2.')
        mirrored = x2 <= 0
        if np.any(~mirrored & (x1 < 0)):
            raise InvalidParameterError('case2 needs 0 <= x1 < x2 or x1 < x2 <= 0.')
        G = np.where(mirrored, -G, G)
        x1, x2 = np.where(mirrored, -x2, x1), np.where(mirrored, -x1, x2)
        return _chain_case2(E, F, G, x1, x2)
    if kind == 'case3':
        x1 = _column(params.get('x1', -1.0))
        x2 = _column(params.get('x2', 1.0))
        if np.any(~((x1 < 0) & (0 < x2))):
            raise InvalidParameterError('case3 needs x1 < 0 < x2.')
        return _chain_case3(E, F, G, x1, x2)
    if kind == 'convexity_via_Dn':
        n = int(params.get('n', 3))
        if n < 0:
            raise InvalidParameterError(f'n must be >= 0, got {n}.')
        return _chain_dn(E, F, G, n)
    raise UnknownCheckError(f'Unknown lemma chain {kind!r}; expected one of {", ".join(LEMMA_KINDS)}.')


def _column(value):
    return np.reshape(np.asarray(value, dtype=float), (-1, 1))


def lemma_chain_check(kind, E, f, g, params=None, tolerance=None):
    """
    Every inequality of one lemma chain, its finiteness side conditions and
    the final target inequality, as a ``Report`` of named residuals.

    Raises:
        UnknownCheckError: If ``kind`` is not a lemma chain.
    """
    if kind not in LEMMA_KINDS:
        raise UnknownCheckError(f'Unknown lemma chain {kind!r}; expected one of {", ".join(LEMMA_KINDS)}.')
    F, G = _on_space(E, f, g)
    report = Report(tolerance=tolerance, instances=[{'lemma': kind, 'params': dict(params or {})}])
    for step, lhs, rhs in lemma_chain_batch(kind, E, F, G, params or {}):
        report.add(f'{kind}.{step}', _single(lhs, rhs, report.tolerance, None))
    logger.debug('%s chain: %d residuals, %d violations', kind, len(report.checks),
                 report.violation_count)
    return report


# transport

def transport_residuals(slack_a, slack_b, scale, tolerance=None):
    """Equality of two slack arrays that the substitution identities say coincide."""
    tolerance = tolerance or Tolerance(atol=lab_setting('SHIFT_ATOL'))
    both_vacuous = np.isinf(slack_a) & np.isinf(slack_b) & (slack_a > 0) & (slack_b > 0)
    a = np.where(both_vacuous, np.inf, slack_a)
    b = np.where(both_vacuous, np.inf, slack_b)
    return classify_equalities(a, b, tolerance, scale)


def slack_of(lhs, rhs):
    """Raw slack ``rhs - lhs`` with the residual conventions for infinities."""
    with np.errstate(invalid='ignore'):
        slack = np.where(np.isinf(rhs), np.inf, rhs - lhs)
    return np.where(~np.isinf(rhs) & np.isinf(lhs), -np.inf, slack)

