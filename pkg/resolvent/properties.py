"""
Order and contractivity certificates of the resolvent.

The conclusions hold for exact minimizers; a computed minimizer with residual
``r`` lies within ``λ r`` of the exact one, so each check widens its absolute
tolerance by ``2 λ (r_u + r_v)``.  Pointwise conclusions divide that widening
by ``sqrt(min m)``, the factor between the m-norm and the sup norm.  A pair
whose solves did not converge is recorded as vacuous.
"""
import logging
import math

import numpy as np

from common.exceptions import InvalidParameterError, UnknownCheckError
from common.measure import check_same_space, norm
from common.utility import lab_setting
from criteria.residuals import Residual, Tolerance
from resolvent.solvers import SolverConfig, resolvent

logger = logging.getLogger(__name__)

NONEXPANSIVE = 'nonexpansive'
ORDER_PRESERVING = 'order_preserving'
LINFTY_BAND = 'linfty_band'
INVARIANCE_0_ALPHA = 'invariance_0_alpha'

PROPERTY_KINDS = (NONEXPANSIVE, ORDER_PRESERVING, LINFTY_BAND, INVARIANCE_0_ALPHA)

CONVERGENCE = 'resolvent.converged'


def _alpha(kind, alpha):
    if alpha is None:
        raise InvalidParameterError(f'{kind} needs alpha.')
    alpha = float(alpha)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InvalidParameterError(f'alpha must be finite and > 0, got {alpha!r}.')
    return alpha


def hypothesis_holds(kind, u, v, alpha=None, atol=0.0):
    d = (u - v).values
    if kind == NONEXPANSIVE:
        return True
    if kind == ORDER_PRESERVING:
        return bool(np.all(d >= -atol))
    if kind == LINFTY_BAND:
        return bool(np.all(d <= alpha + atol))
    return bool(np.all(d >= -atol) and np.all(d <= alpha + atol))


def solver_slack(lam, *results):
    return 2.0 * lam * sum(r.optimality_residual for r in results)


def convergence_residual(result, cfg=None):
    """``optimality_residual <= tolerance``; a solve that stopped short counts with lhs ∞."""
    target = (cfg or SolverConfig()).tolerance
    lhs = result.optimality_residual if result.converged else math.inf
    return Residual(lhs, target, Tolerance(atol=0.0, rtol=0.0), name=CONVERGENCE)


def _solved(result, E, lam, f, cfg):
    if result is None:
        return resolvent(E, lam, f, cfg)
    if result.lam != float(lam) or result.minimizer.space != f.space:
        raise InvalidParameterError('The reused solve does not belong to this λ and input.')
    return result


def resolvent_property_check(kind, E, lam, u, v, alpha=None, cfg=None, tolerance=None, ju=None,
                             jv=None):
    """
    Residual of the conclusion of ``kind`` for the pair ``(u, v)``.

    Args:
        kind (str): One of ``PROPERTY_KINDS``.
        E (EnergyFunctional): Convex functional.
        lam (float): Resolvent step.
        u (Fn): First input.
        v (Fn): Second input.
        alpha (float, optional): Band width for ``linfty_band`` and
            ``invariance_0_alpha``.
        cfg (SolverConfig, optional): Solver settings.
        tolerance (float, optional): Base absolute tolerance, ``ATOL`` by default.
        ju (ResolventResult, optional): A solve of ``J_λ u`` to reuse.
        jv (ResolventResult, optional): A solve of ``J_λ v`` to reuse.

    Returns:
        Residual: Vacuous when the inputs miss the hypothesis of ``kind`` (no
        solve) or when either solve did not converge.

    Raises:
        UnknownCheckError: If ``kind`` is not known.
    """
    if kind not in PROPERTY_KINDS:
        raise UnknownCheckError(f'Unknown resolvent property {kind!r}.')
    check_same_space(u, v)
    if kind in (LINFTY_BAND, INVARIANCE_0_ALPHA):
        alpha = _alpha(kind, alpha)
    name = f'resolvent.{kind}'
    if not hypothesis_holds(kind, u, v, alpha):
        return Residual(0.0, math.inf, name=name)

    ju = _solved(ju, E, lam, u, cfg)
    jv = _solved(jv, E, lam, v, cfg)
    if not (ju.converged and jv.converged):
        logger.warning('%s not checked: the resolvent did not converge.', name)
        return Residual(0.0, math.inf, name=name)
    atol = lab_setting('ATOL', tolerance)
    slack = solver_slack(lam, ju, jv)

    if kind == NONEXPANSIVE:
        lhs, rhs = norm(ju.minimizer - jv.minimizer), norm(u - v)
    else:
        slack /= math.sqrt(float(np.min(E.space.weights)))
        d = (ju.minimizer - jv.minimizer).values
        if kind == ORDER_PRESERVING:
            lhs, rhs = float(np.max(-d)), 0.0
        elif kind == LINFTY_BAND:
            lhs, rhs = float(np.max(d)), alpha
        else:
            lhs, rhs = max(float(np.max(d - alpha)), float(np.max(-d))), 0.0
    return Residual(lhs, rhs, Tolerance(atol=atol + slack), name=name)
