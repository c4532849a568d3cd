"""Implicit Euler: the semigroup generated by ``E`` approximated by iterated resolvents."""
import logging
import math

from common.exceptions import InvalidParameterError, SolverDidNotConverge
from common.measure import norm
from common.utility import lab_setting
from criteria.residuals import Residual, Tolerance
from resolvent.solvers import resolvent

logger = logging.getLogger(__name__)


def _check_horizon(t, steps):
    t = float(t)
    if not (t >= 0 and math.isfinite(t)):
        raise InvalidParameterError(f'Evolution time must be finite and >= 0, got {t!r}.')
    if isinstance(steps, bool) or int(steps) != steps or steps < 1:
        raise InvalidParameterError(f'Number of steps must be a positive integer, got {steps!r}.')
    return t, int(steps)


def evolve_path(E, t, steps, f, cfg=None):
    """
    The resolvent solves of ``(J_{t/steps})^steps f``, in order.

    Stops at the first solve that did not converge; that result is the last
    element of the list.  ``t = 0`` gives an empty path.
    """
    t, steps = _check_horizon(t, steps)
    if t == 0:
        return []
    lam = t / steps
    path = []
    g = f
    for k in range(steps):
        result = resolvent(E, lam, g, cfg)
        path.append(result)
        if not result.converged:
            logger.warning('Evolution stopped at step %d of %d.', k + 1, steps)
            break
        g = result.minimizer
    return path


def evolve(E, t, steps, f, cfg=None):
    """
    ``(J_{t/steps})^steps f``.

    Raises:
        SolverDidNotConverge: If one of the resolvent solves did not converge;
            the failing ``ResolventResult`` is attached as ``result``.
    """
    path = evolve_path(E, t, steps, f, cfg)
    if not path:
        return f
    if not path[-1].converged:
        raise SolverDidNotConverge(
            f'Resolvent step {len(path)} of {steps} did not converge.', result=path[-1])
    return path[-1].minimizer


def semigroup_defect(E, t, steps, f, cfg=None):
    """
    ``‖u(t) - u(t/2)∘u(t/2)‖_m`` where the whole run uses ``2 * steps`` steps
    and each half uses ``steps``, so both runs share the step size.
    """
    whole = evolve(E, t, 2 * steps, f, cfg)
    half = evolve(E, t / 2.0, steps, f, cfg)
    return norm(whole - evolve(E, t / 2.0, steps, half, cfg))


def monotone_energy_residuals(E, f, path, tolerance=None):
    """
    ``E(g_{k+1}) <= E(g_k)`` along an evolution path.

    An approximate minimizer with residual ``r`` is at most ``λ r² / 2`` above
    the optimal prox value, which is added to the absolute tolerance.
    """
    atol = lab_setting('ATOL', tolerance)
    residuals = []
    previous = E(f)
    for k, result in enumerate(path):
        current = E(result.minimizer)
        slack = atol + result.lam * result.optimality_residual ** 2 / 2.0
        residuals.append(Residual(current, previous, Tolerance(atol=slack),
                                  name=f'evolve.energy.{k + 1}'))
        previous = current
    return residuals
