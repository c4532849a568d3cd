"""
Residuals of inequalities ``lhs <= rhs`` between extended reals.

A residual is *vacuous* when the right-hand side is +∞ (it carries no
falsifiable content), *violated* when ``rhs - lhs`` falls below
``-(atol + rtol * |rhs|)`` (an infinite left side against a finite right side
counts as a violation with slack -∞) and *satisfied* otherwise.
"""
import math

import numpy as np

from common.utility import lab_setting

SATISFIED = 'satisfied'
VIOLATED = 'violated'
VACUOUS = 'vacuous'

STATUSES = (SATISFIED, VIOLATED, VACUOUS)

# integer codes used by the batch classifiers
_CODES = {0: SATISFIED, 1: VIOLATED, 2: VACUOUS}


class Tolerance:
    """
    Absolute/relative tolerance pair for inequality residuals.

    Args:
        atol (float, optional): Defaults to ``ATOL``.
        rtol (float, optional): Defaults to ``RTOL``.
    """

    def __init__(self, atol=None, rtol=None):
        self.atol = float(lab_setting('ATOL', atol))
        self.rtol = float(lab_setting('RTOL', rtol))

    def threshold(self, scale):
        return self.atol + self.rtol * np.abs(scale)

    def to_dict(self):
        return {'atol': self.atol, 'rtol': self.rtol}

    def __repr__(self):
        return f'Tolerance(atol={self.atol!r}, rtol={self.rtol!r})'


def as_tolerance(tolerance):
    if tolerance is None:
        return Tolerance()
    if isinstance(tolerance, Tolerance):
        return tolerance
    return Tolerance(atol=float(tolerance))


class Residual:
    """
    One instance of an inequality ``lhs <= rhs`` (or of an equality when
    ``equality`` is set, where the slack is ``-|lhs - rhs|``).
    """

    def __init__(self, lhs, rhs, tolerance=None, name=None, equality=False, scale=None):
        self.lhs = float(lhs)
        self.rhs = float(rhs)
        self.name = name
        self.equality = equality
        tolerance = as_tolerance(tolerance)
        self.tolerance = tolerance
        slack, code = (classify_equalities if equality else classify_inequalities)(
            np.array([self.lhs]), np.array([self.rhs]), tolerance,
            None if scale is None else np.array([float(scale)]))
        self.slack = float(slack[0])
        self.status = _CODES[int(code[0])]

    @property
    def satisfied(self):
        return self.status == SATISFIED

    @property
    def violated(self):
        return self.status == VIOLATED

    @property
    def vacuous(self):
        return self.status == VACUOUS

    def to_dict(self):
        return {
            'name': self.name,
            'lhs': _json_float(self.lhs),
            'rhs': _json_float(self.rhs),
            'slack': _json_float(self.slack),
            'status': self.status,
        }

    def __repr__(self):
        return (f'Residual({self.name or ""} lhs={self.lhs!r}, rhs={self.rhs!r}, '
                f'slack={self.slack!r}, {self.status})')


def _json_float(x):
    """JSON has no infinities; they are written as the strings ``"inf"``/``"-inf"``."""
    if math.isinf(x):
        return 'inf' if x > 0 else '-inf'
    return x


def classify_inequalities(lhs, rhs, tolerance=None, scale=None):
    """
    Batch form of the residual rules.

    Returns:
        tuple: ``(slack, code)`` arrays; codes 0 satisfied, 1 violated, 2 vacuous.
    """
    tolerance = as_tolerance(tolerance)
    lhs = np.asarray(lhs, dtype=float)
    rhs = np.asarray(rhs, dtype=float)
    vacuous = np.isinf(rhs)
    with np.errstate(invalid='ignore'):
        slack = np.where(vacuous, np.inf, rhs - lhs)
    slack = np.where(~vacuous & np.isinf(lhs), -np.inf, slack)
    scale = np.where(vacuous, 0.0, rhs) if scale is None else scale
    violated = ~vacuous & (slack < -tolerance.threshold(scale))
    code = np.where(vacuous, 2, np.where(violated, 1, 0))
    return slack, code


def classify_equalities(a, b, tolerance=None, scale=None):
    """
    Batch equality residuals: slack ``-|a - b|``; both sides infinite is
    vacuous, one side infinite is a violation.
    """
    tolerance = as_tolerance(tolerance)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    both_inf = np.isinf(a) & np.isinf(b)
    one_inf = np.isinf(a) ^ np.isinf(b)
    with np.errstate(invalid='ignore'):
        slack = -np.abs(a - b)
    slack = np.where(both_inf, np.inf, np.where(one_inf, -np.inf, slack))
    if scale is None:
        with np.errstate(invalid='ignore'):
            scale = np.where(np.isinf(a) | np.isinf(b), 0.0, np.maximum(np.abs(a), np.abs(b)))
    violated = one_inf | (~both_inf & (slack < -tolerance.threshold(scale)))
    code = np.where(both_inf, 2, np.where(violated, 1, 0))
    return slack, code


def residual_pair_sum(E, plus, minus):
    """``E(plus) + E(minus)`` for value stacks, with ∞ kept as ∞."""
    return E.evaluate_many(plus) + E.evaluate_many(minus)
