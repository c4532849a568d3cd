"""
Aggregated results of verification runs.

A ``CheckSummary`` folds the residuals of one named check (count, violations,
vacuous cases, minimal slack and the inputs of the worst sample); a
``Report`` collects the summaries of a run together with the seed, the
tolerance and descriptors of the instances it ran on.
"""
import csv
import io
import logging
import math

import numpy as np

from common.utility import lab_setting
from criteria.residuals import Residual, _json_float, as_tolerance

logger = logging.getLogger(__name__)

CSV_FIELDS = ['name', 'n', 'violations', 'vacuous', 'min_slack', 'negative_control']


class CheckSummary:
    """
    Running summary of one check.

    Args:
        name (str): Check name.
        negative_control (bool): The check is expected to find violations.
        keep_residuals (bool): Keep every folded ``Residual`` (small chains only).
    """

    def __init__(self, name, negative_control=False, keep_residuals=False):
        self.name = name
        self.negative_control = negative_control
        self.n = 0
        self.violations = 0
        self.vacuous = 0
        self.min_slack = math.inf
        self.worst_case_inputs = None
        self.first_violation_inputs = None
        self.residuals = [] if keep_residuals else None

    def add(self, residual, inputs=None):
        """Fold a single ``Residual``; ``inputs`` is a JSON-able record of what produced it."""
        if self.residuals is not None:
            self.residuals.append(residual)
        code = {'satisfied': 0, 'violated': 1, 'vacuous': 2}[residual.status]
        self.add_batch(np.array([residual.slack]), np.array([code]),
                       lambda i: inputs)

    def add_batch(self, slack, code, inputs_for):
        """
        Fold a batch of classified residuals.

        Args:
            slack (ndarray): Slacks.
            code (ndarray): Status codes from the batch classifiers.
            inputs_for (callable): Maps a row index to its input record; only
                called for the rows that become the worst case.
        """
        slack = np.asarray(slack, dtype=float)
        code = np.asarray(code)
        if not slack.size:
            return
        self.n += int(slack.size)
        violated = code == 1
        self.violations += int(np.count_nonzero(violated))
        self.vacuous += int(np.count_nonzero(code == 2))
        if self.first_violation_inputs is None and violated.any():
            self.first_violation_inputs = inputs_for(int(np.flatnonzero(violated)[0]))
        informative = code != 2
        if informative.any():
            candidates = np.where(informative, slack, np.inf)
            i = int(np.argmin(candidates))
            if candidates[i] < self.min_slack or self.worst_case_inputs is None:
                self.min_slack = float(candidates[i])
                self.worst_case_inputs = inputs_for(i)

    @property
    def passed(self):
        if self.negative_control:
            return self.violations > 0
        return self.violations == 0

    def to_dict(self):
        data = {
            'name': self.name,
            'n': self.n,
            'violations': self.violations,
            'vacuous': self.vacuous,
            'min_slack': _json_float(self.min_slack) if self.n > self.vacuous else None,
            'worst_case_inputs': self.worst_case_inputs,
        }
        if self.negative_control:
            data['negative_control'] = True
            data['first_violation_inputs'] = self.first_violation_inputs
        if self.residuals is not None:
            data['residuals'] = [r.to_dict() for r in self.residuals]
        return data


class Report:
    """
    Result of a verification run.

    Args:
        seed (int, optional): Base seed of the run.
        tolerance (Tolerance or float, optional): Inequality tolerance.
        instances (list of dict, optional): Descriptors of the instances.
    """

    def __init__(self, seed=None, tolerance=None, instances=None):
        self.seed = seed
        self.tolerance = as_tolerance(tolerance)
        self.instances = list(instances or [])
        self.checks = {}

    def check(self, name, negative_control=False, keep_residuals=False):
        """The summary for ``name``, created on first use."""
        summary = self.checks.get(name)
        if summary is None:
            summary = CheckSummary(name, negative_control=negative_control,
                                   keep_residuals=keep_residuals)
            self.checks[name] = summary
        return summary

    def add(self, name, residual, inputs=None):
        if not isinstance(residual, Residual):
            raise TypeError('Report.add expects a Residual.')
        self.check(name, keep_residuals=True).add(residual, inputs)

    def merge(self, other):
        """Fold the summaries of ``other`` into this report (same check names add up)."""
        for name, theirs in other.checks.items():
            ours = self.check(name, negative_control=theirs.negative_control)
            ours.n += theirs.n
            ours.violations += theirs.violations
            ours.vacuous += theirs.vacuous
            if ours.first_violation_inputs is None:
                ours.first_violation_inputs = theirs.first_violation_inputs
            if theirs.worst_case_inputs is not None and (
                    ours.worst_case_inputs is None or theirs.min_slack < ours.min_slack):
                ours.min_slack = theirs.min_slack
                ours.worst_case_inputs = theirs.worst_case_inputs
            if theirs.residuals is not None:
                ours.residuals = (ours.residuals or []) + theirs.residuals
        self.instances.extend(i for i in other.instances if i not in self.instances)
        return self

    @property
    def residuals(self):
        return [r for summary in self.checks.values() for r in (summary.residuals or [])]

    @property
    def violation_count(self):
        return sum(s.violations for s in self.checks.values() if not s.negative_control)

    @property
    def min_slack(self):
        slacks = [s.min_slack for s in self.checks.values()
                  if not s.negative_control and s.n > s.vacuous]
        return min(slacks, default=math.inf)

    @property
    def negative_controls(self):
        return [s for s in self.checks.values() if s.negative_control]

    @property
    def passed(self):
        return all(s.passed for s in self.checks.values())

    def is_empty(self):
        return all(s.n == 0 for s in self.checks.values())

    def to_dict(self):
        return {
            'schema_version': lab_setting('REPORT_SCHEMA_VERSION'),
            'seed': self.seed,
            'tolerance': self.tolerance.to_dict(),
            'instances': self.instances,
            'violations': self.violation_count,
            'min_slack': _json_float(self.min_slack),
            'checks': [self.checks[name].to_dict() for name in sorted(self.checks)],
        }

    def to_csv(self):
        out = io.StringIO()
        writer = csv.DictWriter(out, fieldnames=CSV_FIELDS, lineterminator='\n')
        writer.writeheader()
        for name in sorted(self.checks):
            summary = self.checks[name]
            writer.writerow({
                'name': name,
                'n': summary.n,
                'violations': summary.violations,
                'vacuous': summary.vacuous,
                'min_slack': _json_float(summary.min_slack) if summary.n > summary.vacuous else '',
                'negative_control': int(summary.negative_control),
            })
        return out.getvalue()

    def log_summary(self):
        for name in sorted(self.checks):
            s = self.checks[name]
            logger.info('%s: n=%d violations=%d vacuous=%d min_slack=%s', name, s.n, s.violations,
                        s.vacuous, s.min_slack)
