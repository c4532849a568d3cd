"""
Suite orchestration: which checks run on which instances, and the exit status.

Every random draw comes from a stream keyed by (seed, check, sample index), so
a ``SuiteConfig`` determines its report.  Exit statuses: 0 pass, 1 violations
(or a negative control that found none), 2 configuration or I/O error, 3 a
negative control found its expected violation.
"""
import json
import logging
import math
from collections import namedtuple

import numpy as np

from common.exceptions import InvalidParameterError, UnknownCheckError
from common.utility import derive_seed, lab_setting, rng_for, sample_alpha, sample_values
from contractions.helper import random_normal_contraction
from criteria import sweeps
from criteria.helper import resolve_family
from criteria.identities import GRID_KINDS, IDENTITY_KINDS, identity_check
from criteria.reports import Report
from criteria.residuals import Residual, Tolerance
from harness.instances import DEFAULT_SUITE, load_instance
from resolvent.projection import product_projection_residual
from resolvent.properties import (CONVERGENCE, INVARIANCE_0_ALPHA, LINFTY_BAND, NONEXPANSIVE,
                                  ORDER_PRESERVING, PROPERTY_KINDS, convergence_residual,
                                  hypothesis_holds, resolvent_property_check)
from resolvent.solvers import SolverConfig, resolvent

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_VIOLATIONS = 1
EXIT_CONFIG_ERROR = 2
EXIT_EXPECTED_VIOLATION = 3

FORMATS = ('json', 'csv')

IDENTITIES = 'identities'
RESOLVENT = 'resolvent'
PROJECTION = 'projection'

SUITE_CHECKS = list(sweeps.CHECKS) + [IDENTITIES, RESOLVENT, PROJECTION]
DEFAULT_CHECKS = [name for name in SUITE_CHECKS if name != IDENTITIES]

IDENTITY_GRID = np.linspace(-10.0, 10.0, 1001)
IDENTITY_POINTS = 8
MAX_SEED = 2 ** 63 - 1

SuiteResult = namedtuple('SuiteResult', ['report', 'exit_code'])


def resolve_suite_checks(checks):
    if checks is None:
        return list(DEFAULT_CHECKS)
    if checks == 'all':
        return list(SUITE_CHECKS)
    if isinstance(checks, str):
        checks = [c.strip() for c in checks.split(',') if c.strip()]
    unknown = [c for c in checks if c not in SUITE_CHECKS]
    if unknown:
        raise UnknownCheckError(f'Unknown checks: {", ".join(unknown)}; '
                                f'expected some of {", ".join(SUITE_CHECKS)}.')
    return list(checks)


class SuiteConfig:
    """
    Everything a run depends on.

    Args:
        seed (int): Base seed in [0, 2^63).
        n_samples (int): Samples per criteria check and identity kind.
        tolerance (float, optional): Absolute tolerance of the inequalities.
        checks (str or list, optional): Subset of ``SUITE_CHECKS``; all but the
            identities by default.
        instances (list, optional): Instance sources (see ``load_instance``);
            ``DEFAULT_SUITE`` by default.
        family (str or list, optional): Contraction family of the sweeps.
        negative_control (bool): The run is expected to find violations.
        resolvent_samples (int, optional): Pairs per instance for the
            resolvent and projection checks; ``min(n_samples, 20)`` by default.
        resolvent_instances (int, optional): Run the resolvent checks on the
            first this many convex instances only; all of them by default.
        solver_tolerance (float, optional): Resolvent optimality target.
        out (str, optional): Report path; stdout when missing.
        format (str): ``json`` or ``csv``.
    """

    def __init__(self, seed=0, n_samples=1000, tolerance=None, checks=None, instances=None,
                 family=None, negative_control=False, resolvent_samples=None,
                 resolvent_instances=None, solver_tolerance=None, out=None, format='json'):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)) \
                or not 0 <= seed <= MAX_SEED:
            raise InvalidParameterError(f'seed must be an integer in [0, 2^63), got {seed!r}.')
        self.seed = int(seed)
        self.n_samples = int(n_samples)
        if self.n_samples < 0:
            raise InvalidParameterError(f'n_samples must be >= 0, got {n_samples!r}.')
        if tolerance is not None and not (
                float(tolerance) > 0 and math.isfinite(float(tolerance))):
            raise InvalidParameterError(f'tolerance must be > 0, got {tolerance!r}.')
        self.tolerance = None if tolerance is None else float(tolerance)
        self.checks = resolve_suite_checks(checks)
        self.instances = list(DEFAULT_SUITE if instances is None else instances)
        self.family = family
        resolve_family(family)
        self.negative_control = bool(negative_control)
        if resolvent_samples is None:
            resolvent_samples = min(self.n_samples, 20)
        self.resolvent_samples = int(resolvent_samples)
        if self.resolvent_samples < 0:
            raise InvalidParameterError('resolvent_samples must be >= 0.')
        if resolvent_instances is not None and int(resolvent_instances) < 0:
            raise InvalidParameterError('resolvent_instances must be >= 0.')
        self.resolvent_instances = None if resolvent_instances is None else int(resolvent_instances)
        self.solver = SolverConfig(tolerance=solver_tolerance)
        if format not in FORMATS:
            raise InvalidParameterError(f'Unknown report format {format!r}.')
        self.out = out
        self.format = format

    @property
    def inequality_tolerance(self):
        return Tolerance(atol=self.tolerance)

    def to_dict(self):
        return {
            'seed': self.seed,
            'n_samples': self.n_samples,
            'tolerance': self.tolerance,
            'checks': self.checks,
            'instances': self.instances,
            'family': self.family,
            'negative_control': self.negative_control,
            'resolvent_samples': self.resolvent_samples,
            'resolvent_instances': self.resolvent_instances,
            'solver_tolerance': self.solver.tolerance,
            'format': self.format,
        }


# identities

def _pair_inputs(rng):
    return {'f': sample_values(rng, IDENTITY_POINTS), 'g': sample_values(rng, IDENTITY_POINTS)}


def _case2_params(rng):
    x1, x2 = np.sort(rng.uniform(0.0, lab_setting('VALUE_RANGE'), size=2))
    if rng.random() < 0.5:
        x1, x2 = -x2, -x1
    return {'x1': float(x1), 'x2': float(x2)}


IDENTITY_SAMPLERS = {
    'cg_median': _pair_inputs,
    'cg_palpha': lambda rng: {**_pair_inputs(rng), 'alpha': float(sample_alpha(rng))},
    'bp_subst': lambda rng: {**_pair_inputs(rng), 'contraction': random_normal_contraction(rng)},
    'bh_veewedge': _pair_inputs,
    'bh_halpha': lambda rng: {**_pair_inputs(rng), 'alpha': float(sample_alpha(rng))},
    'reflection_mean': lambda rng: {**_pair_inputs(rng), 'alpha': float(sample_alpha(rng))},
    'case1_ids': lambda rng: {'x': float(rng.uniform(-3.0, 3.0))},
    'case2_ids': _case2_params,
    'case3_ids': lambda rng: {'x1': -float(rng.uniform(0.1, 3.0)),
                              'x2': float(rng.uniform(0.1, 3.0))},
    'cg_compositions': lambda rng: {'alpha': float(sample_alpha(rng))},
}


def _identity_record(k, inputs):
    record = {'sample': k}
    for key, value in inputs.items():
        if key == 't':
            continue
        record[key] = value.to_dict() if key == 'contraction' else (
            value.tolist() if isinstance(value, np.ndarray) else value)
    return record


def identity_sweep(report, seed, n_samples, kinds=None, atol=None):
    """Largest deviation of each identity kind, as residuals against ``IDENTITY_ATOL``."""
    if not n_samples:
        return
    tolerance = Tolerance(atol=lab_setting('IDENTITY_ATOL', atol), rtol=0.0)
    for kind in kinds or IDENTITY_KINDS:
        if kind not in IDENTITY_KINDS:
            raise UnknownCheckError(f'Unknown identity kind {kind!r}.')
        summary = report.check(f'identity.{kind}')
        for k in range(n_samples):
            inputs = IDENTITY_SAMPLERS[kind](rng_for(seed, 'identity', kind, k))
            if kind in GRID_KINDS:
                inputs['t'] = IDENTITY_GRID
            deviation = identity_check(kind, inputs)
            summary.add(Residual(deviation, 0.0, tolerance, name=f'identity.{kind}'),
                        _identity_record(k, inputs))


# resolvent

def _property_pairs(space, rng, alpha):
    n = len(space)
    v = space.function(sample_values(rng, n))
    return v, {
        NONEXPANSIVE: space.function(sample_values(rng, n)),
        ORDER_PRESERVING: v + space.function(rng.uniform(0.0, 2.0, size=n)),
        LINFTY_BAND: v + space.function(rng.uniform(-lab_setting('VALUE_RANGE'), alpha, size=n)),
        INVARIANCE_0_ALPHA: v + space.function(rng.uniform(0.0, alpha, size=n)),
    }


def resolvent_sweep(report, E, seed, n_samples, cfg, negative_control=False):
    """
    Order and contractivity certificates of ``J_λ`` on random pairs.

    ``J_λ v`` is solved once per sample and shared by the four properties.
    Every solve also lands in the ``resolvent.converged`` check, so a solver
    that stops short is a violation there while the property it was meant
    to certify is recorded as vacuous.
    """
    for k in range(n_samples):
        rng = rng_for(seed, RESOLVENT, k)
        lam = float(sample_alpha(rng))
        alpha = float(sample_alpha(rng))
        v, pairs = _property_pairs(E.space, rng, alpha)
        record = {'sample': k, 'lambda': lam, 'alpha': alpha, 'v': v.values.tolist()}
        convergence = report.check(CONVERGENCE)
        jv = resolvent(E, lam, v, cfg)
        convergence.add(convergence_residual(jv, cfg), {**record, 'input': 'v'})
        for kind in PROPERTY_KINDS:
            u = pairs[kind]
            inputs = {**record, 'u': u.values.tolist()}
            ju = None
            if hypothesis_holds(kind, u, v, alpha):
                ju = resolvent(E, lam, u, cfg)
                convergence.add(convergence_residual(ju, cfg), {**inputs, 'input': kind})
            residual = resolvent_property_check(kind, E, lam, u, v, alpha=alpha, cfg=cfg,
                                                tolerance=report.tolerance.atol, ju=ju, jv=jv)
            report.check(residual.name, negative_control=negative_control).add(residual, inputs)


def projection_sweep(report, E, seed, n_samples, negative_control=False):
    """Invariance of ``E(u) + E(v)`` under the band projection."""
    if not n_samples:
        return
    n = len(E.space)
    summary = report.check('projection.invariance', negative_control=negative_control)
    for k in range(n_samples):
        rng = rng_for(seed, PROJECTION, k)
        u = E.space.function(sample_values(rng, n))
        v = E.space.function(sample_values(rng, n))
        a, b = -float(sample_alpha(rng)), float(sample_alpha(rng))
        residual = product_projection_residual(E, u, v, a, b, report.tolerance)
        summary.add(residual, {'sample': k, 'a': a, 'b': b,
                               'u': u.values.tolist(), 'v': v.values.tolist()})


def exit_code(report):
    if report.is_empty():
        return EXIT_PASS
    if report.violation_count:
        return EXIT_VIOLATIONS
    controls = report.negative_controls
    if controls:
        return EXIT_EXPECTED_VIOLATION if any(s.violations for s in controls) \
            else EXIT_VIOLATIONS
    return EXIT_PASS


def run_suite(config):
    """
    Run every enabled check of ``config``.

    Criteria sweeps, projection checks and (for convex instances) resolvent
    checks run per instance; the identity checks need no instance.

    Returns:
        SuiteResult: The report and its exit status.
    """
    report = Report(seed=config.seed, tolerance=config.inequality_tolerance)
    resolvent_runs = 0
    criteria_checks = [c for c in config.checks if c in sweeps.CHECKS]
    if IDENTITIES in config.checks:
        identity_sweep(report, config.seed, config.n_samples)

    for i, source in enumerate(config.instances):
        instance = load_instance(source, derive_seed(config.seed, 'instance', i))
        E = instance.functional
        report.instances.append(instance.descriptor)
        seed = derive_seed(config.seed, 'sweep', i)
        if criteria_checks and config.n_samples:
            sub = sweeps.fuzz_sweep(E, config.family, seed, config.n_samples,
                                    report.tolerance, criteria_checks, config.negative_control)
            sub.instances = []
            report.merge(sub)
        if PROJECTION in config.checks:
            projection_sweep(report, E, seed, config.resolvent_samples, config.negative_control)
        if RESOLVENT in config.checks:
            limit = config.resolvent_instances
            if E.convex and (limit is None or resolvent_runs < limit):
                resolvent_sweep(report, E, seed, config.resolvent_samples, config.solver,
                                config.negative_control)
                resolvent_runs += 1
            elif not E.convex:
                logger.info('instance %d is not convex; resolvent checks skipped', i)

    code = exit_code(report)
    report.log_summary()
    logger.info('suite seed=%s: %d violations, exit status %d', config.seed,
                report.violation_count, code)
    return SuiteResult(report, code)


def _json_default(value):
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f'{type(value).__name__} is not JSON serializable')


def report_document(report):
    """The JSON-safe report dict (numpy scalars converted)."""
    return json.loads(json.dumps(report.to_dict(), default=_json_default))


def render_report(report, format='json'):
    if format == 'csv':
        return report.to_csv()
    return json.dumps(report.to_dict(), indent=2, default=_json_default) + '\n'


def write_report(report, out=None, format='json'):
    """Write the report to ``out``; return the text when ``out`` is missing."""
    text = render_report(report, format)
    if out is None:
        return text
    with open(out, 'w') as fh:
        fh.write(text)
    logger.info('report written to %s', out)
    return None
