"""
Worked examples with known answers.

Each example is an equality between a computed value and the value derived
by hand, so the demo report passes exactly when the lab reproduces them.
"""
import logging

import numpy as np

from common.measure import FiniteMeasureSpace
from contractions import named
from contractions.helper import build_Dn
from criteria.checks import compatibility_residual
from criteria.identities import IDENTITY_KINDS, identity_check
from criteria.reports import Report
from criteria.residuals import Residual, Tolerance
from functionals.edges import IntervalIndicator, TruncatedAbsEdge
from functionals.energies import Edge, MixedDirichletEnergy, QuadraticForm, make_mixed_energy
from resolvent.evolution import evolve
from resolvent.projection import band_projection
from resolvent.solvers import resolvent

logger = logging.getLogger(__name__)

DEMO_GRID = np.linspace(-10.0, 10.0, 1001)
DEMO_F = np.array([1.5, -0.25, 3.0, 0.0, -7.5])
DEMO_G = np.array([0.5, 2.0, -1.25, 4.0, 0.0])


def _equal(report, name, computed, expected, atol=1e-9):
    report.add(name, Residual(computed, expected, Tolerance(atol=atol, rtol=0.0), name=name,
                              equality=True),
               {'computed': float(computed), 'expected': float(expected)})


def negative_control(report):
    """Two points, ``b(t) = min(|t|, 1)``, f and g differences 1, ``C(t) = t/2``: slack -1/2."""
    space = FiniteMeasureSpace.counting(2)
    E = MixedDirichletEnergy(space, [Edge(0, 1, TruncatedAbsEdge(1.0))], allow_nonconvex=True)
    residual = compatibility_residual(E, named.scaled(0.5), space.function([1.0, 0.0]),
                                      space.function([1.0, 0.0]))
    _equal(report, 'demo.negative_control_slack', residual.slack, -0.5)


def two_point_resolvent(report):
    """``E(g) = (g_a - g_b)^2``, λ = 1/4, f = (1, -1): the minimizer is (1/2, -1/2)."""
    space = FiniteMeasureSpace.counting(2)
    E = QuadraticForm(space, [[1.0, -1.0], [-1.0, 1.0]])
    g = resolvent(E, 0.25, space.function([1.0, -1.0])).minimizer.values
    _equal(report, 'demo.resolvent_two_point', g[0], 0.5, atol=1e-7)
    _equal(report, 'demo.resolvent_two_point_mean', g[0] + g[1], 0.0, atol=1e-7)


def indicator_mean(report):
    """Equality indicator between two points with weights (1, 3): the weighted mean of f."""
    space = FiniteMeasureSpace(['a', 'b'], [1.0, 3.0])
    E = make_mixed_energy(space, [Edge(0, 1, IntervalIndicator(0.0))])
    g = resolvent(E, 1.0, space.function([2.0, -2.0])).minimizer.values
    _equal(report, 'demo.indicator_weighted_mean', g[0], -1.0, atol=1e-10)
    _equal(report, 'demo.indicator_equal_components', g[1], g[0], atol=1e-10)


def projection(report):
    """u = 4, v = 0, band [0, 1]: (3, 1)."""
    space = FiniteMeasureSpace.counting(1)
    pu, pv = band_projection(space.function([4.0]), space.function([0.0]), 0.0, 1.0)
    _equal(report, 'demo.band_projection_u', pu.values[0], 3.0)
    _equal(report, 'demo.band_projection_v', pv.values[0], 1.0)


def implicit_euler(report):
    """Difference after 100 steps to t = 1/4 on the two-point quadratic: 2 / 1.01^100."""
    space = FiniteMeasureSpace.counting(2)
    E = QuadraticForm(space, [[1.0, -1.0], [-1.0, 1.0]])
    g = evolve(E, 0.25, 100, space.function([1.0, -1.0])).values
    _equal(report, 'demo.evolve_difference', g[0] - g[1], 2.0 / 1.01 ** 100, atol=1e-6)


def identities(report):
    for kind in IDENTITY_KINDS:
        deviation = identity_check(kind, {'f': DEMO_F, 'g': DEMO_G, 't': DEMO_GRID})
        _equal(report, f'demo.identity.{kind}', deviation, 0.0, atol=1e-12)


def dn_bounds(report):
    """``|D_n| <= 3^-n`` on [-3^(n+1), 3^(n+1)]."""
    for n in range(4):
        t = np.linspace(-3.0 ** (n + 1), 3.0 ** (n + 1), 10001)
        bound = 3.0 ** -n
        peak = float(np.max(np.abs(build_Dn(n).eval(t))))
        report.add(f'demo.Dn.{n}', Residual(peak, bound, Tolerance(atol=1e-12, rtol=0.0),
                                            name=f'demo.Dn.{n}'), {'n': n, 'peak': peak})


EXAMPLES = (negative_control, two_point_resolvent, indicator_mean, projection, implicit_euler,
            identities, dn_bounds)


def run_demo():
    report = Report()
    for example in EXAMPLES:
        logger.debug('demo: %s', example.__name__)
        example(report)
    return report
