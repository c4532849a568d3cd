"""
Edge functions ``b: R -> [0, ∞]`` of mixed Dirichlet energies.

Each edge function is convex, symmetric, lower semicontinuous and vanishes at
0.  Besides its values it exposes what the resolvent solvers need: the
subdifferential (as an interval per point), the kink positions and the
proximal map ``argmin_x b(x) + (x - v)^2 / (2 tau)``.  Everything is
vectorized over numpy arrays of arguments.
"""
import logging
import math

import numpy as np

from common.exceptions import ImproperCenterError, InvalidEdgeFunctionError
from common.utility import lab_setting
from contractions.piecewise import PiecewiseLinear

logger = logging.getLogger(__name__)

INF = math.inf
BISECTION_STEPS = 200


def _scalar_out(t, out):
    return float(out) if np.ndim(t) == 0 else out


class EdgeFunction:
    """
    Base class of the edge function library.

    Subclasses implement ``_values``, ``_subdifferential`` and optionally a
    closed-form ``prox``.
    """
    kind = None
    #: differentiable with a locally Lipschitz derivative on the whole line
    smooth = False
    #: shifting around any offset gives back the same function
    shift_invariant = False
    convex = True

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        return _scalar_out(t, self._values(t_arr))

    eval = __call__

    def _values(self, t):
        raise NotImplementedError

    @property
    def radius(self):
        """Half-width of the effective domain ``{b < ∞}``."""
        return INF

    @property
    def kinks(self):
        """Points where ``b`` is not differentiable (inside or at the edge of its domain)."""
        return ()

    def derivative(self, t):
        """Midpoint of the subdifferential; NaN where it is empty or the whole line."""
        lo, hi = (np.asarray(x, dtype=float) for x in self.subdifferential(t))
        undefined = (lo > hi) | (np.isinf(lo) & np.isinf(hi))
        mid = (np.where(undefined, 0.0, lo) + np.where(undefined, 0.0, hi)) / 2.0
        return _scalar_out(t, np.where(undefined, np.nan, mid))

    def subdifferential(self, t):
        """
        Interval ``[lo, hi]`` of subgradients at each ``t``; ``lo > hi``
        marks an empty subdifferential (outside the domain).
        """
        t_arr = np.asarray(t, dtype=float)
        lo, hi = self._subdifferential(t_arr)
        if np.ndim(t) == 0:
            return float(lo), float(hi)
        return lo, hi

    def _subdifferential(self, t):
        raise NotImplementedError

    def prox(self, v, tau):
        """``argmin_x b(x) + (x - v)^2 / (2 tau)``, solved by bisection on the optimality condition."""
        v_arr = np.asarray(v, dtype=float)
        tau = float(tau)
        r = self.radius
        lo = np.clip(np.minimum(v_arr, 0.0), -r, r)
        hi = np.clip(np.maximum(v_arr, 0.0), -r, r)
        for _ in range(BISECTION_STEPS):
            mid = (lo + hi) / 2.0
            s_lo, s_hi = self._subdifferential(mid)
            too_small = mid + tau * s_hi < v_arr
            too_large = mid + tau * s_lo > v_arr
            lo = np.where(too_small, mid, lo)
            hi = np.where(too_large, mid, hi)
            settled = ~too_small & ~too_large
            lo = np.where(settled, mid, lo)
            hi = np.where(settled, mid, hi)
            if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(1.0, np.abs(mid))):
                break
        return _scalar_out(v, (lo + hi) / 2.0)

    def is_homogeneous(self, p):
        return False

    def params(self):
        return {}

    def to_dict(self):
        return {'kind': self.kind, **self.params()}

    def __eq__(self, other):
        if not isinstance(other, EdgeFunction):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    def __hash__(self):
        return hash(repr(sorted(self.to_dict().items())))

    def __repr__(self):
        params = ', '.join(f'{k}={v!r}' for k, v in self.params().items())
        return f'{type(self).__name__}({params})'


class PowerEdge(EdgeFunction):
    """``b(t) = weight * |t|^p`` for ``p >= 1``."""
    kind = 'power'

    def __init__(self, p, weight=1.0):
        p, weight = float(p), float(weight)
        if not (p >= 1 and math.isfinite(p)):
            raise InvalidEdgeFunctionError(f'Power edge needs finite p >= 1, got {p!r}.')
        if not (weight >= 0 and math.isfinite(weight)):
            raise InvalidEdgeFunctionError(f'Edge weight must be finite and >= 0, got {weight!r}.')
        self.p = p
        self.weight = weight
        self.smooth = p >= 2
        self.shift_invariant = p == 2

    def params(self):
        return {'p': self.p, 'weight': self.weight}

    @property
    def kinks(self):
        return (0.0,) if self.p == 1 and self.weight > 0 else ()

    def _values(self, t):
        return self.weight * np.abs(t) ** self.p

    def _subdifferential(self, t):
        if self.p == 1:
            g = self.weight * np.sign(t)
            at_zero = np.abs(t) <= lab_setting('FEASIBILITY_ATOL')
            return np.where(at_zero, -self.weight, g), np.where(at_zero, self.weight, g)
        g = self.weight * self.p * np.sign(t) * np.abs(t) ** (self.p - 1)
        return g, g

    def prox(self, v, tau):
        tau = float(tau)
        v_arr = np.asarray(v, dtype=float)
        if self.p == 1:
            out = np.sign(v_arr) * np.maximum(np.abs(v_arr) - tau * self.weight, 0.0)
        elif self.p == 2:
            out = v_arr / (1.0 + 2.0 * tau * self.weight)
        else:
            return super().prox(v, tau)
        return _scalar_out(v, out)

    def is_homogeneous(self, p):
        return self.weight == 0 or self.p == float(p)


class HuberEdge(EdgeFunction):
    """Huber function: ``weight * t^2 / 2`` on [-delta, delta], linear growth outside."""
    kind = 'huber'
    smooth = True

    def __init__(self, delta, weight=1.0):
        delta, weight = float(delta), float(weight)
        if not (delta > 0 and math.isfinite(delta)):
            raise InvalidEdgeFunctionError(f'Huber edge needs finite delta > 0, got {delta!r}.')
        if not (weight >= 0 and math.isfinite(weight)):
            raise InvalidEdgeFunctionError(f'Edge weight must be finite and >= 0, got {weight!r}.')
        self.delta = delta
        self.weight = weight

    def params(self):
        return {'delta': self.delta, 'weight': self.weight}

    def _values(self, t):
        a = np.abs(t)
        d = self.delta
        return self.weight * np.where(a <= d, a * a / 2.0, d * (a - d / 2.0))

    def _subdifferential(self, t):
        g = self.weight * np.clip(t, -self.delta, self.delta)
        return g, g

    def prox(self, v, tau):
        tau = float(tau)
        v_arr = np.asarray(v, dtype=float)
        w, d = self.weight, self.delta
        inner = v_arr / (1.0 + tau * w)
        outer = v_arr - tau * w * d * np.sign(v_arr)
        return _scalar_out(v, np.where(np.abs(inner) <= d, inner, outer))

    def is_homogeneous(self, p):
        return self.weight == 0


class IntervalIndicator(EdgeFunction):
    """
    Indicator of the closed interval [-c, c]: 0 inside, ∞ outside.

    Points within ``FEASIBILITY_ATOL * (1 + c)`` of the interval count as
    inside, so that rounding in solver output is not read as infeasibility.
    """
    kind = 'interval_indicator'

    def __init__(self, c):
        c = float(c)
        if not (c >= 0 and math.isfinite(c)):
            raise InvalidEdgeFunctionError(f'Indicator half-width must be finite and >= 0, got {c!r}.')
        self.c = c

    def params(self):
        return {'c': self.c}

    @property
    def allowance(self):
        return lab_setting('FEASIBILITY_ATOL') * (1.0 + self.c)

    @property
    def radius(self):
        return self.c

    @property
    def kinks(self):
        return (0.0,) if self.c == 0 else (-self.c, self.c)

    def _values(self, t):
        return np.where(np.abs(t) <= self.c + self.allowance, 0.0, INF)

    def _subdifferential(self, t):
        c, tol = self.c, self.allowance
        a = np.abs(t)
        inside = a < c - tol
        at_edge = (a >= c - tol) & (a <= c + tol)
        lo = np.where(inside, 0.0, INF)
        hi = np.where(inside, 0.0, -INF)
        if c == 0:
            lo = np.where(at_edge, -INF, lo)
            hi = np.where(at_edge, INF, hi)
        else:
            lo = np.where(at_edge, np.where(t > 0, 0.0, -INF), lo)
            hi = np.where(at_edge, np.where(t > 0, INF, 0.0), hi)
        return lo, hi

    def prox(self, v, tau):
        return _scalar_out(v, np.clip(np.asarray(v, dtype=float), -self.c, self.c))

    def is_homogeneous(self, p):
        return self.c == 0


class QuadraticWeighted(EdgeFunction):
    """``b(t) = w t^2``."""
    kind = 'quadratic_weighted'
    smooth = True
    shift_invariant = True

    def __init__(self, w):
        w = float(w)
        if not (w >= 0 and math.isfinite(w)):
            raise InvalidEdgeFunctionError(f'Quadratic edge weight must be finite and >= 0, got {w!r}.')
        self.w = w

    def params(self):
        return {'w': self.w}

    def _values(self, t):
        return self.w * t * t

    def _subdifferential(self, t):
        g = 2.0 * self.w * t
        return g, g

    def prox(self, v, tau):
        return _scalar_out(v, np.asarray(v, dtype=float) / (1.0 + 2.0 * float(tau) * self.w))

    def is_homogeneous(self, p):
        return self.w == 0 or float(p) == 2.0


class PwlConvexEdge(EdgeFunction):
    """
    Convex symmetric piecewise-linear edge function with ``b(0) = 0``.

    Args:
        pwl (PiecewiseLinear): The function; validated for convexity, symmetry
            and value 0 at the origin.
    """
    kind = 'pwl_convex'

    def __init__(self, pwl):
        if not isinstance(pwl, PiecewiseLinear):
            raise InvalidEdgeFunctionError('pwl_convex needs a PiecewiseLinear function.')
        if pwl.anchor != 0.0:
            raise InvalidEdgeFunctionError('pwl_convex edge must vanish at 0.')
        if not pwl.is_convex():
            raise InvalidEdgeFunctionError('pwl_convex edge slopes must be nondecreasing.')
        if not pwl.isclose(pwl.scale_argument(-1.0)):
            raise InvalidEdgeFunctionError('pwl_convex edge must be symmetric.')
        self.pwl = pwl

    @classmethod
    def from_half(cls, knots, slopes):
        """
        Build from the right half: positive knots ``c_1 < ... < c_k`` and the
        nonnegative nondecreasing slopes ``s_0, ..., s_k`` on
        ``[0, c_1], ..., [c_k, ∞)``.
        """
        knots = [float(k) for k in knots]
        slopes = [float(s) for s in slopes]
        if len(slopes) != len(knots) + 1 or any(k <= 0 for k in knots):
            raise InvalidEdgeFunctionError('Need positive knots and one more slope than knots.')
        if slopes[0] < 0:
            raise InvalidEdgeFunctionError('pwl_convex slopes must be nonnegative.')
        breakpoints = [-k for k in reversed(knots)] + [0.0] + knots
        return cls(PiecewiseLinear(breakpoints, [-s for s in reversed(slopes)] + slopes, 0.0))

    def params(self):
        return {'pwl': self.pwl.to_dict()}

    @property
    def kinks(self):
        return self.pwl.breakpoints

    def _values(self, t):
        return self.pwl.eval(t)

    def _subdifferential(self, t):
        # within rounding of a kink both one-sided slopes are subgradients
        delta = lab_setting('FEASIBILITY_ATOL') * np.maximum(1.0, np.abs(t))
        return self.pwl.left_slope_at(t - delta), self.pwl.slope_at(t + delta)

    def prox(self, v, tau):
        # x + tau * b'(x) is increasing; its value sweeps [kink + tau * left, kink + tau * right]
        # while x sits on a kink
        tau = float(tau)
        v_arr = np.asarray(v, dtype=float)
        b = np.asarray(self.pwl.breakpoints)
        s = np.asarray(self.pwl.slopes)
        if b.size == 0:
            return _scalar_out(v, v_arr - tau * s[0])
        thresholds = np.empty(2 * b.size)
        thresholds[0::2] = b + tau * s[:-1]
        thresholds[1::2] = b + tau * s[1:]
        idx = np.searchsorted(thresholds, v_arr, side='right')
        at_kink = idx % 2 == 1
        out = np.where(at_kink, b[np.minimum(idx // 2, b.size - 1)],
                       v_arr - tau * s[(idx + 1) // 2])
        return _scalar_out(v, out)

    def is_homogeneous(self, p):
        bps = self.pwl.breakpoints
        return len(bps) == 0 or (float(p) == 1.0 and bps == (0.0,))


class ShiftedEdge(EdgeFunction):
    """
    ``t -> (b(c + t) + b(c - t)) / 2 - b(c)``, the edge function of an f-shift
    with offset ``c = f(x) - f(y)``.
    """
    kind = 'shifted'

    def __init__(self, base, c):
        c = float(c)
        base_at_c = float(base(c))
        if not math.isfinite(base_at_c):
            raise ImproperCenterError(f'Edge function is infinite at the offset {c!r}.')
        self.base = base
        self.c = c
        self.base_at_c = base_at_c
        self.smooth = base.smooth
        self.convex = base.convex

    def params(self):
        return {'base': self.base.to_dict(), 'c': self.c}

    @property
    def radius(self):
        return self.base.radius - abs(self.c)

    @property
    def kinks(self):
        ks = set()
        for k in self.base.kinks:
            ks.add(k - self.c)
            ks.add(self.c - k)
        return tuple(sorted(ks))

    def _values(self, t):
        return (self.base._values(self.c + t) + self.base._values(self.c - t)) / 2.0 \
            - self.base_at_c

    def _subdifferential(self, t):
        lo1, hi1 = self.base._subdifferential(self.c + t)
        lo2, hi2 = self.base._subdifferential(self.c - t)
        with np.errstate(invalid='ignore'):
            lo = (lo1 - hi2) / 2.0
            hi = (hi1 - lo2) / 2.0
        empty = (lo1 > hi1) | (lo2 > hi2)
        return np.where(empty, INF, lo), np.where(empty, -INF, hi)


def shifted_edge(b, c):
    """
    Symmetrized edge function of ``b`` around the offset ``c``.

    Quadratic edges are shift invariant and come back unchanged, as does any
    edge at offset 0.

    Raises:
        ImproperCenterError: If ``b(c) = ∞``.
    """
    c = float(c)
    if not math.isfinite(float(b(c))):
        raise ImproperCenterError(f'Edge function is infinite at the offset {c!r}.')
    if b.shift_invariant or c == 0.0:
        return b
    return ShiftedEdge(b, c)


class TruncatedAbsEdge(EdgeFunction):
    """``b(t) = min(|t|, cap)``; symmetric but not convex (negative controls only)."""
    kind = 'truncated_abs'
    convex = False

    def __init__(self, cap=1.0):
        cap = float(cap)
        if not (cap > 0 and math.isfinite(cap)):
            raise InvalidEdgeFunctionError(f'Truncation level must be finite and > 0, got {cap!r}.')
        self.cap = cap

    def params(self):
        return {'cap': self.cap}

    def _values(self, t):
        return np.minimum(np.abs(t), self.cap)

    def _subdifferential(self, t):
        g = np.where(np.abs(t) < self.cap, np.sign(t), 0.0)
        return g, g


EDGE_KINDS = {
    'power': PowerEdge,
    'huber': HuberEdge,
    'interval_indicator': IntervalIndicator,
    'quadratic_weighted': QuadraticWeighted,
    'pwl_convex': PwlConvexEdge,
    'truncated_abs': TruncatedAbsEdge,
}
