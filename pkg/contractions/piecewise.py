"""
Exact continuous piecewise-linear functions of one real variable.

A function is stored in canonical form: strictly increasing breakpoints, one
slope per interval (including both unbounded ends) and the exact value at 0
(the anchor).  Values away from 0 are obtained by integrating the slopes
outward from the origin, so named contractions evaluate without rounding on
exactly representable inputs.  Maps produced by composition or arithmetic get
their knot values by evaluating the operands directly, which keeps the error
independent of the number of segments.
"""
import logging
import numbers

import numpy as np

from common.exceptions import InvalidParameterError
from common.utility import lab_setting

logger = logging.getLogger(__name__)


class Verdict:
    """Outcome of a predicate check: ``ok`` or a violation with a description."""

    __slots__ = ('ok', 'description')

    def __init__(self, ok, description=''):
        self.ok = bool(ok)
        self.description = description

    def __bool__(self):
        return self.ok

    def __repr__(self):
        return 'Verdict(ok)' if self.ok else f'Verdict(violation: {self.description})'


class PiecewiseLinear:
    """
    Continuous piecewise-linear map R -> R in canonical form.

    Args:
        breakpoints (sequence of float): Increasing kink positions.
        slopes (sequence of float): ``len(breakpoints) + 1`` slopes, left to right.
        anchor (float): Value at 0.

    Raises:
        InvalidParameterError: On a length mismatch, non-finite data or
            decreasing breakpoints.
    """

    def __init__(self, breakpoints=(), slopes=(0.0,), anchor=0.0):
        breakpoints = np.asarray(breakpoints, dtype=float).ravel()
        slopes = np.asarray(slopes, dtype=float).ravel()
        anchor = float(anchor)
        if slopes.size != breakpoints.size + 1:
            raise InvalidParameterError(
                f'Need {breakpoints.size + 1} slopes for {breakpoints.size} breakpoints, '
                f'got {slopes.size}.')
        if not (np.all(np.isfinite(breakpoints)) and np.all(np.isfinite(slopes))
                and np.isfinite(anchor)):
            raise InvalidParameterError('Breakpoints, slopes and anchor must be finite.')
        if np.any(np.diff(breakpoints) < 0):
            raise InvalidParameterError('Breakpoints must be increasing.')
        self._set(breakpoints, slopes, anchor)

    @classmethod
    def _from_parts(cls, breakpoints, slopes, anchor, value_fn=None):
        obj = cls.__new__(cls)
        obj._set(np.asarray(breakpoints, dtype=float), np.asarray(slopes, dtype=float),
                 float(anchor), value_fn)
        return obj

    def _set(self, breakpoints, slopes, anchor, value_fn=None):
        b, s = _canonical(breakpoints, slopes)
        b.setflags(write=False)
        s.setflags(write=False)
        self._breakpoints = b
        self._slopes = s
        self._anchor = anchor
        knots = np.union1d(b, [0.0])
        if value_fn is None:
            values = self._walk(knots)
        else:
            values = np.asarray(value_fn(knots), dtype=float).copy()
            values[knots == 0.0] = anchor
        self._knots = knots
        self._knot_values = values
        self._right_slopes = s[np.searchsorted(b, knots, side='right')]
        self._left_slopes = s[np.searchsorted(b, knots, side='left')]

    def _walk(self, knots):
        # Accumulate from the origin outward, one knot at a time, starting at the anchor.
        b, s = self._breakpoints, self._slopes
        values = np.empty_like(knots)
        zero = int(np.searchsorted(knots, 0.0))
        values[zero] = self._anchor
        pos = knots[zero + 1:]
        if pos.size:
            prev = np.concatenate([[0.0], pos[:-1]])
            steps = s[np.searchsorted(b, prev, side='right')] * (pos - prev)
            values[zero + 1:] = np.cumsum(np.concatenate([[self._anchor], steps]))[1:]
        neg = knots[:zero][::-1]
        if neg.size:
            prev = np.concatenate([[0.0], neg[:-1]])
            steps = s[np.searchsorted(b, prev, side='left')] * (neg - prev)
            values[:zero] = np.cumsum(np.concatenate([[self._anchor], steps]))[1:][::-1]
        return values

    # -- canonical data -------------------------------------------------

    @property
    def breakpoints(self):
        return tuple(self._breakpoints.tolist())

    @property
    def slopes(self):
        return tuple(self._slopes.tolist())

    @property
    def anchor(self):
        return self._anchor

    def __len__(self):
        return int(self._slopes.size)

    def __repr__(self):
        if self._breakpoints.size > 8:
            return (f'PiecewiseLinear(<{self._breakpoints.size} breakpoints>, '
                    f'anchor={self._anchor!r})')
        return (f'PiecewiseLinear(breakpoints={self._breakpoints.tolist()!r}, '
                f'slopes={self._slopes.tolist()!r}, anchor={self._anchor!r})')

    def to_dict(self):
        return {'breakpoints': self._breakpoints.tolist(), 'slopes': self._slopes.tolist(),
                'anchor': self._anchor}

    # -- evaluation -----------------------------------------------------

    def eval(self, t):
        """Value at ``t`` (scalar or array)."""
        t_arr = np.asarray(t, dtype=float)
        knots = self._knots
        right = t_arr >= 0
        i_right = np.searchsorted(knots, t_arr, side='right') - 1
        i_left = np.searchsorted(knots, t_arr, side='left')
        idx = np.where(right, i_right, i_left)
        slope = np.where(right, self._right_slopes[idx], self._left_slopes[idx])
        out = self._knot_values[idx] + slope * (t_arr - knots[idx])
        if np.ndim(t) == 0:
            return float(out)
        return out

    __call__ = eval

    def slope_at(self, t):
        """Slope of the segment containing ``t``; at a breakpoint, the right slope."""
        out = self._slopes[np.searchsorted(self._breakpoints, np.asarray(t, dtype=float),
                                           side='right')]
        if np.ndim(t) == 0:
            return float(out)
        return out

    def left_slope_at(self, t):
        out = self._slopes[np.searchsorted(self._breakpoints, np.asarray(t, dtype=float),
                                           side='left')]
        if np.ndim(t) == 0:
            return float(out)
        return out

    # -- predicates -----------------------------------------------------

    def is_normal(self, tol=None):
        return self.verify_normal(tol).ok

    def verify_normal(self, tol=None):
        """
        ``ok`` iff the value at 0 is exactly 0 and every slope lies in [-1, 1].
        """
        tol = lab_setting('PWL_TOL', tol)
        if self._anchor != 0.0:
            return Verdict(False, f'C(0) = {self._anchor!r} != 0')
        bad = np.flatnonzero(np.abs(self._slopes) > 1.0 + tol)
        if bad.size:
            i = int(bad[0])
            return Verdict(False, f'slope {self._slopes[i]!r} on segment {i} is outside [-1, 1]')
        return Verdict(True)

    def verify_increasing_normal(self, tol=None):
        """``ok`` iff normal with every slope in [0, 1]."""
        tol = lab_setting('PWL_TOL', tol)
        verdict = self.verify_normal(tol)
        if not verdict:
            return verdict
        bad = np.flatnonzero(self._slopes < -tol)
        if bad.size:
            i = int(bad[0])
            return Verdict(False, f'slope {self._slopes[i]!r} on segment {i} is negative')
        return Verdict(True)

    def is_convex(self, tol=None):
        tol = lab_setting('PWL_TOL', tol)
        return bool(np.all(np.diff(self._slopes) >= -tol))

    # -- equality -------------------------------------------------------

    def isclose(self, other, tol=None):
        """Canonical-form equality with componentwise tolerance."""
        tol = lab_setting('PWL_TOL', tol)
        if self._breakpoints.size != other._breakpoints.size:
            return False
        a = np.concatenate([self._breakpoints, self._slopes, [self._anchor]])
        b = np.concatenate([other._breakpoints, other._slopes, [other._anchor]])
        scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
        return bool(np.all(np.abs(a - b) <= tol * scale))

    def __eq__(self, other):
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        return self.isclose(other)

    __hash__ = None

    # -- algebra --------------------------------------------------------

    def __add__(self, other):
        if isinstance(other, numbers.Real):
            c = float(other)
            return PiecewiseLinear._from_parts(self._breakpoints, self._slopes,
                                               self._anchor + c, lambda t: self.eval(t) + c)
        if not isinstance(other, PiecewiseLinear):
            return NotImplemented
        cuts = np.union1d(self._breakpoints, other._breakpoints)
        return _rebuild(cuts, lambda t: self.slope_at(t) + other.slope_at(t),
                        self._anchor + other._anchor,
                        lambda t: self.eval(t) + other.eval(t))

    __radd__ = __add__

    def __neg__(self):
        return PiecewiseLinear._from_parts(self._breakpoints, -self._slopes, -self._anchor,
                                           lambda t: -self.eval(t))

    def __sub__(self, other):
        if isinstance(other, (numbers.Real, PiecewiseLinear)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, c):
        if not isinstance(c, numbers.Real):
            return NotImplemented
        c = float(c)
        return PiecewiseLinear._from_parts(self._breakpoints, c * self._slopes, c * self._anchor,
                                           lambda t: c * self.eval(t))

    __rmul__ = __mul__

    def scale_argument(self, c):
        """The map ``t -> self(c t)`` for ``c != 0``."""
        c = float(c)
        if c == 0:
            raise InvalidParameterError('Argument scale must be nonzero.')
        breakpoints = self._breakpoints / c
        slopes = c * self._slopes
        if c < 0:
            breakpoints = breakpoints[::-1]
            slopes = slopes[::-1]
        return PiecewiseLinear._from_parts(breakpoints, slopes, self._anchor,
                                           lambda t: self.eval(c * t))

    def shift_argument(self, c):
        """The map ``t -> self(t + c)``."""
        c = float(c)
        return PiecewiseLinear._from_parts(self._breakpoints - c, self._slopes, self.eval(c),
                                           lambda t: self.eval(t + c))

    def apply(self, f):
        """Pointwise application to a function on a finite measure space."""
        return f.space.function(self.eval(f.values))


def identity():
    return PiecewiseLinear((), (1.0,), 0.0)


def compose(outer, inner):
    """
    Exact representation of ``outer ∘ inner``.

    The breakpoints of the result are those of ``inner`` together with the
    preimages under ``inner`` of the breakpoints of ``outer``; segments where
    ``inner`` is constant contribute no preimages.
    """
    b = inner._breakpoints
    s = inner._slopes
    lo = np.concatenate([[-np.inf], b])
    hi = np.concatenate([b, [np.inf]])
    x0 = np.where(np.isfinite(lo), lo, np.where(np.isfinite(hi), hi, 0.0))
    c = outer._breakpoints
    moving = s != 0.0
    if c.size and moving.any():
        y0 = np.asarray(inner.eval(x0[moving]))
        t = x0[moving, None] + (c[None, :] - y0[:, None]) / s[moving, None]
        inside = (t >= lo[moving, None]) & (t <= hi[moving, None])
        cuts = np.union1d(b, t[inside])
    else:
        cuts = b.copy()
    return _rebuild(cuts,
                    lambda t: outer.slope_at(inner.eval(t)) * inner.slope_at(t),
                    outer.eval(inner.eval(0.0)),
                    lambda t: outer.eval(inner.eval(t)))


def _rebuild(cuts, slope_fn, anchor, value_fn=None):
    # Slopes are sampled strictly inside each interval between consecutive cuts.
    cuts = np.asarray(cuts, dtype=float)
    if cuts.size == 0:
        probes = np.array([0.0])
    else:
        probes = np.concatenate([[cuts[0] - 1.0], (cuts[:-1] + cuts[1:]) / 2.0,
                                 [cuts[-1] + 1.0]])
    slopes = np.asarray(slope_fn(probes), dtype=float)
    return PiecewiseLinear._from_parts(cuts, slopes, anchor, value_fn)


def _canonical(breakpoints, slopes):
    tol = lab_setting('PWL_TOL')
    b = np.array(breakpoints, dtype=float)
    s = np.array(slopes, dtype=float)
    if b.size > 1:
        # zero-length segment: drop it and keep the slope that continues to the right
        short = np.diff(b) <= tol * np.maximum(1.0, np.abs(b[1:]))
        if short.any():
            b = b[np.concatenate([[True], ~short])]
            s = s[np.concatenate([[True], ~short, [True]])]
    if b.size:
        same = np.abs(np.diff(s)) <= tol
        if same.any():
            b = b[~same]
            s = s[np.concatenate([[True], ~same])]
    return b, s
