"""Exact piecewise survival functions evaluated in the log domain.

A TailCurve represents F-bar on [0, infinity) as an ordered list of
contiguous segments, each carrying a closed-form expression for the log of
the tail.  Everything downstream (transforms, convolution integrands, class
diagnostics) queries tails exclusively through log values: the constructions
implemented here produce values like exp(-7.4e18), far below any float, and
the diagnostics divide pairs of such numbers.

Numerical conventions that matter:

* Decreasing affine pieces are anchored at their *upper* endpoint,
  F(x) = exp(lva) * (1 + r (x - hi)).  Anchoring at the small end keeps
  ratios such as F(2 x_n - t) / F(2 x_n) exact to a few ulp even when
  x_n ~ 1e16, which the shift diagnostics rely on.
* Consecutive segments are chained so the value at a join is carried over
  bit-for-bit; a new segment whose closed form would start a hair above the
  previous endpoint (float roundoff) is snapped down.  Upward jumps beyond
  roundoff are construction errors.
* Queries beyond the last materialized breakpoint raise TruncationError;
  extrapolating an infinite construction would fabricate its asymptotics.
"""

from __future__ import annotations

import dataclasses
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import ParameterError, TruncationError
from .quadrature import QuadConfig, log_quad, logsubexp

__all__ = [
    "Segment",
    "ConstSegment",
    "AffineSegment",
    "PowerSegment",
    "ExpAffineSegment",
    "ExpPowSegment",
    "PowerOfSegment",
    "TiltedSegment",
    "TailCurve",
    "chain_segments",
]

_NEG_INF = float("-inf")
# Permitted relative size of an upward jump at a join before it is treated
# as a construction bug rather than roundoff.
_SNAP_RTOL = 1e-9


@dataclass(frozen=True)
class Segment(ABC):
    """One piece of a survival function on [lo, hi).

    Subclasses provide the exact log tail value, the log density of the
    absolutely continuous part (-inf where flat), an exact log integral of
    the tail when a closed form exists, and an exact inverse when the form
    is invertible in closed form.  ``log_offset`` is a vertical shift in the
    log domain used for join snapping and for power/tilt simplifications.
    """

    lo: float
    hi: float
    log_offset: float = 0.0

    def __post_init__(self):
        if not (self.lo < self.hi):
            raise ParameterError(f"segment bounds out of order: [{self.lo}, {self.hi})")

    @abstractmethod
    def _base_log_value(self, x: np.ndarray) -> np.ndarray: ...

    @abstractmethod
    def _base_log_density(self, x: np.ndarray) -> np.ndarray: ...

    def log_value(self, x: np.ndarray) -> np.ndarray:
        return self._base_log_value(np.asarray(x, dtype=float)) + self.log_offset

    def log_value_at(self, x: float) -> float:
        return float(self.log_value(np.array([x]))[0])

    def log_density(self, x: np.ndarray) -> np.ndarray:
        return self._base_log_density(np.asarray(x, dtype=float)) + self.log_offset

    @property
    def has_density(self) -> bool:
        return True

    def log_integral(self, a: float, b: float) -> float | None:
        """Exact log of integral_a^b F(y) dy, or None if no closed form."""
        return None

    def inverse(self, log_u: float) -> float | None:
        """Exact x in [lo, hi] with log_value(x) = log_u, or None."""
        return None

    def with_offset(self, delta: float) -> "Segment":
        return dataclasses.replace(self, log_offset=self.log_offset + delta)

    def with_bounds(self, lo: float, hi: float) -> "Segment":
        return dataclasses.replace(self, lo=lo, hi=hi)


@dataclass(frozen=True)
class ConstSegment(Segment):
    """Flat tail: F(x) = exp(level).  Carries no density."""

    level: float = 0.0

    def _base_log_value(self, x):
        return np.full_like(x, self.level)

    def _base_log_density(self, x):
        return np.full_like(x, _NEG_INF)

    @property
    def has_density(self) -> bool:
        return False

    def log_integral(self, a, b):
        if b == a:
            return _NEG_INF
        return self.level + self.log_offset + math.log(b - a)


@dataclass(frozen=True)
class AffineSegment(Segment):
    """Linear tail anchored at the upper endpoint.

    F(x) = exp(log_v_hi) * (1 + ratio * (x - hi)) with ratio < 0 so the
    tail decreases toward exp(log_v_hi) at hi.
    """

    log_v_hi: float = 0.0
    ratio: float = -1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.ratio < 0:
            raise ParameterError(f"affine tail must decrease: ratio={self.ratio}")
        # Value must stay positive on [lo, hi).
        if 1.0 + self.ratio * (self.lo - self.hi) <= 0.0:
            raise ParameterError("affine tail nonpositive at segment start")

    @staticmethod
    def from_endpoints(lo: float, hi: float, log_v_lo: float, log_v_hi: float) -> "AffineSegment":
        if not log_v_lo > log_v_hi:
            raise ParameterError("affine tail requires log_v_lo > log_v_hi")
        ratio = math.expm1(log_v_lo - log_v_hi) / (lo - hi)
        return AffineSegment(lo=lo, hi=hi, log_v_hi=log_v_hi, ratio=ratio)

    def _base_log_value(self, x):
        return self.log_v_hi + np.log1p(self.ratio * (x - self.hi))

    def _base_log_density(self, x):
        return np.full_like(x, self.log_v_hi + math.log(-self.ratio))

    def log_integral(self, a, b):
        if b == a:
            return _NEG_INF
        mid_factor = 1.0 + self.ratio * (0.5 * (a + b) - self.hi)
        return self.log_v_hi + self.log_offset + math.log(b - a) + math.log(mid_factor)

    def inverse(self, log_u):
        x = self.hi + math.expm1(log_u - self.log_offset - self.log_v_hi) / self.ratio
        return min(max(x, self.lo), self.hi)


@dataclass(frozen=True)
class PowerSegment(Segment):
    """Shifted power tail: F(x) = exp(log_coeff) * (shift + x) ** exponent."""

    log_coeff: float = 0.0
    exponent: float = -1.0
    shift: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.exponent >= 0:
            raise ParameterError(f"power tail must decrease: exponent={self.exponent}")
        if self.shift + self.lo <= 0:
            raise ParameterError("power tail undefined: shift + lo <= 0")

    def _base_log_value(self, x):
        return self.log_coeff + self.exponent * np.log(self.shift + x)

    def _base_log_density(self, x):
        return (
            self.log_coeff
            + math.log(-self.exponent)
            + (self.exponent - 1.0) * np.log(self.shift + x)
        )

    def log_integral(self, a, b):
        if b == a:
            return _NEG_INF
        p = self.exponent + 1.0
        la, lb = math.log(self.shift + a), math.log(self.shift + b)
        base = self.log_coeff + self.log_offset
        if abs(p) < 1e-14:
            return base + math.log(lb - la)
        if p > 0:
            return base + logsubexp(p * lb, p * la) - math.log(p)
        return base + logsubexp(p * la, p * lb) - math.log(-p)

    def inverse(self, log_u):
        x = math.exp((log_u - self.log_offset - self.log_coeff) / self.exponent) - self.shift
        return min(max(x, self.lo), self.hi)


@dataclass(frozen=True)
class ExpAffineSegment(Segment):
    """Exponential tail: F(x) = exp(log_v_lo - rate * (x - lo))."""

    log_v_lo: float = 0.0
    rate: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not self.rate > 0:
            raise ParameterError(f"exp-affine rate must be positive, got {self.rate}")

    def _base_log_value(self, x):
        return self.log_v_lo - self.rate * (x - self.lo)

    def _base_log_density(self, x):
        return math.log(self.rate) + self._base_log_value(x)

    def log_integral(self, a, b):
        if b == a:
            return _NEG_INF
        la = self.log_v_lo - self.rate * (a - self.lo)
        lb = self.log_v_lo - self.rate * (b - self.lo)
        return self.log_offset + logsubexp(la, lb) - math.log(self.rate)

    def inverse(self, log_u):
        x = self.lo + (self.log_v_lo + self.log_offset - log_u) / self.rate
        return min(max(x, self.lo), self.hi)


@dataclass(frozen=True)
class ExpPowSegment(Segment):
    """Stretched-exponential tail: F(x) = exp(-coeff * x ** beta), 0 < beta < 1."""

    beta: float = 0.5
    coeff: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if not (0.0 < self.beta < 1.0):
            raise ParameterError(f"beta must lie in (0, 1), got {self.beta}")
        if not self.coeff > 0:
            raise ParameterError(f"coeff must be positive, got {self.coeff}")
        if self.lo < 0:
            raise ParameterError("stretched-exponential tail requires lo >= 0")

    def _base_log_value(self, x):
        return -self.coeff * np.power(x, self.beta)

    def _base_log_density(self, x):
        with np.errstate(divide="ignore"):
            return (
                math.log(self.coeff * self.beta)
                + (self.beta - 1.0) * np.log(x)
                - self.coeff * np.power(x, self.beta)
            )

    def log_integral(self, a, b):
        if b == a:
            return _NEG_INF
        if self.beta != 0.5:
            return None
        c = self.coeff

        def anti(y: float) -> float:
            # integral of exp(-c sqrt(t)) dt has antiderivative
            # -(2/c^2) (1 + c sqrt(t)) exp(-c sqrt(t))
            s = math.sqrt(y)
            return math.log(2.0 / (c * c)) + math.log1p(c * s) - c * s

        return self.log_offset + logsubexp(anti(a), anti(b))

    def inverse(self, log_u):
        target = (self.log_offset - log_u) / self.coeff
        if target < 0:
            return self.lo
        x = target ** (1.0 / self.beta)
        return min(max(x, self.lo), self.hi)


@dataclass(frozen=True)
class PowerOfSegment(Segment):
    """Pointwise power of an inner tail piece: F(x) = inner(x) ** m."""

    inner: Segment = None  # type: ignore[assignment]
    m: int = 1

    def __post_init__(self):
        super().__post_init__()
        if self.inner is None:
            raise ParameterError("power-of segment requires an inner segment")
        if self.m < 1:
            raise ParameterError(f"power must be a positive integer, got {self.m}")

    def _base_log_value(self, x):
        return self.m * self.inner.log_value(x)

    def _base_log_density(self, x):
        return (
            math.log(self.m)
            + (self.m - 1) * self.inner.log_value(x)
            + self.inner.log_density(x)
        )

    @property
    def has_density(self) -> bool:
        return self.inner.has_density

    def inverse(self, log_u):
        inner_x = self.inner.inverse((log_u - self.log_offset) / self.m)
        return inner_x


@dataclass(frozen=True)
class TiltedSegment(Segment):
    """Exponentially tilted tail piece: F(x) = inner(x) * exp(-gamma * x)."""

    inner: Segment = None  # type: ignore[assignment]
    gamma: float = 1.0

    def __post_init__(self):
        super().__post_init__()
        if self.inner is None:
            raise ParameterError("tilted segment requires an inner segment")
        if not self.gamma > 0:
            raise ParameterError(f"tilt rate must be positive, got {self.gamma}")

    def _base_log_value(self, x):
        return self.inner.log_value(x) - self.gamma * x

    def _base_log_density(self, x):
        # density of the tilted law on smooth stretches:
        # exp(-gamma x) * (f(x) + gamma * F(x))
        inner_f = self.inner.log_density(x)
        inner_v = math.log(self.gamma) + self.inner.log_value(x)
        return np.logaddexp(inner_f, inner_v) - self.gamma * x

    @property
    def has_density(self) -> bool:
        return True

    def log_integral(self, a, b):
        if b == a:
            return _NEG_INF
        flat = _flatten_tilt(self)
        if flat is None:
            return None
        rate, level_at = flat
        la = level_at(a)
        lb = level_at(b)
        return logsubexp(la, lb) - math.log(rate)


def _flatten_tilt(seg: TiltedSegment):
    """If a (nested) tilt reduces to a pure exponential on the segment,
    return (total_rate, log_value_fn); otherwise None."""
    rate = 0.0
    cur: Segment = seg
    while isinstance(cur, TiltedSegment):
        rate += cur.gamma
        cur = cur.inner
    if isinstance(cur, ConstSegment):
        pass
    elif isinstance(cur, ExpAffineSegment):
        rate += cur.rate
    else:
        return None
    if rate <= 0:
        return None
    return rate, seg.log_value_at


def simplify_power(inner: Segment, m: int) -> Segment:
    """Raise a segment's tail to an integer power, folding closed forms."""
    if m == 1:
        return inner
    if isinstance(inner, ConstSegment):
        return dataclasses.replace(inner, level=m * inner.level, log_offset=m * inner.log_offset)
    if isinstance(inner, ExpAffineSegment):
        return dataclasses.replace(
            inner, log_v_lo=m * inner.log_v_lo, rate=m * inner.rate, log_offset=m * inner.log_offset
        )
    if isinstance(inner, PowerSegment):
        return dataclasses.replace(
            inner,
            log_coeff=m * inner.log_coeff,
            exponent=m * inner.exponent,
            log_offset=m * inner.log_offset,
        )
    if isinstance(inner, ExpPowSegment):
        return dataclasses.replace(inner, coeff=m * inner.coeff, log_offset=m * inner.log_offset)
    return PowerOfSegment(lo=inner.lo, hi=inner.hi, inner=inner, m=m)


def chain_segments(segments: Sequence[Segment]) -> tuple[Segment, ...]:
    """Validate contiguity and snap away roundoff-sized upward jumps.

    Downward jumps (atoms) pass through untouched.  An upward jump larger
    than roundoff is a construction bug and raises ParameterError.
    """
    if not segments:
        raise ParameterError("a tail curve needs at least one segment")
    out = [segments[0]]
    for seg in segments[1:]:
        prev = out[-1]
        if seg.lo != prev.hi:
            raise ParameterError(
                f"segments not contiguous: previous ends at {prev.hi}, next starts at {seg.lo}"
            )
        prev_end = prev.log_value_at(prev.hi) if math.isfinite(prev.hi) else _NEG_INF
        start = seg.log_value_at(seg.lo)
        if start > prev_end:
            gap = start - prev_end
            if gap > _SNAP_RTOL * max(1.0, abs(prev_end)):
                raise ParameterError(
                    f"upward tail jump of {gap:.3e} at x={seg.lo}; tails must be nonincreasing"
                )
            seg = seg.with_offset(prev_end - start)
        out.append(seg)
    return tuple(out)


class TailCurve:
    """Piecewise survival function on [0, truncation_hi].

    F(x) = 1 for x < 0 by convention.  Evaluation is right-continuous; the
    left limit (needed for atom masses and staircase discretization) is
    available via ``log_tail_left``.  All values are logs.
    """

    def __init__(self, segments: Sequence[Segment], *, validate: bool = True):
        segs = chain_segments(segments) if validate else tuple(segments)
        if segs[0].lo != 0.0:
            raise ParameterError(f"support must start at 0, got {segs[0].lo}")
        first = segs[0].log_value_at(0.0)
        if first > 1e-12:
            raise ParameterError(f"tail at 0 exceeds 1: log value {first}")
        if first > 0.0:
            # Roundoff pushed log F(0) a hair above 0; pin it back.
            segs = (segs[0].with_offset(-first), *segs[1:])
        self.segments = segs
        self.support_lo = 0.0
        self.truncation_hi = segs[-1].hi
        self._los = np.array([s.lo for s in segs])
        self._starts = np.array([s.log_value_at(s.lo) for s in segs])
        self._ends = np.array(
            [s.log_value_at(s.hi) if math.isfinite(s.hi) else _NEG_INF for s in segs]
        )

    # ------------------------------------------------------------------ eval

    def _segment_index(self, x: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._los, x, side="right") - 1
        return np.clip(idx, 0, len(self.segments) - 1)

    def log_tail(self, x) -> np.ndarray | float:
        """log F(x); scalar in, scalar out.  x < 0 gives 0.0 (tail is 1)."""
        scalar = np.isscalar(x)
        xa = np.atleast_1d(np.asarray(x, dtype=float))
        if np.any(xa > self.truncation_hi):
            bad = float(xa[xa > self.truncation_hi][0])
            raise TruncationError(
                f"x={bad!r} beyond materialized breakpoint {self.truncation_hi!r}; "
                "refusing to extrapolate"
            )
        out = np.zeros_like(xa)
        pos = xa >= 0
        if np.any(pos):
            xp = xa[pos]
            idx = self._segment_index(xp)
            vals = np.empty_like(xp)
            for k in np.unique(idx):
                mask = idx == k
                vals[mask] = self.segments[k].log_value(xp[mask])
            out[pos] = vals
        return float(out[0]) if scalar else out

    def log_tail_left(self, x: float) -> float:
        """log F(x-): the left limit, which exceeds log F(x) at an atom."""
        if x <= 0:
            return 0.0
        if x > self.truncation_hi:
            raise TruncationError(
                f"x={x!r} beyond materialized breakpoint {self.truncation_hi!r}"
            )
        # If x equals a segment start, evaluate the previous segment at x.
        j = int(np.searchsorted(self._los, x, side="left"))
        if j < len(self._los) and self._los[j] == x and j > 0:
            return self.segments[j - 1].log_value_at(x)
        return float(self.log_tail(x))

    # -------------------------------------------------------------- quantile

    def quantile(self, u) -> np.ndarray | float:
        """Smallest x with F(x) <= u, for u in (0, 1].

        Exact per-segment inversion where closed forms exist, bisection to
        absolute tolerance 1e-12 * (1 + x) otherwise.  u below the tail at
        the truncation point raises TruncationError.
        """
        scalar = np.isscalar(u)
        ua = np.atleast_1d(np.asarray(u, dtype=float))
        if np.any((ua <= 0) | (ua > 1)):
            raise ParameterError("quantile level u must lie in (0, 1]")
        lu = np.log(ua)
        tail_floor = self._ends[-1]
        if np.any(lu < tail_floor):
            raise TruncationError(
                "quantile level below the tail at the truncation point "
                f"(log u < {tail_floor!r})"
            )
        # First segment index k with start log-value <= lu.
        k1 = np.searchsorted(-self._starts, -lu, side="left")
        out = np.empty_like(ua)
        at_start = k1 < len(self.segments)
        # Default: land exactly on a segment start (covers atoms and flats).
        out[at_start] = self._los[np.clip(k1[at_start], 0, len(self._los) - 1)]
        # Land beyond the last start: invert within the final segment.
        interior = np.zeros_like(at_start)
        prev = k1 - 1
        valid_prev = prev >= 0
        lands_inside = np.zeros_like(at_start)
        lands_inside[valid_prev] = lu[valid_prev] >= self._ends[prev[valid_prev]]
        sel = valid_prev & lands_inside
        interior |= sel
        out_idx = np.where(sel, prev, 0)
        overflow = k1 >= len(self.segments)
        # u smaller than every start: must land inside some segment; the
        # tail_floor check above guarantees the last one works.
        need_last = overflow & ~interior
        if np.any(need_last):
            interior |= need_last
            out_idx = np.where(need_last, len(self.segments) - 1, out_idx)
        if np.any(interior):
            for k in np.unique(out_idx[interior]):
                mask = interior & (out_idx == k)
                out[mask] = self._invert_in_segment(int(k), lu[mask])
        return float(out[0]) if scalar else out

    def _invert_in_segment(self, k: int, lu: np.ndarray) -> np.ndarray:
        seg = self.segments[k]
        res = np.empty_like(lu)
        closed = seg.inverse(float(lu[0])) if lu.size else None
        if closed is not None:
            for i, v in enumerate(lu):
                res[i] = seg.inverse(float(v))
            return res
        # Monotone bisection in x.
        hi = seg.hi if math.isfinite(seg.hi) else self._finite_hi_for_bisect(seg, float(np.min(lu)))
        lo_arr = np.full_like(lu, seg.lo)
        hi_arr = np.full_like(lu, hi)
        for _ in range(200):
            mid = 0.5 * (lo_arr + hi_arr)
            vals = seg.log_value(mid)
            too_high = vals > lu  # tail still above u: move right
            lo_arr = np.where(too_high, mid, lo_arr)
            hi_arr = np.where(too_high, hi_arr, mid)
            if np.all(hi_arr - lo_arr <= 1e-12 * (1.0 + np.abs(hi_arr))):
                break
        return hi_arr

    @staticmethod
    def _finite_hi_for_bisect(seg: Segment, target: float) -> float:
        hi = max(seg.lo + 1.0, 1.0)
        for _ in range(400):
            if seg.log_value_at(hi) <= target:
                return hi
            hi *= 2.0
        raise ParameterError("failed to bracket quantile on an infinite segment")

    # ------------------------------------------------------------- integrals

    def breakpoints(self) -> np.ndarray:
        pts = [s.lo for s in self.segments]
        if math.isfinite(self.truncation_hi):
            pts.append(self.truncation_hi)
        return np.array(pts)

    def log_integral_range(self, a: float, b: float, cfg: QuadConfig | None = None) -> float:
        """log of integral_a^b F(y) dy, exact per segment where closed form
        exists and adaptive Gauss-Kronrod otherwise."""
        return self.log_moment_range(0, a, b, cfg)

    def log_moment_range(self, k: int, a: float, b: float, cfg: QuadConfig | None = None) -> float:
        """log of integral_a^b y^k F(y) dy over [a, b] within the support."""
        cfg = cfg or QuadConfig()
        if b < a:
            raise ParameterError(f"integration bounds out of order: [{a}, {b}]")
        a = max(a, 0.0)
        b = min(b, self.truncation_hi)
        if b <= a:
            return _NEG_INF
        pieces: list[float] = []
        for seg in self.segments:
            s_lo = max(a, seg.lo)
            s_hi = min(b, seg.hi)
            if s_hi <= s_lo:
                continue
            pieces.append(self._segment_log_moment(seg, k, s_lo, s_hi, cfg))
        return _logsumexp_list(pieces)

    def _segment_log_moment(
        self, seg: Segment, k: int, a: float, b: float, cfg: QuadConfig
    ) -> float:
        if k == 0:
            exact = seg.log_integral(a, b)
            if exact is not None:
                return exact
        elif isinstance(seg, ConstSegment):
            # integral y^k on [a, b] in logs; b can be astronomically large.
            kk = k + 1.0
            la = kk * math.log(a) if a > 0 else _NEG_INF
            lb = kk * math.log(b)
            return seg.log_value_at(a) + logsubexp(lb, la) - math.log(kk)

        def integrand(y: np.ndarray) -> np.ndarray:
            vals = seg.log_value(y)
            if k:
                with np.errstate(divide="ignore"):
                    vals = vals + k * np.log(y)
            return vals

        return log_quad(integrand, a, b, cfg=cfg).log_value


def _logsumexp_list(values: list[float]) -> float:
    finite = [v for v in values if v > _NEG_INF]
    if not finite:
        return _NEG_INF
    m = max(finite)
    return m + math.log(sum(math.exp(v - m) for v in finite))
