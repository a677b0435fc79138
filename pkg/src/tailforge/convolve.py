"""Convolution tails: exact two-fold Stieltjes quadrature and certified
n-fold grid brackets.

Two independent routes are deliberately kept apart and cross-checked by the
test suite: ``conv2_tail`` evaluates the Stieltjes integral of the tail
against dF directly, while ``g_conv2_identity_residual`` reconciles the
tilted two-fold tail with the identity

    G2bar(x) = (F2bar(x) + 2 gamma * int_{x/2}^x F(x-y) F(y) dy) e^{-gamma x},

so disagreement between quadratures is a detectable failure, not silent
error.  The n-fold route discretizes the measure into upper and lower
staircases (mass in a cell pushed to its upper, resp. lower, edge; atoms on
grid nodes assigned exactly) so that the true tail is enclosed between two
computable discrete tails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .distribution import Distribution
from .errors import GridGuardError, ParameterError, TruncationError
from .quadrature import QuadConfig, log_quad
from .transform import gamma_transform

__all__ = [
    "BracketGrid",
    "cross_integral",
    "log_cross_integral",
    "conv2_tail",
    "log_conv2_tail",
    "g_conv2_identity_residual",
    "convn_tail_grid",
    "trunc_convn_tail_grid",
    "MAX_FOLDS",
    "MAX_CELLS",
]

_NEG_INF = float("-inf")
MAX_FOLDS = 8
MAX_CELLS = 2_000_000


# ----------------------------------------------------------- cross integral


def _cross_breakpoints(d: Distribution, A: float, B: float, x: float) -> np.ndarray:
    bps = d.tail.breakpoints()
    own = bps[(bps > A) & (bps < B)]
    mirrored = x - bps
    mirrored = mirrored[(mirrored > A) & (mirrored < B)]
    return np.unique(np.concatenate([own, mirrored]))


def log_cross_integral(
    d: Distribution, A: float, B: float, x: float, cfg: QuadConfig | None = None
) -> float:
    """log of integral_A^B F(x - y) F(y) dy for 0 <= A <= B <= x."""
    cfg = cfg or QuadConfig()
    if not (0 <= A <= B <= x):
        raise ParameterError(f"need 0 <= A <= B <= x, got A={A}, B={B}, x={x}")
    if x > d.tail.truncation_hi:
        raise TruncationError(
            f"x={x!r} beyond materialized breakpoint {d.tail.truncation_hi!r}"
        )
    if A == B:
        return _NEG_INF
    curve = d.tail

    def integrand(y: np.ndarray) -> np.ndarray:
        return curve.log_tail(y) + curve.log_tail(x - y)

    return log_quad(integrand, A, B, breakpoints=_cross_breakpoints(d, A, B, x), cfg=cfg).log_value


def cross_integral(
    d: Distribution, A: float, B: float, x: float, cfg: QuadConfig | None = None
) -> float:
    """integral_A^B F(x - y) F(y) dy.  May underflow to 0.0 for extreme x;
    ratio diagnostics use the log route internally."""
    lv = log_cross_integral(d, A, B, x, cfg)
    return math.exp(lv) if lv > _NEG_INF else 0.0


# ----------------------------------------------------------- two-fold tails


def log_conv2_tail(d: Distribution, x: float, cfg: QuadConfig | None = None) -> float:
    """log of F2bar(x) = F(x) + int_{[0, x]} F(x - y) F(dy)."""
    cfg = cfg or QuadConfig()
    if x < 0:
        return 0.0
    if x > d.tail.truncation_hi:
        raise TruncationError(
            f"x={x!r} beyond materialized breakpoint {d.tail.truncation_hi!r}"
        )
    curve = d.tail
    pieces: list[float] = [curve.log_tail(x)]
    for atom in d.parts.atoms:
        if atom.location <= x:
            pieces.append(atom.log_mass + curve.log_tail(x - atom.location))
    bps = curve.breakpoints()
    for piece in d.parts.density_pieces:
        lo = piece.lo
        hi = min(piece.hi, x)
        if hi <= lo:
            continue

        def integrand(y: np.ndarray, _p=piece) -> np.ndarray:
            return _p.log_pdf(y) + curve.log_tail(x - y)

        inner = np.concatenate([bps, x - bps])
        inner = inner[(inner > lo) & (inner < hi)]
        pieces.append(log_quad(integrand, lo, hi, breakpoints=inner, cfg=cfg).log_value)
    finite = [p for p in pieces if p > _NEG_INF]
    if not finite:
        return _NEG_INF
    m = max(finite)
    return m + math.log(sum(math.exp(p - m) for p in finite))


def conv2_tail(d: Distribution, x: float, cfg: QuadConfig | None = None) -> float:
    """Two-fold convolution tail F2bar(x)."""
    lv = log_conv2_tail(d, x, cfg)
    return math.exp(lv) if lv > _NEG_INF else 0.0


def g_conv2_identity_residual(
    d: Distribution, gamma: float, x: float, cfg: QuadConfig | None = None
) -> float:
    """Relative residual between the two routes to the tilted two-fold tail.

    Route 1 computes G2bar(x) by direct Stieltjes quadrature on the tilted
    distribution; route 2 reconstructs it from untilted quantities via the
    exact identity above.  Returns |route2/route1 - 1|.
    """
    if x < 0 or gamma <= 0:
        raise ParameterError(f"need x >= 0 and gamma > 0, got x={x}, gamma={gamma}")
    cfg = cfg or QuadConfig()
    g = gamma_transform(d, gamma)
    lr1 = log_conv2_tail(g, x, cfg)
    if x == 0:
        lf = log_conv2_tail(d, 0.0, cfg)
        return abs(math.expm1(lf - lr1))
    lcross = log_cross_integral(d, x / 2.0, x, x, cfg)
    lf2 = log_conv2_tail(d, x, cfg)
    stacked = np.logaddexp(lf2, math.log(2.0 * gamma) + lcross)
    lr2 = stacked - gamma * x
    return abs(math.expm1(lr2 - lr1))


# ------------------------------------------------------------ grid brackets


@dataclass(frozen=True)
class BracketGrid:
    """Certified log-tail bounds for an n-fold convolution on a step grid.

    ``log_lower[k] <= log F*n(grid[k]) <= log_upper[k]`` for every node;
    -inf marks a provably zero tail.  ``h`` is the discretization step,
    ``cap`` the per-summand truncation point (inf when absent).
    """

    grid: np.ndarray
    log_lower: np.ndarray
    log_upper: np.ndarray
    n: int
    h: float
    cap: float = math.inf

    def __post_init__(self):
        if np.any(self.log_lower > self.log_upper + 1e-12):
            raise ParameterError("bracket invariant violated: lower > upper")

    def at(self, x: float) -> tuple[float, float]:
        """(lower, upper) probability bounds for P(S_n > x), any x in range."""
        if x < self.grid[0] or x > self.grid[-1]:
            raise ParameterError(f"x={x} outside bracket grid [{self.grid[0]}, {self.grid[-1]}]")
        k = int(np.searchsorted(self.grid, x, side="left"))
        if self.grid[k] == x:
            lo = math.exp(self.log_lower[k]) if self.log_lower[k] > _NEG_INF else 0.0
            up = math.exp(self.log_upper[k]) if self.log_upper[k] > _NEG_INF else 0.0
            return lo, up
        # Between nodes: tails are nonincreasing, so bound by neighbors.
        lo = math.exp(self.log_lower[k]) if self.log_lower[k] > _NEG_INF else 0.0
        up = math.exp(self.log_upper[k - 1]) if self.log_upper[k - 1] > _NEG_INF else 0.0
        return lo, up

    def width_at(self, x: float) -> float:
        lo, up = self.at(x)
        return up - lo


def _staircase_masses(d: Distribution, x_max: float, h: float, cap: float):
    """Upper/lower staircase PMFs on nodes j*h, j = 0..M, plus overflow.

    Returns (pmf_down, pmf_up, overflow) where overflow applies to both
    staircases (mass at or beyond the last node, and beyond cap it is
    dropped entirely).
    """
    M = int(math.ceil(x_max / h - 1e-12))
    if M + 1 > MAX_CELLS:
        raise GridGuardError(
            f"x_max/h = {x_max / h:.3e} exceeds the cell limit {MAX_CELLS}"
        )
    nodes = np.arange(M + 1) * h
    trunc = d.tail.truncation_hi
    if nodes[-1] > trunc:
        raise TruncationError(
            f"grid reaches {nodes[-1]!r}, beyond materialized breakpoint {trunc!r}"
        )
    # Left-limit tails at the nodes: right-continuous tail plus any atom
    # sitting exactly on the node.
    t_left = np.exp(np.atleast_1d(d.tail.log_tail(nodes)))
    atom_on_node = np.zeros(M + 1)
    for a in d.parts.atoms:
        if a.location > nodes[-1]:
            continue
        j = int(round(a.location / h))
        if 0 <= j <= M and nodes[j] == a.location:
            mass = math.exp(a.log_mass)
            t_left[j] += mass
            if a.location <= cap:
                atom_on_node[j] = mass
    fbar_cap = 0.0
    if math.isfinite(cap):
        if cap > trunc:
            raise TruncationError(f"cap={cap!r} beyond materialized breakpoint {trunc!r}")
        fbar_cap = math.exp(d.tail.log_tail(cap))
    s = np.maximum(t_left - fbar_cap, 0.0)
    masses = np.maximum(s[:-1] - s[1:], 0.0)  # cell [v_j, v_{j+1})
    overflow = float(s[-1])
    atom_cell = atom_on_node[:-1]
    atom_cell = np.minimum(atom_cell, masses)
    pmf_down = np.zeros(M + 1)
    pmf_down[:-1] = masses
    pmf_up = np.zeros(M + 1)
    pmf_up[1:] = masses - atom_cell
    pmf_up[:-1] += atom_cell
    return pmf_down, pmf_up, overflow


def _convolve_defective(p1, o1, p2, o2, M):
    full = np.convolve(p1, p2)
    grid = full[: M + 1].copy()
    spill = float(full[M + 1 :].sum())
    t1 = float(p1.sum()) + o1
    t2 = float(p2.sum()) + o2
    overflow = spill + o1 * t2 + o2 * t1 - o1 * o2
    return grid, overflow


def _tails_from_pmf(pmf: np.ndarray, overflow: float) -> np.ndarray:
    # tail[k] = P(S > v_k) = sum_{j > k} pmf[j] + overflow
    rev = np.cumsum(pmf[::-1])[::-1]
    tail = np.empty_like(pmf)
    tail[:-1] = rev[1:]
    tail[-1] = 0.0
    return tail + overflow


def _bracket(d: Distribution, n: int, x_max: float, h: float, cap: float) -> BracketGrid:
    if n < 2 or n != int(n):
        raise ParameterError(f"fold count must be an integer >= 2, got {n}")
    if n > MAX_FOLDS:
        raise ParameterError(f"fold count {n} beyond configured cap {MAX_FOLDS}")
    if h <= 0:
        raise ParameterError(f"step must be positive, got {h}")
    pmf_down, pmf_up, overflow = _staircase_masses(d, x_max, h, cap)
    M = len(pmf_down) - 1
    acc_d, ov_d = pmf_down, overflow
    acc_u, ov_u = pmf_up, overflow
    for _ in range(n - 1):
        acc_d, ov_d = _convolve_defective(acc_d, ov_d, pmf_down, overflow, M)
        acc_u, ov_u = _convolve_defective(acc_u, ov_u, pmf_up, overflow, M)
    tail_d = _tails_from_pmf(acc_d, ov_d)
    tail_u = _tails_from_pmf(acc_u, ov_u)
    # Round outward by the roundoff the convolution arithmetic itself can
    # accumulate (~n * M correctly-rounded adds), so containment of the true
    # tail survives float summation order.
    margin = 4.0 * np.finfo(float).eps * n * max(M, 1)
    with np.errstate(divide="ignore"):
        log_lower = np.log(np.maximum(tail_d, 0.0)) + math.log1p(-margin)
        log_upper = np.log(np.maximum(tail_u, 0.0)) + math.log1p(margin)
    log_upper = np.maximum(log_upper, log_lower)
    nodes = np.arange(M + 1) * h
    return BracketGrid(nodes, log_lower, log_upper, n=n, h=h, cap=cap)


def convn_tail_grid(d: Distribution, n: int, x_max: float, h: float) -> BracketGrid:
    """Certified bracket for the n-fold convolution tail on nodes j*h.

    The lower staircase floors each summand to its cell's lower edge, the
    upper staircase ceils it (atoms on nodes stay put), so the true tail of
    S_n lies between the two discrete tails at every node.
    """
    return _bracket(d, n, x_max, h, math.inf)


def trunc_convn_tail_grid(
    d: Distribution, n: int, cap: float, x_max: float, h: float
) -> BracketGrid:
    """Bracket for the n-fold convolution of d restricted to [0, cap].

    The restricted measure is defective with total mass F(cap); the bracket
    bounds P(all summands <= cap, S_n > x).
    """
    if cap <= 0:
        raise ParameterError(f"cap must be positive, got {cap}")
    return _bracket(d, n, x_max, h, cap)
