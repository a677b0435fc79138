"""Rejection-sampling estimation of the single-big-jump conditional
probability, plus the MC-versus-quadrature cross-validation harness.

Monte Carlo exists here as an *independent oracle* for the bracket route at
moderate thresholds, so it deliberately stays plain: inverse-transform
sampling, rejection on {S_n > x}, no importance sampling (an IS scheme would
share assumptions with the code it is meant to check).

Streams: scenario i draws from SeedSequence(seed, spawn_key=(i,)) and chunk
c of a run from spawn_key=(..., c), so results are bit-reproducible for a
fixed (seed, N) and adding scenarios or extending N never perturbs earlier
draws.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .distribution import Distribution
from .errors import LowAcceptanceError, ParameterError
from .functionals import jump_cond

__all__ = ["McEstimate", "mc_jump_cond", "ComparisonRow", "ComparisonTable", "mc_vs_quadrature"]

_CHUNK = 65536
_PILOT_CAP = 500_000


@dataclass(frozen=True)
class McEstimate:
    """Conditional-probability estimate with its binomial standard error."""

    estimate: float
    std_error: float
    accepted: int
    total: int
    seed: int

    def __post_init__(self):
        if not (0.0 <= self.estimate <= 1.0):
            raise ParameterError(f"estimate out of [0,1]: {self.estimate}")
        if self.accepted > self.total:
            raise ParameterError("accepted > total")


def _chunk_streams(base: np.random.SeedSequence, count: int) -> list[np.random.SeedSequence]:
    return [
        np.random.SeedSequence(entropy=base.entropy, spawn_key=base.spawn_key + (c,))
        for c in range(count)
    ]


def mc_jump_cond(
    d: Distribution,
    n: int,
    x: float,
    K: float,
    N: int,
    seed: int | np.random.SeedSequence,
    acceptance_floor: float = 1e-4,
) -> McEstimate:
    """Estimate P(X_{n,1} > x - K | S_n > x) from N rejection-sampled tuples.

    A pilot run checks that the acceptance probability P(S_n > x) clears
    ``acceptance_floor``; below it the quadrature/bracket route is the right
    tool and LowAcceptanceError says so.
    """
    if N < 1:
        raise ParameterError(f"sample count must be >= 1, got {N}")
    if n < 1:
        raise ParameterError(f"fold count must be >= 1, got {n}")
    base = seed if isinstance(seed, np.random.SeedSequence) else np.random.SeedSequence(seed)
    seed_tag = int(base.entropy) if isinstance(base.entropy, int) else 0

    threshold = x - K  # max > threshold; threshold <= 0 makes the event sure

    def run_chunk(ss: np.random.SeedSequence, size: int) -> tuple[int, int]:
        rng = np.random.Generator(np.random.PCG64(ss))
        u = 1.0 - rng.random((size, n))
        xs = np.asarray(d.tail.quantile(u.ravel())).reshape(size, n)
        sums = xs.sum(axis=1)
        accepted = sums > x
        if threshold <= 0:
            return int(np.sum(accepted)), int(np.sum(accepted))
        events = accepted & (xs.max(axis=1) > threshold)
        return int(np.sum(accepted)), int(np.sum(events))

    # Pilot sized to resolve the floor (about 10 expected hits at the floor);
    # floors too small to certify cheaply skip the pilot and rely on the
    # zero-accepted guard below.
    pilot_n = int(math.ceil(10.0 / acceptance_floor)) if acceptance_floor > 0 else 0
    if 0 < pilot_n <= _PILOT_CAP:
        pilot_ss = np.random.SeedSequence(
            entropy=base.entropy, spawn_key=base.spawn_key + (0xFFFF,)
        )
        acc, _ = run_chunk(pilot_ss, pilot_n)
        pilot_rate = acc / pilot_n
        if pilot_rate < acceptance_floor:
            raise LowAcceptanceError(
                f"pilot acceptance {pilot_rate:.2e} below floor {acceptance_floor:.0e} "
                f"for P(S_{n} > {x}); use the quadrature/bracket route",
                pilot_acceptance=pilot_rate,
            )

    n_chunks = (N + _CHUNK - 1) // _CHUNK
    accepted = 0
    events = 0
    for c, ss in enumerate(_chunk_streams(base, n_chunks)):
        size = min(_CHUNK, N - c * _CHUNK)
        a, e = run_chunk(ss, size)
        accepted += a
        events += e
    if accepted == 0:
        raise LowAcceptanceError(
            f"no accepted tuples among {N} draws for P(S_{n} > {x})",
            pilot_acceptance=0.0,
        )
    p = events / accepted
    se = math.sqrt(p * (1.0 - p) / accepted)
    return McEstimate(estimate=p, std_error=se, accepted=accepted, total=N, seed=seed_tag)


# ------------------------------------------------------- comparison harness


@dataclass(frozen=True)
class ComparisonRow:
    n: int
    x: float
    K: float
    estimate: float | None
    std_error: float | None
    bracket_lower: float | None
    bracket_upper: float | None
    z: float | None
    flagged: bool
    error: str | None = None


@dataclass(frozen=True)
class ComparisonTable:
    rows: tuple[ComparisonRow, ...]
    z_flag: float

    @property
    def flags(self) -> tuple[int, ...]:
        return tuple(i for i, r in enumerate(self.rows) if r.flagged)

    def max_abs_z(self) -> float:
        zs = [abs(r.z) for r in self.rows if r.z is not None]
        return max(zs) if zs else 0.0


def _default_bracket_step(x: float) -> float:
    """Power-of-two step near x/2000: binary-exact nodes keep dyadic atoms
    on the grid, which collapses their bracket width to zero."""
    return 2.0 ** math.floor(math.log2(max(x, 1e-6) / 2000.0))


def mc_vs_quadrature(
    d: Distribution,
    scenarios: Sequence[tuple[int, float, float]],
    N: int,
    seed: int,
    h: float | None = None,
    z_flag: float = 4.0,
    acceptance_floor: float = 1e-4,
    bias_injection: Mapping[int, float] | None = None,
) -> ComparisonTable:
    """Run every (n, x, K) scenario through both routes and z-score them.

    z = (MC estimate - bracket midpoint) / sqrt(SE_ac^2 + (width/2)^2),
    where SE_ac is the Agresti-Coull adjusted standard error (two pseudo
    successes and failures), which stays positive at empirical rates of 0
    or 1 where the plain binomial SE degenerates.  Rows with |z| > z_flag
    are flagged.  Per-scenario errors are recorded in the table, not
    raised.  ``bias_injection`` maps row index -> additive bias, a
    self-test hook for verifying that the harness flags what it should.
    """
    rows: list[ComparisonRow] = []
    for i, (n, x, K) in enumerate(scenarios):
        try:
            stream = np.random.SeedSequence(entropy=seed, spawn_key=(i,))
            est = mc_jump_cond(d, n, float(x), float(K), N, stream, acceptance_floor)
            step = h if h is not None else _default_bracket_step(float(x))
            bracket = jump_cond(d, n, float(x), float(K), step)
            value = est.estimate + (bias_injection.get(i, 0.0) if bias_injection else 0.0)
            events = est.estimate * est.accepted
            p_adj = (events + 2.0) / (est.accepted + 4.0)
            se_ac = math.sqrt(p_adj * (1.0 - p_adj) / (est.accepted + 4.0))
            se_eff = math.sqrt(se_ac**2 + (bracket.width / 2.0) ** 2)
            if se_eff == 0.0:
                z = 0.0 if value == bracket.mid else math.inf
            else:
                z = (value - bracket.mid) / se_eff
            rows.append(
                ComparisonRow(
                    n=n,
                    x=float(x),
                    K=float(K),
                    estimate=value,
                    std_error=est.std_error,
                    bracket_lower=bracket.lower,
                    bracket_upper=bracket.upper,
                    z=z,
                    flagged=abs(z) > z_flag,
                )
            )
        except Exception as exc:  # recorded, not thrown, per contract
            rows.append(
                ComparisonRow(
                    n=n,
                    x=float(x),
                    K=float(K),
                    estimate=None,
                    std_error=None,
                    bracket_lower=None,
                    bracket_upper=None,
                    z=None,
                    flagged=True,
                    error=f"{type(exc).__name__}: {exc}",
                )
            )
    return ComparisonTable(tuple(rows), z_flag)
