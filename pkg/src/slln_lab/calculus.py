"""Numerical witnesses for the chain of series bounds behind the heavy part.

The core object is the truncated power moment of the envelope-dominated
base variable v: with w_n = min(v, n),

    E w_n**p = integral_0^n p s**(p-1) G(s) ds + n**p G(n)

(G is the envelope; equality holds for the extremal law).  Summing over n
with weight n**-p gives two series, here called A (the integral part) and
B (the boundary part), each of which must stay under its closed-form bound:

    A <= p/(p-1) * C,   B <= integral_2^inf G <= C,   A + B <= (2p-1)/(p-1) * C,

where C is the envelope integral.  Every series is evaluated as an exact
partial sum plus an analytic remainder bound (never bare truncation), using
the tail estimate  sum_{n>=m} n**-p <= (m-1)**(1-p) / (p-1).

A violated bound raises :class:`~slln_lab.errors.BoundViolation`; since the
inequalities are theorems for the built-in envelopes, that means a bug.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.special as sp

from .errors import BoundViolation, SearchExhausted
from .generators import EnvelopeKind, TailEnvelope
from .quadrature import integrate_piecewise
from .rng import Channel, StreamKey, derive_stream
from .schedules import MomentSchedule, y_insertion_positions

BOUND_TOL = 1e-8  # slack below which a bound counts as violated
DEFAULT_TRUNCATION = 10 ** 6
DEFAULT_PS = (1.01, 1.5, 2.0, 3.0, 10.0)


def envelope_power_integral(envelope: TailEnvelope, n, p: float):
    """Closed form of integral_0^x p s**(p-1) G(s) ds for scalar or array x >= 0."""
    if p <= 0:
        raise ValueError("p must be positive")
    scalar = np.isscalar(n)
    x = np.asarray(n, dtype=np.float64)
    if np.any(x < 0):
        raise ValueError("upper limit must be >= 0")
    if envelope.kind is EnvelopeKind.EXP:
        out = sp.gamma(p + 1.0) * sp.gammainc(p, x)
    else:
        g = envelope.gamma
        out = np.where(x <= 1.0, np.power(x, p), 0.0)
        big = x > 1.0
        if np.any(big):
            xb = np.maximum(x, 1.0)
            if abs(p - g) < 1e-12:
                tail = 1.0 + p * np.log(xb)
            else:
                tail = 1.0 + p / (p - g) * (np.power(xb, p - g) - 1.0)
            out = np.where(big, tail, out)
    return float(out) if scalar else out


def truncated_power_moment(envelope: TailEnvelope, n: float, p: float, tol: float = 1e-9) -> float:
    """E min(v, n)**p by quadrature: body integral plus boundary term n**p G(n).

    Quadrature runs piecewise between the envelope kinks; tolerance is
    relative to the result.  n = 0 returns 0 (empty integral).
    """
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    if n < 0:
        raise ValueError("n must be >= 0")
    if n == 0:
        return 0.0
    points = sorted({0.0, float(n)} | {b for b in envelope.survival_breakpoints() if 0.0 < b < n})
    # absolute tolerance from a cheap first pass
    coarse = integrate_piecewise(lambda s: p * s ** (p - 1.0) * envelope.survival(s), points, tol=1e-6)
    scale = max(abs(coarse), 1.0)
    body = integrate_piecewise(
        lambda s: p * s ** (p - 1.0) * envelope.survival(s), points, tol=tol * scale
    )
    return body + float(n) ** p * envelope.survival(float(n))


@dataclass
class BoundCheck:
    """One evaluated series against its analytic bound."""

    name: str
    envelope_label: str
    p: float | None
    value: float          # partial sum + analytic remainder bound
    partial: float
    remainder: float
    bound: float
    truncation: int

    @property
    def slack(self) -> float:
        return self.bound - self.value

    def enforce(self) -> "BoundCheck":
        if self.value > self.bound + BOUND_TOL:
            raise BoundViolation(
                f"{self.name}[{self.envelope_label}, p={self.p}]: "
                f"value {self.value!r} exceeds bound {self.bound!r}"
            )
        return self

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "envelope": self.envelope_label,
            "p": self.p,
            "value": self.value,
            "bound": self.bound,
            "slack": self.slack,
            "partial": self.partial,
            "remainder": self.remainder,
            "truncation": self.truncation,
        }


def _envelope_label(envelope: TailEnvelope) -> str:
    if envelope.kind is EnvelopeKind.EXP:
        return "exp"
    return f"pareto({envelope.gamma:g})"


def _zeta_tail_bound(m: float, p: float) -> float:
    """sum_{n>=m} n**-p <= (m-1)**(1-p) / (p-1) for p > 1, m >= 2."""
    return (m - 1.0) ** (1.0 - p) / (p - 1.0)


def series_bound_A(
    envelope: TailEnvelope, p: float, truncation: int = DEFAULT_TRUNCATION
) -> BoundCheck:
    """Weighted series of body integrals: sum_{n>=3} n**-p I(n) vs p/(p-1) * C.

    Remainder past the truncation point T comes from swapping the sum and the
    integral: contributions with s <= T pair with the zeta tail from T+1,
    contributions with s > T are bounded by p/(p-1) * (1+1/T)**(p-1) times
    the envelope tail integral from T.
    """
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    if truncation < 3:
        raise ValueError("truncation must be >= 3")
    n = np.arange(3, truncation + 1, dtype=np.float64)
    partial = float(np.sum(n ** (-p) * envelope_power_integral(envelope, n, p)))
    head = envelope_power_integral(envelope, float(truncation), p) * _zeta_tail_bound(truncation + 1.0, p)
    far = (
        p / (p - 1.0)
        * ((truncation + 1.0) / truncation) ** (p - 1.0)
        * envelope.tail_integral(float(truncation))
    )
    remainder = head + far
    return BoundCheck(
        name="series_A",
        envelope_label=_envelope_label(envelope),
        p=p,
        value=partial + remainder,
        partial=partial,
        remainder=remainder,
        bound=p / (p - 1.0) * envelope.integral(),
        truncation=truncation,
    ).enforce()


def series_bound_B(envelope: TailEnvelope, truncation: int = DEFAULT_TRUNCATION) -> BoundCheck:
    """Boundary series sum_{n>=3} G(n) vs the envelope integral.

    The nonincreasing envelope gives G(n) <= integral_{n-1}^n G, so the
    series is below the envelope integral from 2 (recorded as the partial
    bound) and in particular below the full integral, which is asserted.
    """
    if truncation < 3:
        raise ValueError("truncation must be >= 3")
    n = np.arange(3, truncation + 1, dtype=np.float64)
    partial = float(np.sum(envelope.survival(n)))
    remainder = envelope.tail_integral(float(truncation))
    return BoundCheck(
        name="series_B",
        envelope_label=_envelope_label(envelope),
        p=None,
        value=partial + remainder,
        partial=partial,
        remainder=remainder,
        bound=envelope.integral(),
        truncation=truncation,
    ).enforce()


def integral_bound_B(envelope: TailEnvelope) -> float:
    """The sharper analytic bound on the boundary series, integral_2^inf G."""
    return envelope.tail_integral(2.0)


def combined_series_bound(
    envelope: TailEnvelope, p: float, truncation: int = DEFAULT_TRUNCATION
) -> BoundCheck:
    """A + B against (2p-1)/(p-1) times the envelope integral."""
    a = series_bound_A(envelope, p, truncation)
    b = series_bound_B(envelope, truncation)
    return BoundCheck(
        name="series_A_plus_B",
        envelope_label=a.envelope_label,
        p=p,
        value=a.value + b.value,
        partial=a.partial + b.partial,
        remainder=a.remainder + b.remainder,
        bound=(2.0 * p - 1.0) / (p - 1.0) * envelope.integral(),
        truncation=truncation,
    ).enforce()


def bound_suite(
    envelopes: Sequence[TailEnvelope] | None = None,
    ps: Sequence[float] = DEFAULT_PS,
    truncation: int = DEFAULT_TRUNCATION,
) -> list[dict]:
    """All three bound checks over the envelope/exponent grid, as CSV-ready rows."""
    if envelopes is None:
        envelopes = (
            TailEnvelope.exponential(),
            TailEnvelope.pareto(1.5),
            TailEnvelope.pareto(2.0),
        )
    rows = []
    for env in envelopes:
        for p in ps:
            a = series_bound_A(env, p, truncation)
            b = series_bound_B(env, truncation)
            c = combined_series_bound(env, p, truncation)
            rows.append(
                {
                    "envelope": a.envelope_label,
                    "p": p,
                    "A": a.value,
                    "bound_A": a.bound,
                    "slack_A": a.slack,
                    "B": b.value,
                    "bound_B": b.bound,
                    "slack_B": b.slack,
                    "combined": c.value,
                    "bound_combined": c.bound,
                    "slack_combined": c.slack,
                }
            )
    return rows


def block_tail_bound(envelope: TailEnvelope, n_start: int, p: float) -> float:
    """Analytic upper bound on sum_{n > n_start} E min(v,n)**p / n**p."""
    if p <= 1.0:
        raise ValueError("p must exceed 1")
    if n_start < 1:
        raise ValueError("n_start must be >= 1")
    t = float(n_start)
    head = envelope_power_integral(envelope, t, p) * _zeta_tail_bound(t + 1.0, p)
    far = p / (p - 1.0) * ((t + 1.0) / t) ** (p - 1.0) * envelope.tail_integral(t)
    boundary = envelope.tail_integral(t)  # sum_{n>t} G(n) <= integral_t^inf G
    return head + far + boundary


@dataclass
class BlockSchedule:
    """Strictly increasing block boundaries with their exponents.

    ``boundaries[k-1]`` is the least index whose series tail bound drops
    below 1/k**2 at exponent ``exponents[k-1]``; ``step_exponent`` is the
    piecewise-constant exponent map induced by the blocks.
    """

    boundaries: list[int]
    exponents: list[float]
    tail_bounds: list[float]

    def step_exponent(self, n: int) -> float:
        """Exponent in force at index n (first block's exponent before it)."""
        if n <= self.boundaries[0]:
            return self.exponents[0]
        lo, hi = 0, len(self.boundaries) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.boundaries[mid] < n:
                lo = mid
            else:
                hi = mid - 1
        return self.exponents[lo]


def build_block_schedule(
    envelope: TailEnvelope,
    schedule: MomentSchedule,
    k_max: int,
    search_cap: int = 10 ** 12,
) -> BlockSchedule:
    """Find the least block boundaries making each tail bound drop below 1/k**2.

    The k-th exponent is the reciprocal of the schedule value at index k and
    must exceed 1.  Boundaries are forced strictly increasing.  Raises
    :class:`SearchExhausted` past ``search_cap`` (the construction only
    promises existence, not smallness).
    """
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    boundaries: list[int] = []
    exponents: list[float] = []
    tails: list[float] = []
    prev = 0
    for k in range(1, k_max + 1):
        a_k = schedule.value(k)
        if a_k >= 1.0:
            raise ValueError(f"schedule value at index {k} is {a_k}; exponent 1/a must exceed 1")
        p_k = 1.0 / a_k
        target = 1.0 / k ** 2
        lo = prev + 1
        if block_tail_bound(envelope, lo, p_k) < target:
            found = lo
        else:
            hi = lo
            while block_tail_bound(envelope, hi, p_k) >= target:
                hi *= 2
                if hi > search_cap:
                    raise SearchExhausted(
                        f"block boundary {k} not found below cap {search_cap}"
                    )
            lo_k, hi_k = max(lo, hi // 2), hi
            while lo_k < hi_k:
                mid = (lo_k + hi_k) // 2
                if block_tail_bound(envelope, mid, p_k) < target:
                    hi_k = mid
                else:
                    lo_k = mid + 1
            found = lo_k
        boundaries.append(found)
        exponents.append(p_k)
        tails.append(block_tail_bound(envelope, found, p_k))
        prev = found
    return BlockSchedule(boundaries=boundaries, exponents=exponents, tail_bounds=tails)


@dataclass
class WeightedSeriesResult:
    partial_sums: np.ndarray
    total: float
    last_decade_increment: float  # relative
    converged: bool


def weighted_y_series(
    y_abs: np.ndarray,
    exponents: np.ndarray,
    increment_tol: float = 1e-3,
) -> WeightedSeriesResult:
    """Partial sums of sum_k |y_k| / k**(1/a_k), with a convergence diagnostic.

    The diagnostic compares the mass added over the last decade of indices
    to the total: a relative increment under ``increment_tol`` counts as
    numerically converged.
    """
    y = np.asarray(y_abs, dtype=np.float64)
    a = np.asarray(exponents, dtype=np.float64)
    if y.shape != a.shape or y.ndim != 1 or y.size == 0:
        raise ValueError("y values and exponents must be matching nonempty 1-d arrays")
    if np.any(y < 0):
        raise ValueError("y values must be absolute values")
    k = np.arange(1, y.size + 1, dtype=np.float64)
    sums = np.cumsum(y / np.power(k, 1.0 / a))
    total = float(sums[-1])
    decade_start = max(y.size // 10, 1)
    if total > 0.0:
        increment = float((sums[-1] - sums[decade_start - 1]) / sums[-1])
    else:
        increment = 0.0
    return WeightedSeriesResult(
        partial_sums=sums,
        total=total,
        last_decade_increment=increment,
        converged=increment < increment_tol,
    )


@dataclass
class WeightedSeriesEnsemble:
    n_paths: int
    k_max: int
    fraction_converged: float
    increments: np.ndarray


def weighted_y_series_ensemble(
    envelope: TailEnvelope,
    schedule: MomentSchedule,
    c: float,
    k_max: int,
    n_paths: int,
    master_seed: int = 0,
    increment_tol: float = 1e-3,
) -> WeightedSeriesEnsemble:
    """Convergence rate of the weighted heavy series across simulated paths.

    Exponents come from the insert positions of the AUTO sparsity pattern
    (found in closed form, far beyond any materializable horizon); each path
    draws its base variables independently from its own derived stream.
    """
    positions = np.asarray(y_insertion_positions(schedule, c, k_max), dtype=np.float64)
    exponents = schedule.value(positions)
    increments = np.empty(n_paths, dtype=np.float64)
    converged = 0
    for i in range(n_paths):
        stream = derive_stream(StreamKey(master_seed, i, Channel.Y))
        v = envelope.sample_v(stream.uniforms(k_max))
        y = np.power(v, 1.0 / exponents)
        res = weighted_y_series(y, exponents, increment_tol)
        increments[i] = res.last_decade_increment
        converged += int(res.converged)
    return WeightedSeriesEnsemble(
        n_paths=n_paths,
        k_max=k_max,
        fraction_converged=converged / n_paths,
        increments=increments,
    )


@dataclass
class KroneckerReport:
    """Numeric reading of the series-to-average conversion.

    ``status`` is PASS when the weighted series looks Cauchy over the last
    decade and the rescaled partial sums have dropped below tolerance;
    PREMISE_FAILED when the series itself is not Cauchy (no conclusion is
    asserted then); FAIL otherwise.
    """

    status: str
    tail_size: float
    premise_cauchy: bool
    scaled_average_final: float
    scaled_average_decade_ago: float
    n_terms: int


def kronecker_check(
    x: np.ndarray,
    weights: np.ndarray,
    premise_tol: float = 1e-2,
    conclusion_tol: float = 1e-2,
) -> KroneckerReport:
    """Check: if sum x_n / b_n converges and b_n grows, (1/b_N) sum x_n shrinks."""
    xs = np.asarray(x, dtype=np.float64)
    b = np.asarray(weights, dtype=np.float64)
    if xs.shape != b.shape or xs.ndim != 1 or xs.size < 10:
        raise ValueError("need matching 1-d arrays with at least 10 terms")
    if np.any(b <= 0) or np.any(np.diff(b) < 0):
        raise ValueError("weights must be positive and nondecreasing")
    series = np.cumsum(xs / b)
    n = xs.size
    decade_start = max(n // 10, 1)
    tail_size = float(np.max(np.abs(series[decade_start - 1:] - series[-1])))
    premise = tail_size < premise_tol
    scaled = np.abs(np.cumsum(xs)) / b
    final = float(scaled[-1])
    ago = float(scaled[decade_start - 1])
    if not premise:
        status = "PREMISE_FAILED"
    elif final < conclusion_tol:
        status = "PASS"
    else:
        status = "FAIL"
    return KroneckerReport(
        status=status,
        tail_size=tail_size,
        premise_cauchy=premise,
        scaled_average_final=final,
        scaled_average_decade_ago=ago,
        n_terms=n,
    )
