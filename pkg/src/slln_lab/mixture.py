"""Assembly of the observed sequence from its two ingredient streams.

Position n emits a heavy draw when alpha_n = 1 (consuming the insert-count
stream) and a well-behaved draw when alpha_n = 0.  The exponent of an
insert is the schedule value at its global position.  Two execution paths
produce bit-identical values: :func:`next_z` steps one index at a time,
:func:`run_path` runs the whole horizon vectorized.  Both consume uniforms
in the same order from the same derived streams, and both accumulate the
running sum strictly left to right in double precision.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .diagnostics import PathSummary, suffix_sup
from .errors import HorizonOverflow
from .generators import DependenceMode, TailEnvelope, XFamily
from .rng import Channel, StreamKey, UniformStream, derive_stream
from .schedules import MomentSchedule, SparsityMode, SparsityPattern

DEFAULT_MEMORY_BUDGET = 10 ** 7  # deviation buffer entries (8 bytes each)


@dataclass
class MixedSequenceConfig:
    """Full recipe for one stochastic path of the mixed sequence."""

    x_family: XFamily
    envelope: TailEnvelope
    dependence: DependenceMode
    schedule: MomentSchedule
    pattern: SparsityPattern
    horizon: int
    master_seed: int = 0
    path_index: int = 0
    compensated_sum: bool = False
    memory_budget: int = DEFAULT_MEMORY_BUDGET

    def __post_init__(self) -> None:
        if self.horizon < 1:
            raise ValueError("horizon must be >= 1")

    def with_path(self, path_index: int) -> "MixedSequenceConfig":
        """Same recipe, different derived streams; the pattern cache is shared."""
        return replace(self, path_index=path_index)

    def to_dict(self) -> dict:
        return {
            "x": self.x_family.to_dict(),
            "y": {
                "envelope": self.envelope.to_dict(),
                "dependence": self.dependence.value,
            },
            "schedule": _schedule_to_dict(self.schedule),
            "sparsity": self.pattern.to_dict(),
            "horizon": self.horizon,
            "seed": self.master_seed,
            "path_index": self.path_index,
            "compensated_sum": self.compensated_sum,
            "memory_budget": self.memory_budget,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "MixedSequenceConfig":
        schedule = _schedule_from_dict(data["schedule"])
        return cls(
            x_family=XFamily.from_dict(data["x"]),
            envelope=TailEnvelope.from_dict(data["y"]["envelope"]),
            dependence=DependenceMode(data["y"]["dependence"]),
            schedule=schedule,
            pattern=_pattern_from_dict(data["sparsity"], schedule),
            horizon=int(data["horizon"]),
            master_seed=int(data.get("seed", 0)),
            path_index=int(data.get("path_index", 0)),
            compensated_sum=bool(data.get("compensated_sum", False)),
            memory_budget=int(data.get("memory_budget", DEFAULT_MEMORY_BUDGET)),
        )


def _schedule_to_dict(schedule: MomentSchedule) -> dict:
    out: dict = {"form": schedule.form.value}
    if schedule.constant_a is not None:
        out["constant_a"] = schedule.constant_a
    if schedule.floor_index is not None:
        out["floor_index"] = schedule.floor_index
    return out


def _schedule_from_dict(data: dict) -> MomentSchedule:
    from .schedules import ScheduleForm

    return MomentSchedule(
        form=ScheduleForm(data["form"]),
        constant_a=data.get("constant_a"),
        floor_index=data.get("floor_index"),
    )


def _pattern_from_dict(data: dict, schedule: MomentSchedule) -> SparsityPattern:
    mode = SparsityMode(data.get("mode", "auto"))
    explicit = tuple(data["alpha"]) if "alpha" in data else None
    return SparsityPattern(
        mode=mode,
        c=float(data.get("c", 1.0)),
        schedule=schedule if mode is SparsityMode.AUTO else None,
        explicit=explicit,
    )


@dataclass
class PathStreams:
    """The three derived streams owned by one path."""

    x: UniformStream
    y: UniformStream
    shared: UniformStream


def derive_path_streams(master_seed: int, path_index: int) -> PathStreams:
    return PathStreams(
        x=derive_stream(StreamKey(master_seed, path_index, Channel.X)),
        y=derive_stream(StreamKey(master_seed, path_index, Channel.Y)),
        shared=derive_stream(StreamKey(master_seed, path_index, Channel.SHARED)),
    )


@dataclass
class PathState:
    """Cursor of the streaming path engine."""

    n: int = 0
    insert_count: int = 0      # heavy draws consumed so far
    other_count: int = 0       # well-behaved draws consumed so far
    total: float = 0.0         # running sum, strict left-to-right accumulation
    shared_u: float | None = None
    x_buffer: tuple = ()       # unconsumed tail of the current parity block

    def counts_consistent(self) -> bool:
        return self.insert_count + self.other_count == self.n


def next_z(state: PathState, config: MixedSequenceConfig, streams: PathStreams) -> tuple[float, PathState]:
    """Emit the value at index n+1 and the advanced state."""
    if state.n >= config.horizon:
        raise ValueError("path already ran to its horizon")
    n = state.n + 1
    alpha_n = int(config.pattern.alpha(config.horizon)[n - 1])
    if alpha_n == 1:
        shared_u = state.shared_u
        if config.dependence is DependenceMode.COMONOTONE and shared_u is None:
            shared_u = streams.shared.next()
        exponent = config.schedule.value(n)
        from .generators import sample_y

        z = sample_y(config.envelope, config.dependence, exponent, stream=streams.y, shared_u=shared_u)
        new_state = replace(
            state,
            n=n,
            insert_count=state.insert_count + 1,
            total=state.total + z,
            shared_u=shared_u,
        )
        return z, new_state
    buffer = state.x_buffer
    if not buffer:
        block = config.x_family.sample_block(config.x_family.block_length, streams.x)
        buffer = tuple(float(v) for v in block)
    z, rest = buffer[0], buffer[1:]
    new_state = replace(
        state,
        n=n,
        other_count=state.other_count + 1,
        total=state.total + z,
        x_buffer=rest,
    )
    return z, new_state


def _emit_values(config: MixedSequenceConfig) -> tuple[np.ndarray, dict]:
    """All horizon values of one path, plus bookkeeping facts."""
    horizon = config.horizon
    alpha = config.pattern.alpha(horizon).astype(bool)
    n_insert = int(alpha.sum())
    n_other = horizon - n_insert
    streams = derive_path_streams(config.master_seed, config.path_index)

    values = np.empty(horizon, dtype=np.float64)
    if n_other:
        values[~alpha] = config.x_family.sample_block(n_other, streams.x)
    if n_insert:
        indices = np.arange(1, horizon + 1, dtype=np.float64)
        exponents = config.schedule.value(indices)[alpha]
        if config.dependence is DependenceMode.COMONOTONE:
            shared_u = streams.shared.next()
            v = config.envelope.sample_v(shared_u)
        else:
            v = config.envelope.sample_v(streams.y.uniforms(n_insert))
        values[alpha] = np.power(v, 1.0 / exponents)
    info = {"insert_count": n_insert, "other_count": n_other}
    return values, info


def _running_sums(values: np.ndarray, compensated: bool) -> np.ndarray:
    if not compensated:
        return np.cumsum(values)
    # Kahan accumulation; slow pure-python loop, only for small-horizon studies
    sums = np.empty_like(values)
    total = 0.0
    carry = 0.0
    for i, v in enumerate(values.tolist()):
        y = v - carry
        t = total + y
        carry = (t - total) - y
        total = t
        sums[i] = total
    return sums


def run_path(config: MixedSequenceConfig, checkpoints: Sequence[int]) -> PathSummary:
    """Stream one path to its horizon and summarize it at the checkpoints.

    Keeps exactly one real per index (the |S_m/m| buffer) so suffix-sup
    statistics can be computed in a single backward pass.
    """
    horizon = config.horizon
    if horizon > config.memory_budget:
        raise HorizonOverflow(
            f"horizon {horizon} exceeds memory budget {config.memory_budget}"
        )
    cps = np.asarray(sorted(int(c) for c in checkpoints), dtype=np.int64)
    if cps.size == 0:
        raise ValueError("at least one checkpoint is required")
    if cps[0] < 1 or cps[-1] > horizon:
        raise ValueError("checkpoints must lie in [1, horizon]")

    values, info = _emit_values(config)
    sums = _running_sums(values, config.compensated_sum)
    averages = sums / np.arange(1, horizon + 1, dtype=np.float64)
    deviations = np.abs(averages)
    return PathSummary(
        path_index=config.path_index,
        horizon=horizon,
        checkpoints=cps,
        running_avg=averages[cps - 1].copy(),
        deviation_sup=suffix_sup(deviations, cps),
        insert_count=info["insert_count"],
        max_abs_value=float(np.abs(values).max()),
        final_avg=float(averages[-1]),
    )
