import dataclasses

import numpy as np
import pytest

from slln_lab.errors import HorizonOverflow
from slln_lab.generators import DependenceMode, TailEnvelope, XFamily
from slln_lab.mixture import (
    MixedSequenceConfig,
    PathState,
    derive_path_streams,
    next_z,
    run_path,
)
from slln_lab.rng import Channel, StreamKey, derive_stream
from slln_lab.schedules import MomentSchedule, ScheduleForm, SparsityMode, SparsityPattern, build_sparsity

SCHED = MomentSchedule(ScheduleForm.INV_SQRT_LOG)


def make_config(pattern=None, x_family=None, dependence=DependenceMode.INDEPENDENT,
                horizon=500, seed=9, **kw):
    return MixedSequenceConfig(
        x_family=x_family or XFamily.uniform(1.0),
        envelope=TailEnvelope.pareto(2.0),
        dependence=dependence,
        schedule=SCHED,
        pattern=pattern or build_sparsity(SCHED, 1.0),
        horizon=horizon,
        master_seed=seed,
        **kw,
    )


def stream_whole_path(config):
    state = PathState()
    streams = derive_path_streams(config.master_seed, config.path_index)
    values = []
    while state.n < config.horizon:
        z, state = next_z(state, config, streams)
        values.append(z)
    return np.array(values), state


def test_all_zero_pattern_is_pure_x():
    config = make_config(pattern=SparsityPattern(mode=SparsityMode.ALL_ZERO), horizon=1000)
    values, _ = stream_whole_path(config)
    direct = XFamily.uniform(1.0).sample_block(
        1000, derive_stream(StreamKey(9, 0, Channel.X))
    )
    assert np.array_equal(values, direct)


def test_all_one_pattern_is_pure_y():
    config = make_config(pattern=SparsityPattern(mode=SparsityMode.ALL_ONE), horizon=200)
    values, state = stream_whole_path(config)
    assert state.insert_count == 200
    assert state.other_count == 0
    assert np.all(values >= 1.0)  # heavy draws sit above the envelope support start


def test_explicit_pattern_unrolls():
    pattern = SparsityPattern(mode=SparsityMode.EXPLICIT, explicit=(1, 0, 0, 1))
    config = make_config(pattern=pattern, horizon=4)
    values, state = stream_whole_path(config)
    assert state.insert_count == 2
    assert state.other_count == 2
    x_direct = XFamily.uniform(1.0).sample_block(2, derive_stream(StreamKey(9, 0, Channel.X)))
    assert values[1] == x_direct[0]  # first non-insert consumes the first draw
    assert values[2] == x_direct[1]
    assert values[0] >= 1.0 and values[3] >= 1.0


def test_streaming_matches_vectorized_bitwise():
    for fam in (XFamily.uniform(1.0), XFamily.shifted_exp(1.0), XFamily.parity(4),
                XFamily.pareto_centered(2.0)):
        for dep in (DependenceMode.INDEPENDENT, DependenceMode.COMONOTONE):
            config = make_config(x_family=fam, dependence=dep, horizon=300)
            values, state = stream_whole_path(config)
            summary = run_path(config, [300])
            from slln_lab.mixture import _emit_values

            vec_values, info = _emit_values(config)
            assert np.array_equal(values, vec_values)
            assert state.insert_count == info["insert_count"]
            assert summary.final_avg == state.total / 300.0


def test_resummation_zero_ulp():
    config = make_config(x_family=XFamily.shifted_exp(1.0), horizon=400)
    values, state = stream_whole_path(config)
    total = 0.0
    for v in values.tolist():
        total += v
    assert total == state.total
    assert total == float(np.cumsum(values)[-1])


def test_bookkeeping_counts():
    config = make_config(horizon=250)
    _, state = stream_whole_path(config)
    assert state.counts_consistent()
    phi = config.pattern.phi(250)
    assert state.insert_count == phi[-1]
    assert state.other_count == 250 - phi[-1]


def test_repeat_run_bit_identical():
    config = make_config(x_family=XFamily.parity(4), dependence=DependenceMode.COMONOTONE, horizon=2000)
    s1 = run_path(config, [10, 100, 2000])
    s2 = run_path(config, [10, 100, 2000])
    assert np.array_equal(s1.running_avg, s2.running_avg)
    assert np.array_equal(s1.deviation_sup, s2.deviation_sup)
    assert s1.max_abs_value == s2.max_abs_value
    assert s1.final_avg == s2.final_avg


def test_horizon_one():
    config = make_config(pattern=SparsityPattern(mode=SparsityMode.ALL_ZERO), horizon=1)
    summary = run_path(config, [1])
    direct = XFamily.uniform(1.0).sample_block(1, derive_stream(StreamKey(9, 0, Channel.X)))
    assert summary.final_avg == direct[0]


def test_horizon_overflow():
    config = make_config(horizon=2000, memory_budget=1000)
    with pytest.raises(HorizonOverflow):
        run_path(config, [1000])


def test_uniform_pure_x_average_small():
    # CLT at the horizon: 3 sigma / sqrt(n) with sigma^2 = 1/3
    config = make_config(pattern=SparsityPattern(mode=SparsityMode.ALL_ZERO),
                         horizon=10 ** 6, seed=0)
    summary = run_path(config, [10 ** 6])
    assert abs(summary.final_avg) < 0.00173


def test_compensated_sum_close_to_plain():
    config = make_config(horizon=500)
    plain = run_path(config, [500])
    comp = run_path(dataclasses.replace(config, compensated_sum=True), [500])
    assert comp.final_avg == pytest.approx(plain.final_avg, rel=1e-12)


def test_checkpoint_validation():
    config = make_config(horizon=100)
    with pytest.raises(ValueError):
        run_path(config, [0])
    with pytest.raises(ValueError):
        run_path(config, [101])
    with pytest.raises(ValueError):
        run_path(config, [])


def test_comonotone_draws_share_one_uniform():
    pattern = SparsityPattern(mode=SparsityMode.ALL_ONE)
    config = make_config(pattern=pattern, dependence=DependenceMode.COMONOTONE, horizon=50)
    values, state = stream_whole_path(config)
    shared = state.shared_u
    assert shared is not None
    exps = SCHED.value(np.arange(1, 51, dtype=float))
    v = TailEnvelope.pareto(2.0).sample_v(shared)
    assert np.array_equal(values, np.power(v, 1.0 / exps))


def test_config_roundtrip():
    for pattern in (build_sparsity(SCHED, 1.0), SparsityPattern(mode=SparsityMode.ALL_ONE),
                    SparsityPattern(mode=SparsityMode.EXPLICIT, explicit=(1, 0, 1))):
        config = make_config(pattern=pattern, horizon=3)
        round_tripped = MixedSequenceConfig.from_dict(config.to_dict())
        assert round_tripped.to_dict() == config.to_dict()
        a = run_path(config, [3])
        b = run_path(round_tripped, [3])
        assert np.array_equal(a.running_avg, b.running_avg)
