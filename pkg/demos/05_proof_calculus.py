"""Every intermediate series bound, witnessed numerically with printed slack."""

import numpy as np

from slln_lab import MomentSchedule, ScheduleForm, TailEnvelope
from slln_lab.calculus import (
    bound_suite,
    build_block_schedule,
    kronecker_check,
    truncated_power_moment,
    weighted_y_series,
    weighted_y_series_ensemble,
)

print("truncated power moments E min(v,n)**p (exact for the extremal law):")
env = TailEnvelope.pareto(2.0)
for n in (2, 10, 100, 10 ** 4):
    print(f"  n={n:<6} p=2: {truncated_power_moment(env, n, 2.0):.6f}")

print("\nseries bounds over the envelope/exponent grid (45 assertions):")
print(f"{'envelope':<12}{'p':>6}{'A':>12}{'<=':>4}{'p/(p-1)C':>10}{'B':>10}{'<=':>4}{'C':>6}{'A+B':>12}{'<=':>4}{'(2p-1)/(p-1)C':>14}")
for row in bound_suite():
    print(
        f"{row['envelope']:<12}{row['p']:>6.3g}{row['A']:>12.4f}{'':>4}{row['bound_A']:>10.4f}"
        f"{row['B']:>10.4f}{'':>4}{row['bound_B']:>6.3g}{row['combined']:>12.4f}{'':>4}{row['bound_combined']:>14.4f}"
    )

print("\nblock boundaries with tail bound < 1/k^2 (constant exponent 1/2, exponential envelope):")
blocks = build_block_schedule(TailEnvelope.exponential(), MomentSchedule(ScheduleForm.CONSTANT, constant_a=0.5), 5)
for k, (n_k, tail) in enumerate(zip(blocks.boundaries, blocks.tail_bounds), start=1):
    print(f"  k={k}: N_k={n_k:<4} tail bound {tail:.5f} < {1 / k ** 2:.5f}")

print("\nweighted heavy series sum |y_k| / k**(1/a_k):")
det = weighted_y_series(np.ones(10 ** 4), np.full(10 ** 4, 0.5))
print(f"  deterministic y=1, a=1/2: partial sum {det.total:.6f} -> pi^2/6 = {np.pi ** 2 / 6:.6f}")
ens = weighted_y_series_ensemble(env, MomentSchedule(ScheduleForm.INV_SQRT_LOG), 1.0, 10 ** 4, 100)
print(f"  simulated paths with last-decade increment < 1e-3: {ens.fraction_converged:.0%}")

print("\nseries-to-average conversion checks:")
k = np.arange(1, 10 ** 4 + 1, dtype=float)
for label, x in [("alternating +-1", (-1.0) ** k), ("constant 1", np.ones(k.size)), ("1/k^2", 1.0 / k ** 2)]:
    rep = kronecker_check(x, k)
    print(f"  {label:<16} status={rep.status:<15} scaled average at N: {rep.scaled_average_final:.2e}")
