"""Normalized error along the threshold-antichain subsequence of the first example.

Prints Phi, t_n and Phi^(r/t_n) V_Phi at every n where the antichain changes.
A bounded, trendless series is the numerical face of the two-sided estimate.
"""
from rifsquant import example_spec
from rifsquant.experiments import sandwich_series

rep = sandwich_series(example_spec(1), seed=0, r=1.0, n_max=10**6)
print(f"depth {rep.depth}, {rep.ns.size} change points")
for n, phi, t, s in zip(rep.ns[::4], rep.phi[::4], rep.t[::4], rep.series[::4]):
    print(f"  n={n:8d}  Phi={phi:4d}  t={t:.5f}  series={s:.5f}")
print(f"tail max/min {rep.tail_ratio:.3f}, Theil-Sen slope {rep.theil_sen_slope:+.4f}")
