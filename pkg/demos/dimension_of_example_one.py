"""Estimate the quantization dimension of a random two-IFS measure from exact errors.

Run: python3 demos/dimension_of_example_one.py [seed]
"""
import sys

from rifsquant import example_spec, solve_kappa
from rifsquant.experiments import dimension_pipeline

seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
spec = example_spec(1)
kappa = solve_kappa(spec, 1.0).exponent
print(f"kappa_1 from the pressure equation: {kappa:.6f}")

rep = dimension_pipeline(spec, seed=seed, r=1.0, n_max=1024)
print(f"approximant depth {rep.depth}, {len(rep.results)} exact errors")
for q, e in zip(rep.results, rep.dimension.e_n):
    print(f"  n={q.n:5d}  V={q.cost:.6e}  e_n={e:.4f}")
print(f"regression estimate {rep.dimension.slope_fit:.4f}, abs error {rep.abs_error:.4f}")
