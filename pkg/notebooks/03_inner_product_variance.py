"""
Inner-product error variance
============================

For ``s = x^T y`` summed left to right, the error variance has a closed
form in the input moments, the length ``n`` and ``u``.  Nonzero means
make it grow like ``n**3``, zero means like ``n**2``.
"""

# %%
from fractions import Fraction

from rounderr import ExperimentConfig, inner_variance, mc_mse

for dist, (mx, vx) in {"U(0,1)": (Fraction(1, 2), Fraction(1, 12)), "U(-1,1)": (0, Fraction(1, 3))}.items():
    for n in (10, 100, 1000, 10000):
        p = inner_variance(mx, vx, mx, vx, n, 2.0 ** -24)
        print(f"{dist:8s} n={n:6d}  predicted MSE {p.variance:.3e}")

# %%
# Monte Carlo check at single precision.
cfg = ExperimentConfig(kernel="dot", dist_x="gaussian:1,1", dist_y="gaussian:1,1", n_grid=[10, 100, 1000], trials=2000)
for row in mc_mse(cfg).rows:
    print(f"n={row['n']:5d}  simulated {row['mse_sim']:.3e}  predicted {row['analytic']:.3e}  ratio {row['ratio']:.3f}")

# %%
# The fast float evaluator agrees with the exact rational one.
p_exact = inner_variance(Fraction(1, 2), Fraction(1, 12), Fraction(1, 2), Fraction(1, 12), 10**5, 2.0 ** -11)
p_fast = inner_variance(0.5, 1 / 12, 0.5, 1 / 12, 10**5, 2.0 ** -11, method="fast_float")
print("relative gap:", abs(p_fast.variance - p_exact.variance) / p_exact.variance)
