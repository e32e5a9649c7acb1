"""
Statistical estimate versus worst-case bounds
=============================================

Five bounds on the inner-product MSE, two deterministic and three
probabilistic, next to the closed-form variance and a simulation.
"""

# %%
from rounderr import BoundParams, ExperimentConfig, bound_report, mc_mse

cfg = ExperimentConfig(kernel="dot", n_grid=[10, 100, 1000, 10000], trials=1000, bounds=True)
for row in mc_mse(cfg).rows:
    print(f"n={row['n']:5d} sim {row['mse_sim']:.2e} pred {row['analytic']:.2e} "
          f"DB1 {row['db1']:.2e} PB1 {row['pb1']:.2e} PB2 {row['pb2']:.2e} DB2 {row['db2']:.2e} PB3 {row['pb3']:.2e}")

# %%
# How much tighter the prediction is at n = 10^4.
r = bound_report(10**4, 2.0 ** -24, "uniform:0,1", "uniform:0,1", BoundParams(lam=1.0, zeta=1e-16))
for name in ("db1", "pb1", "pb2", "db2", "pb3"):
    print(f"{name.upper()} / prediction = {getattr(r, name) / r.hbar:.1f}")

# %%
# Unbounded inputs have no PB2.
print(bound_report(100, 2.0 ** -24, "gaussian:0,1", "gaussian:0,1").pb2)
