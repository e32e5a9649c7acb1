"""
Forward substitution with a Wishart factor
==========================================

``T`` is the lower-triangular Bartlett factor of a ``W_n(m, I)`` draw and
``b`` is standard normal.  A recursion gives the error variance of each
unknown.
"""

# %%
from rounderr import ExperimentConfig, mc_mse, trisolve_variances

st = trisolve_variances(5, 200, 2.0 ** -24)
for i, (vx, vd) in enumerate(zip(st.var_x, st.var_dx), 1):
    print(f"x{i}: V(x) = {float(vx):.4e}  V(dx) = {float(vd):.4e}")

# %%
cfg = ExperimentConfig(kernel="trisolve", n_grid=[5], m_grid=[50, 200, 1050], trials=2000)
for row in mc_mse(cfg).rows:
    if row["element"] == "x3":
        print(f"m={row['m']:4d}  simulated {row['mse_sim']:.3e}  predicted {row['analytic']:.3e}  ratio {row['ratio']:.3f}")

# %%
# The order of the subtractions matters: accumulating the products first
# and subtracting once gives visibly smaller errors than the recursion assumes.
cfg = ExperimentConfig(kernel="trisolve", n_grid=[5], m_grid=[200], trials=2000, order="sum_first")
print([round(r["ratio"], 3) for r in mc_mse(cfg).rows if r["element"] in ("x3", "x5")])
