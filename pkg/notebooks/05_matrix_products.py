"""
Matrix-vector and matrix-matrix products
========================================

Each output entry is an inner product, so entries share the scalar
variance; a row of ``C = AB`` accumulates ``p`` of them.
"""

# %%
from rounderr import ExperimentConfig, matmul_autocorr, mc_mse

print(matmul_autocorr(0.5, 1 / 12, 0.5, 1 / 12, 10, 100, 10, 2.0 ** -24).diagonal)

# %%
cfg = ExperimentConfig(kernel="matmul", m_grid=[10], n_grid=[10, 100], p_grid=[10, 30], trials=1000)
for row in mc_mse(cfg).rows:
    if row["element"] == "R22":
        print(f"n={row['n']:4d} p={row['p']:3d}  row 2 error power {row['mse_sim']:.3e}  predicted {row['analytic']:.3e}")

# %%
# The number of rows does not matter.
cfg = ExperimentConfig(kernel="matmul", m_grid=[10, 50, 100], n_grid=[10], p_grid=[10], trials=1000)
print([round(r["ratio"], 3) for r in mc_mse(cfg).rows if r["element"] == "R22"])
