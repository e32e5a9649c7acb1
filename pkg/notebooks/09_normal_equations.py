"""
Least squares through the normal equations
==========================================

``H^T H x = H^T z`` is formed and solved entirely in single precision:
product, LU, then two triangular solves.  Each stage is measured against
exact arithmetic on its own inputs, and the solves are also measured end
to end.
"""

# %%
from rounderr import zf_ls_pipeline

rep = zf_ls_pipeline(200, 5, "fp32", trials=1000)
for row in rep.rows:
    ratio = "" if row["ratio"] is None else f"ratio {row['ratio']:.3f}"
    print(f"{row['stage']:13s} {row['element']:10s} MSE {row['mse_sim']:.3e} {ratio}")

# %%
# The diagonal of H^T H is a sum of squares, so its predicted variance uses
# E[x^4] = 3 and E[x^2]^2 = 1 rather than independent-factor moments.
