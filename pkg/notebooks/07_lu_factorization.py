"""
Doolittle LU of a Wishart matrix
================================

Error variances of ``u_kk``, ``u_kj`` and ``l_ik`` follow a recursion in
``k``.  The first row of ``U`` is copied from ``A`` and carries no error.
"""

# %%
from fractions import Fraction

from rounderr import ExperimentConfig, lu_variances, mc_mse
from rounderr.moments import lu_k3_examples

u = Fraction(1, 2**24)
st = lu_variances(5, 200, u)
for k in range(5):
    print(f"k={k + 1}: V(du_kk) {float(st.var_du_diag[k]):.3e}  V(du_kj) {float(st.var_du_off[k]):.3e}  "
          f"V(dl_ik) {float(st.var_dl[k]):.3e}")

# %%
# The recursion and the closed-form third step agree exactly.
print(lu_k3_examples(200, u) == (st.var_du_diag[2], st.var_du_off[2], st.var_dl[2]))

# %%
cfg = ExperimentConfig(kernel="lu", n_grid=[5], m_grid=[50, 200, 1050], trials=2000)
for row in mc_mse(cfg).rows:
    if row["element"] in ("u33", "u35", "l43"):
        print(f"m={row['m']:4d} {row['element']}  ratio {row['ratio']:.3f}")

# %%
# At m = 1050 the pivots sit just above 1024, so their significands are
# close to 1 and rounding them costs about twice the average relative
# error.  The diagonal ratios show it.
