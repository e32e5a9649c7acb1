"""
When the independence assumption breaks
=======================================

With ``y_i = x_i h`` every product is non-negative for a given trial, the
running sum grows without bound and late additions lose most of their
bits.  The error variance then drifts far from the model; independent
inputs do not.
"""

# %%
from rounderr import model_validity_probe

dep = model_validity_probe(10**5, 5000, "fp32", 1, trials=300, dependent=True)
ind = model_validity_probe(10**5, 5000, "fp32", 2, trials=300, dependent=False)
for i, a, b in zip(dep.checkpoints, dep.ratio, ind.ratio):
    print(f"i={i:6d}  dependent {a:7.3f}  independent {b:6.3f}")

# %%
# Relative errors of the additions, early and late.
for label, (lo, hi, emp, ana) in (("early", dep.hist_early), ("late", dep.hist_late)):
    mid = len(emp) // 2
    print(label, "density at 0:", round(emp[mid] * (hi[0] - lo[0]) * len(emp), 3),
          "model:", round(ana[mid] * (hi[0] - lo[0]) * len(ana), 3))
