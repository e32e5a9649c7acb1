"""
The relative rounding error
===========================

Each operation's relative error ``delta`` is modelled as a random variable
on ``[-u, u]`` with a flat centre and decaying tails; its variance is
``u**2/6``.  Here the model is compared with errors from actual products.
"""

# %%
import numpy as np

from rounderr import DeltaModel, delta_histogram, empirical_delta, sample_delta

u = 2.0 ** -8
rng = np.random.default_rng(1)
x, y = rng.uniform(0, 1, 10**6), rng.uniform(0, 1, 10**6)
d = empirical_delta(x, y, "mul", "bfloat16")
print("empirical var / (u^2/6):", d.var() / (u * u / 6))

# %%
# Model draws by inverse-CDF sampling reproduce the variance exactly in the limit.
m = DeltaModel(u)
s = sample_delta(u, rng, 10**6)
print("sampled var / (u^2/6):", s.var() / m.sigma2)

# %%
# Bin-by-bin densities.  The centre of the observed histogram sits a little
# higher than the model because significands of products are not uniform.
lo, hi, emp, ana = delta_histogram(d, u, bins=16)
for a, e, f in zip(lo, emp, ana):
    print(f"{a / u:+.3f}u  observed {e * u:.3f}/u  model {f * u:.3f}/u")
