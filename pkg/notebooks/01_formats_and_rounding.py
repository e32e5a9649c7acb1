"""
Emulating low-precision formats
===============================

Values are held in double precision and rounded to a narrower significand
by masking bits, with ties going to the even neighbour.
"""

# %%
import numpy as np

from rounderr import make_format, round_to_format

for name in ("bfloat16", "fp16", "fp32", "fp64"):
    f = make_format(name)
    print(f"{f.name:9s} t={f.t:2d}  u={f.u:.3e}  x_min={f.x_min:.3e}  x_max={f.x_max:.3e}")

# %%
# The emulation agrees with numpy's own casts where numpy has the type.
x = np.random.default_rng(0).standard_normal(10**6)
print("fp32 matches np.float32:", np.array_equal(round_to_format(x, "fp32"), x.astype(np.float32)))
print("fp16 matches np.float16:", np.array_equal(round_to_format(x, "fp16"), x.astype(np.float16)))

# %%
# Ties to even, subnormals and overflow.
u = make_format("fp16").u
print(round_to_format(1 + u, "fp16"), round_to_format(1 + 3 * u, "fp16"))
print(round_to_format(3e-8, "fp16"))
try:
    round_to_format(1e5, "fp16")
except OverflowError as exc:
    print("overflow:", exc)
