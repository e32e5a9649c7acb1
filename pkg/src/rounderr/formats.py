"""Binary floating-point formats and round-to-nearest-even emulation.

All arithmetic is carried out in IEEE double (the *carrier*) and then rounded
into the target format.  For every target with ``t <= 25`` double rounding of a
single ``+ - * /`` is innocuous, so ``round_to_format(x op y)`` is the correctly
rounded result of the operation in the target format.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CARRIER_T = 53
MAX_TARGET_T = 32


@dataclass(frozen=True)
class FloatFormat:
    """A binary format with ``t`` significand bits and exponent range ``[e_min, e_max]``."""

    name: str
    t: int
    e_min: int
    e_max: int

    @property
    def u(self) -> float:
        return 2.0 ** (-self.t)

    @property
    def x_min(self) -> float:
        return 2.0 ** self.e_min

    @property
    def x_max(self) -> float:
        return (2.0 - 2.0 ** (1 - self.t)) * 2.0 ** self.e_max

    @property
    def is_carrier(self) -> bool:
        return self.t >= CARRIER_T

    def __str__(self) -> str:
        return self.name


PRESETS = {
    "bfloat16": FloatFormat("bfloat16", 8, -126, 127),
    "fp16": FloatFormat("fp16", 11, -14, 15),
    "fp32": FloatFormat("fp32", 24, -126, 127),
    "fp64": FloatFormat("fp64", 53, -1022, 1023),
}
ALIASES = {"fp64-carrier": "fp64", "half": "fp16", "single": "fp32", "double": "fp64", "bf16": "bfloat16"}


def make_format(spec: str | FloatFormat | None = None, *, t: int | None = None,
                e_min: int | None = None, e_max: int | None = None,
                name: str | None = None) -> FloatFormat:
    """Return a preset by name, or build a custom format from ``(t, e_min, e_max)``.

    >>> make_format("fp16").t
    11
    >>> make_format(t=24, e_min=-126, e_max=127).u == make_format("fp32").u
    True
    """
    if isinstance(spec, FloatFormat):
        return spec
    if spec is not None:
        key = ALIASES.get(spec.lower(), spec.lower())
        try:
            return PRESETS[key]
        except KeyError:
            raise ValueError(f"unknown format {spec!r}; expected one of {sorted(PRESETS)}") from None
    if t is None or e_min is None or e_max is None:
        raise ValueError("custom formats need t, e_min and e_max")
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    if e_min >= e_max:
        raise ValueError(f"e_min must be < e_max, got {e_min} >= {e_max}")
    if MAX_TARGET_T < t < CARRIER_T:
        raise ValueError(f"t={t}: targets must satisfy t <= {MAX_TARGET_T} (or be the carrier itself)")
    return FloatFormat(name or f"custom_t{t}", int(t), int(e_min), int(e_max))


def unit_roundoff(fmt: FloatFormat | str) -> float:
    return make_format(fmt).u


class _Rounder:
    """Precomputed masks for one target format; rounds float64 arrays."""

    def __init__(self, fmt: FloatFormat):
        self.fmt = fmt
        drop = CARRIER_T - fmt.t
        self.drop = np.uint64(drop)
        self.bias = np.uint64((1 << (drop - 1)) - 1)
        self.mask = ~np.uint64((1 << drop) - 1)
        self.one = np.uint64(1)
        self.quantum = 2.0 ** (fmt.e_min - fmt.t + 1)

    def __call__(self, x: np.ndarray) -> np.ndarray:
        out = np.array(x, dtype=np.float64, copy=True, ndmin=1)
        bits = out.view(np.uint64)
        lsb = bits >> self.drop
        lsb &= self.one
        bits += self.bias
        bits += lsb
        bits &= self.mask
        mag = np.abs(x)
        lo, hi = mag.min(initial=np.inf), mag.max(initial=0.0)
        if lo < self.fmt.x_min:
            tiny = mag < self.fmt.x_min
            out[tiny] = np.rint(np.asarray(x, dtype=np.float64)[tiny] / self.quantum) * self.quantum
        if not hi <= self.fmt.x_max:
            if np.isnan(hi):
                raise ValueError("cannot round NaN")
            if not np.abs(out).max() <= self.fmt.x_max:
                raise OverflowError(f"value exceeds x_max={self.fmt.x_max:.3e} of {self.fmt.name}")
        return out


_ROUNDERS: dict[FloatFormat, _Rounder] = {}


def rounder(fmt: FloatFormat | str):
    """Return a fast array rounding callable for ``fmt`` (identity copy for the carrier)."""
    fmt = make_format(fmt)
    if fmt.is_carrier:
        def _carrier(x):
            out = np.array(x, dtype=np.float64, copy=True, ndmin=1)
            if not np.isfinite(out).all():
                if np.isnan(out).any():
                    raise ValueError("cannot round NaN")
                raise OverflowError(f"non-finite value in {fmt.name}")
            return out
        return _carrier
    r = _ROUNDERS.get(fmt)
    if r is None:
        r = _ROUNDERS[fmt] = _Rounder(fmt)
    return r


def round_to_format(x, fmt: FloatFormat | str):
    """Round carrier values to the nearest value of ``fmt``, ties to even.

    Normal results are produced by masking the low ``53 - t`` bits of the
    double significand after adding the round-to-nearest-even bias; values
    below ``x_min`` are rounded onto the fixed subnormal grid.  Raises
    ``OverflowError`` when a result would exceed ``x_max`` and ``ValueError``
    on NaN.  Scalars in, scalars out.
    """
    arr = np.asarray(x, dtype=np.float64)
    out = rounder(fmt)(arr)
    return float(out[0]) if arr.ndim == 0 else out.reshape(arr.shape)


def is_representable(x, fmt: FloatFormat | str) -> np.ndarray:
    """Elementwise test that ``x`` is already a value of ``fmt``."""
    arr = np.asarray(x, dtype=np.float64)
    return round_to_format(arr, fmt) == arr
