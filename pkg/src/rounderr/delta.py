"""Probabilistic relative-error model for a single rounded operation.

The density of the relative error ``delta`` on ``[-u, u]`` is flat, ``3/(4u)``,
on the central half ``[-u/2, u/2]`` and falls off as
``(1/(2u))(u/|t| - 1) + (1/(4u))(u/|t| - 1)**2`` on the tails.  The tail branch
simplifies to ``(u**2 - t**2) / (4 u t**2)``, which integrates in closed form,
so both the CDF and its inverse are exact.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .formats import FloatFormat, make_format, rounder

_OPS = {
    "+": operator.add, "add": operator.add,
    "-": operator.sub, "sub": operator.sub,
    "*": operator.mul, "mul": operator.mul,
    "/": operator.truediv, "div": operator.truediv,
}


@dataclass(frozen=True)
class DeltaModel:
    """Relative-error distribution for unit roundoff ``u``; ``sigma2 = u**2 / 6``."""

    u: float

    def __post_init__(self):
        if not self.u > 0:
            raise ValueError(f"u must be positive, got {self.u}")

    @classmethod
    def for_format(cls, fmt: FloatFormat | str) -> "DeltaModel":
        return cls(make_format(fmt).u)

    @property
    def sigma2(self) -> float:
        return self.u * self.u / 6.0

    @property
    def sigma2_exact(self) -> Fraction:
        return Fraction(self.u) ** 2 / 6

    def pdf(self, t):
        return delta_pdf(t, self.u)

    def cdf(self, t):
        return delta_cdf(t, self.u)

    def sample(self, rng: np.random.Generator, size=None):
        return sample_delta(self.u, rng, size)


def delta_pdf(t, u: float):
    """Density of the relative error at ``t`` (even in ``t``, zero outside ``[-u, u]``)."""
    if not u > 0:
        raise ValueError(f"u must be positive, got {u}")
    a = np.abs(np.asarray(t, dtype=np.float64))
    with np.errstate(divide="ignore", invalid="ignore"):
        r = u / a - 1.0
        tail = r / (2.0 * u) + r * r / (4.0 * u)
    out = np.where(a <= u / 2, 3.0 / (4.0 * u), np.where(a <= u, tail, 0.0))
    return float(out) if out.ndim == 0 else out


def delta_cdf(t, u: float):
    if not u > 0:
        raise ValueError(f"u must be positive, got {u}")
    t = np.asarray(t, dtype=np.float64)
    a = np.minimum(np.abs(t), u)
    with np.errstate(divide="ignore", invalid="ignore"):
        # mass between 0 and |t|
        inner = np.where(a <= u / 2, 3.0 * a / (4.0 * u),
                         3.0 / 8.0 + 5.0 / 8.0 - u / (4.0 * a) - a / (4.0 * u))
    out = 0.5 + np.sign(t) * inner
    return float(out) if out.ndim == 0 else out


def delta_moments(u: float) -> tuple[float, float]:
    """Mean and variance of the relative error: ``(0, u**2/6)``."""
    if not u > 0:
        raise ValueError(f"u must be positive, got {u}")
    return 0.0, u * u / 6.0


def _inverse_cdf(v: np.ndarray, u: float) -> np.ndarray:
    v = np.asarray(v, dtype=np.float64)
    w = np.abs(v - 0.5)  # mass between 0 and |delta|
    out = np.empty_like(w)
    central = w <= 3.0 / 8.0
    out[central] = w[central] * 4.0 * u / 3.0
    # tail: |delta| = s solves s**2 - b u s + u**2 = 0 with b = 5/2 - 4 c
    c = w[~central] - 3.0 / 8.0
    b = 2.5 - 4.0 * c
    disc = np.sqrt(np.maximum(b * b - 4.0, 0.0))
    # the smaller root, written to avoid cancellation as c -> 1/8
    out[~central] = u * 2.0 / (b + disc)
    out[~central] = np.minimum(out[~central], u)
    return np.copysign(out, v - 0.5)


def sample_delta(u: float, rng: np.random.Generator, size=None):
    """Draw relative errors by exact inverse-CDF sampling."""
    if not u > 0:
        raise ValueError(f"u must be positive, got {u}")
    v = rng.random(size)
    out = _inverse_cdf(np.atleast_1d(v), u)
    return float(out[0]) if size is None else out.reshape(np.shape(v))


def empirical_delta(x, y, op: str, fmt: FloatFormat | str):
    """Relative error ``fl(x op y) / (x op y) - 1`` of one emulated operation.

    Raises ``ZeroDivisionError`` if any exact result is zero; callers filter those out.
    """
    try:
        f = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown op {op!r}") from None
    exact = f(np.asarray(x, dtype=np.float64), np.asarray(y, dtype=np.float64))
    if np.any(exact == 0):
        raise ZeroDivisionError("relative error undefined for an exact zero result")
    rounded = rounder(make_format(fmt))(exact).reshape(np.shape(exact))
    out = rounded / exact - 1.0
    return float(out) if out.ndim == 0 else out


def delta_histogram(deltas, u: float, bins: int = 64):
    """Histogram of observed deltas on ``[-u, u]`` with the model density at bin centres.

    Returns ``(left, right, empirical_density, analytic_density)``; the analytic
    column is the exact bin-average of the model density.
    """
    edges = np.linspace(-u, u, bins + 1)
    counts, _ = np.histogram(np.asarray(deltas), bins=edges)
    width = np.diff(edges)
    total = max(counts.sum(), 1)
    emp = counts / (total * width)
    ana = np.diff(delta_cdf(edges, u)) / width
    return edges[:-1], edges[1:], emp, ana
