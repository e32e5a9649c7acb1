"""Worst-case and probabilistic error bounds for inner products.

All bounds are on the mean square error ``E(|s_hat - s|^2)`` except
``corollary_bound``, which bounds ``|s_hat - s|`` itself with probability at
least ``1 - eta``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .distributions import parse_dist
from .moments import hbar_asymptotic, inner_variance, tau

BOUND_COLUMNS = ("n", "u", "mse_sim", "hbar", "db1", "pb1", "pb2", "db2", "pb3", "corollary")


@dataclass(frozen=True)
class BoundParams:
    lam: float = 1.0
    zeta: float = 1e-16
    eta: float = 0.1

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"lambda must be positive, got {self.lam}")
        if not 0 < self.zeta < 1:
            raise ValueError(f"zeta must lie in (0, 1), got {self.zeta}")
        if not 0 < self.eta <= 1:
            raise ValueError(f"eta must lie in (0, 1], got {self.eta}")


def gamma_n(n: int, u: float) -> float:
    nu = n * u
    if not nu < 1:
        raise ValueError(f"n*u must be < 1, got {nu}")
    return nu / (1 - nu)


def abs_cross_moment(dist_x, dist_y, n: int) -> float:
    """``E((|x|^T |y|)^2) = n E(x^2) E(y^2) + n(n-1) (E|x| E|y|)^2`` for i.i.d. entries."""
    dx, dy = parse_dist(dist_x), parse_dist(dist_y)
    ax, ay = dx.abs_mean, dy.abs_mean
    val = n * dx.second_moment * dy.second_moment + n * (n - 1) * (ax * ay) ** 2
    return val if isinstance(val, Fraction) else float(val)


def db1_bound(n: int, u: float, dist_x, dist_y) -> float:
    return gamma_n(n, u) ** 2 * float(abs_cross_moment(dist_x, dist_y, n))


def pb1_bound(n: int, u: float, lam: float, dist_x, dist_y) -> float:
    """``[exp(lam sqrt(n) u + n u^2/(1-nu)) - 1]^2 E((|x|^T|y|)^2)``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    nu = n * u
    if not nu < 1:
        raise ValueError(f"n*u must be < 1, got {nu}")
    g = math.expm1(lam * math.sqrt(n) * u + n * u * u / (1 - nu))
    return g * g * float(abs_cross_moment(dist_x, dist_y, n))


def pb2_bound(n: int, u: float, lam: float, dist_x, dist_y) -> float:
    """``(lam |mx my| n^(3/2) + (lam^2 + 1) Cx Cy n)^2 u^2``; bounded inputs only."""
    dx, dy = parse_dist(dist_x), parse_dist(dist_y)
    if dx.bound is None or dy.bound is None:
        raise ValueError("PB2 needs bounded inputs: unbounded support")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    mm = abs(float(dx.mean) * float(dy.mean))
    return (lam * mm * n ** 1.5 + (lam * lam + 1) * dx.bound * dy.bound * n) ** 2 * u * u


def _beta_sq_sum(n: int, u: float) -> float:
    """``beta_n^2 + sum_{k=2}^n beta_k^2`` with ``beta_k = (1+u)^k - 1``."""
    k = np.arange(2, n + 1, dtype=np.float64)
    beta = np.expm1(k * math.log1p(u))
    bn = math.expm1(n * math.log1p(u))
    return bn * bn + math.fsum(beta * beta)


def beta_sq_sum_exact(n: int, u) -> Fraction:
    u = Fraction(u)
    beta = lambda k: (1 + u) ** k - 1  # noqa: E731
    return beta(n) ** 2 + sum(beta(k) ** 2 for k in range(2, n + 1))


def db2_pb3_bounds(n: int, u: float, zeta: float, dist_x, dist_y) -> tuple[float, float]:
    """``(n E, 2 ln(2/zeta) E)`` with ``E = E(x^2) E(y^2) sum_k beta^2``."""
    if not 0 < zeta < 1:
        raise ValueError(f"zeta must lie in (0, 1), got {zeta}")
    dx, dy = parse_dist(dist_x), parse_dist(dist_y)
    e = float(dx.second_moment * dy.second_moment) * _beta_sq_sum(n, u)
    return n * e, 2 * math.log(2 / zeta) * e


def corollary_bound(n: int, u: float, eta: float, dist_x, dist_y) -> float:
    """``sqrt(asymptotic variance / eta)``: ``|s_hat - s|`` exceeds it with probability at most ``eta``."""
    if not 0 < eta <= 1:
        raise ValueError(f"eta must lie in (0, 1], got {eta}")
    dx, dy = parse_dist(dist_x), parse_dist(dist_y)
    t = tau(dx.mean, dx.variance, dy.mean, dy.variance)
    kappa = Fraction(dx.mean) ** 2 * Fraction(dy.mean) ** 2
    return math.sqrt(hbar_asymptotic(t, kappa, n, u * u / 6) / eta)


@dataclass
class BoundReport:
    n: int
    u: float
    hbar: float
    db1: float
    pb1: float
    pb2: float | None
    db2: float
    pb3: float
    corollary: float
    mse_sim: float | None = None
    config: dict = field(default_factory=dict)

    def row(self) -> dict:
        d = asdict(self)
        return {c: d[c] for c in BOUND_COLUMNS}


def bound_report(n: int, u: float, dist_x, dist_y, params: BoundParams = BoundParams(),
                 mse_sim: float | None = None) -> BoundReport:
    dx, dy = parse_dist(dist_x), parse_dist(dist_y)
    hb = inner_variance(dx.mean, dx.variance, dy.mean, dy.variance, n, u).variance
    try:
        pb2 = pb2_bound(n, u, params.lam, dx, dy)
    except ValueError:
        pb2 = None
    db2, pb3 = db2_pb3_bounds(n, u, params.zeta, dx, dy)
    return BoundReport(
        n=n, u=u, hbar=hb,
        db1=db1_bound(n, u, dx, dy),
        pb1=pb1_bound(n, u, params.lam, dx, dy),
        pb2=pb2, db2=db2, pb3=pb3,
        corollary=corollary_bound(n, u, params.eta, dx, dy),
        mse_sim=mse_sim,
        config={"dist_x": str(dx), "dist_y": str(dy), **asdict(params)},
    )


__all__ = [
    "BOUND_COLUMNS", "BoundParams", "BoundReport", "abs_cross_moment",
    "beta_sq_sum_exact", "bound_report", "corollary_bound", "db1_bound", "db2_pb3_bounds",
    "gamma_n", "pb1_bound", "pb2_bound",
]
