"""Input distributions, Wishart samplers and the moments the predictors need."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import special

Number = Fraction | float


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(str(x)) if isinstance(x, str) else Fraction(x).limit_denominator(10**12)


@dataclass(frozen=True)
class ScalarDistribution:
    """An i.i.d. entry distribution.

    ``family`` is one of ``uniform(a, b)``, ``gaussian(mean, variance)``,
    ``chi_square(m)`` or ``scaled_student_t(scale, dof)``.  Means and
    variances are exact rationals whenever the parameters are.
    """

    family: str
    params: tuple

    def __post_init__(self):
        f, p = self.family, self.params
        if f == "uniform":
            a, b = p
            if not b > a:
                raise ValueError(f"uniform needs a < b, got {a}, {b}")
        elif f == "gaussian":
            if not p[1] > 0:
                raise ValueError(f"gaussian variance must be positive, got {p[1]}")
        elif f == "chi_square":
            if not p[0] > 0:
                raise ValueError(f"chi_square dof must be positive, got {p[0]}")
        elif f == "scaled_student_t":
            if not (p[0] > 0 and p[1] > 0):
                raise ValueError(f"student t needs scale > 0 and dof > 0, got {p}")
        else:
            raise ValueError(f"unknown family {f!r}")

    # -- constructors -----------------------------------------------------
    @classmethod
    def uniform(cls, a, b):
        return cls("uniform", (_frac(a), _frac(b)))

    @classmethod
    def gaussian(cls, mean, variance):
        return cls("gaussian", (_frac(mean), _frac(variance)))

    @classmethod
    def chi_square(cls, m):
        return cls("chi_square", (_frac(m),))

    @classmethod
    def scaled_student_t(cls, scale, dof):
        return cls("scaled_student_t", (float(scale), _frac(dof)))

    # -- moments ----------------------------------------------------------
    @property
    def mean(self) -> Number:
        f, p = self.family, self.params
        if f == "uniform":
            return (p[0] + p[1]) / 2
        if f == "gaussian":
            return p[0]
        if f == "chi_square":
            return p[0]
        if p[1] <= 1:
            raise ValueError("student t mean undefined for dof <= 1")
        return Fraction(0)

    @property
    def variance(self) -> Number:
        f, p = self.family, self.params
        if f == "uniform":
            return (p[1] - p[0]) ** 2 / 12
        if f == "gaussian":
            return p[1]
        if f == "chi_square":
            return 2 * p[0]
        scale, dof = p
        if dof <= 2:
            raise ValueError("student t variance undefined for dof <= 2")
        return scale * scale * float(dof / (dof - 2))

    @property
    def second_moment(self) -> Number:
        return self.variance + self.mean ** 2

    @property
    def abs_mean_provenance(self) -> str:
        return "numeric" if self.family in ("gaussian", "scaled_student_t") else "closed_form"

    @property
    def abs_mean(self) -> float:
        """E|x|, exact where the family allows, otherwise a float."""
        f, p = self.family, self.params
        if f == "uniform":
            a, b = p
            if a >= 0:
                return (a + b) / 2
            if b <= 0:
                return -(a + b) / 2
            return (a * a + b * b) / (2 * (b - a))
        if f == "chi_square":
            return p[0]
        if f == "gaussian":
            mu, sd = float(p[0]), math.sqrt(p[1])
            # folded normal
            return sd * math.sqrt(2 / math.pi) * math.exp(-mu * mu / (2 * sd * sd)) + mu * math.erf(mu / (sd * math.sqrt(2)))
        scale, dof = p[0], float(p[1])
        if dof <= 1:
            raise ValueError("student t absolute mean undefined for dof <= 1")
        return scale * 2 * math.sqrt(dof) * math.exp(special.gammaln((dof + 1) / 2) - special.gammaln(dof / 2)) / (math.sqrt(math.pi) * (dof - 1))

    @property
    def bound(self) -> float | None:
        """Support bound ``C`` with ``|x| <= C``, or ``None`` when unbounded."""
        if self.family == "uniform":
            return float(max(abs(self.params[0]), abs(self.params[1])))
        return None

    # -- sampling ---------------------------------------------------------
    def sample(self, rng: np.random.Generator, shape=None) -> np.ndarray:
        return sample_dist(self, shape, rng)

    def __str__(self) -> str:
        f, p = self.family, self.params
        name = {"scaled_student_t": "student_t"}.get(f, f)
        return f"{name}:" + ",".join(_fmt_param(v) for v in p)


def _fmt_param(v) -> str:
    if isinstance(v, Fraction) and v.denominator == 1:
        return str(v.numerator)
    if isinstance(v, Fraction):
        return repr(float(v))
    return repr(v)


def parse_dist(text: str | ScalarDistribution) -> ScalarDistribution:
    """Parse ``"uniform:0,1"``, ``"gaussian:1,1"`` (mean, variance), ``"chi_square:50"``
    or ``"student_t:scale,dof"``."""
    if isinstance(text, ScalarDistribution):
        return text
    try:
        family, args = text.split(":", 1)
        vals = [a.strip() for a in args.split(",")]
    except ValueError:
        raise ValueError(f"cannot parse distribution {text!r}; expected family:params") from None
    family = family.strip().lower()
    if family in ("uniform", "u"):
        return ScalarDistribution.uniform(*map(_frac, vals))
    if family in ("gaussian", "normal", "n"):
        return ScalarDistribution.gaussian(*map(_frac, vals))
    if family in ("chi_square", "chi2", "chisquare"):
        return ScalarDistribution.chi_square(_frac(vals[0]))
    if family in ("student_t", "t", "scaled_student_t"):
        return ScalarDistribution.scaled_student_t(float(vals[0]), _frac(vals[1]))
    raise ValueError(f"unknown distribution family {family!r}")


def sample_dist(spec: ScalarDistribution, shape, rng: np.random.Generator) -> np.ndarray:
    f, p = spec.family, spec.params
    if f == "uniform":
        return rng.uniform(float(p[0]), float(p[1]), shape)
    if f == "gaussian":
        return rng.normal(float(p[0]), math.sqrt(p[1]), shape)
    if f == "chi_square":
        return rng.chisquare(float(p[0]), shape)
    scale, dof = p[0], float(p[1])
    return scale * rng.standard_normal(shape) / np.sqrt(rng.chisquare(dof, shape) / dof)


# ---------------------------------------------------------------------------
# Wishart W_n(m, I)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class WishartSpec:
    n: int
    m: int

    def check_trisolve(self):
        if not self.m > self.n + 1:
            raise ValueError(f"m must exceed n+1 for triangular solves (n={self.n}, m={self.m})")

    def check_lu(self):
        if not self.m > self.n + 3:
            raise ValueError(f"m must exceed n+3 for LU (n={self.n}, m={self.m})")


def sample_wishart_chol(n: int, m: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Lower-triangular Bartlett factor ``T`` of a ``W_n(m, I)`` draw.

    ``t_ii**2`` is chi-square with ``m - i + 1`` degrees of freedom (1-based
    ``i``) and the strictly lower entries are standard normal, all independent.
    ``size`` adds leading batch dimensions.
    """
    if m < n:
        raise ValueError(f"need m >= n, got n={n}, m={m}")
    batch = () if size is None else tuple(np.atleast_1d(size))
    dof = m - np.arange(n)  # m - i + 1 for i = 1..n
    T = np.zeros(batch + (n, n))
    il = np.tril_indices(n, -1)
    T[(...,) + il] = rng.standard_normal(batch + (len(il[0]),))
    T[..., np.arange(n), np.arange(n)] = np.sqrt(rng.chisquare(dof, batch + (n,)))
    return T


def sample_wishart(n: int, m: int, rng: np.random.Generator, size=None) -> np.ndarray:
    """Symmetric positive definite ``A = T T^T ~ W_n(m, I)``."""
    T = sample_wishart_chol(n, m, rng, size)
    return T @ np.swapaxes(T, -1, -2)


def lu_factor_stats(n: int, m: int, i: int, j: int) -> dict:
    """Moments of the exact LU factor entry at 1-based ``(i, j)`` of a ``W_n(m, I)`` matrix.

    Diagonal ``u_ii`` is chi-square(``m-i+1``); ``u_ij`` (i < j) is the product of a
    chi(``m-i+1``) and a standard normal; ``l_ij`` (j < i) is a student t with
    ``m-j+1`` dof scaled by ``1/sqrt(m-j+1)``.
    """
    if not m > n + 1:
        raise ValueError(f"m must exceed n+1 (n={n}, m={m})")
    if not (1 <= i <= n and 1 <= j <= n):
        raise ValueError(f"indices out of range: ({i}, {j}) for n={n}")
    if i == j:
        nu = m - i + 1
        return {"factor": "u", "kind": "chi_square", "dof": nu, "mean": Fraction(nu), "variance": Fraction(2 * nu)}
    if i < j:
        nu = m - i + 1
        return {"factor": "u", "kind": "bessel_product", "dof": nu, "mean": Fraction(0), "variance": Fraction(nu),
                "pdf": lambda z, nu=nu: u_offdiag_pdf(z, nu)}
    dof = m - j + 1
    if dof <= 2:
        raise ValueError(f"variance of l_{i}{j} does not exist for dof {dof} <= 2")
    return {"factor": "l", "kind": "scaled_student_t", "dof": dof, "mean": Fraction(0),
            "variance": Fraction(1, m - j - 1)}


def u_offdiag_pdf(z, nu: int):
    """Density of ``r_ii * r_ij`` with ``r_ii ~ chi(nu)``, ``r_ij ~ N(0, 1)``."""
    z = np.abs(np.asarray(z, dtype=np.float64))
    a = (nu - 1) / 2
    log_norm = -0.5 * math.log(2 * math.pi) - (nu / 2 - 1) * math.log(2) - special.gammaln(nu / 2)
    at_zero = math.exp(special.gammaln(a) - special.gammaln(nu / 2)) / (2 * math.sqrt(math.pi))
    with np.errstate(divide="ignore", invalid="ignore"):
        val = np.exp(log_norm + a * np.log(z)) * special.kv(a, z)
    out = np.where(z == 0, at_zero, val)
    return float(out) if out.ndim == 0 else out


def lu_product_moments(m: int, k: int, case: str) -> dict:
    """Moments of the products that appear inside the Doolittle recurrences.

    ``case`` is ``q_diag`` (``l_ki u_ik``), ``q_offdiag`` (``l_ki u_ij``, j != k),
    ``p`` (``l_ij u_jk / u_kk``) or ``o`` (``a_ik / u_kk``).
    """
    if not m > k + 3:
        raise ValueError(f"m must exceed k+3 (k={k}, m={m})")
    d = Fraction(1, (m - k - 1) * (m - k - 3))
    if case == "q_diag":
        return {"mean": Fraction(1), "variance": Fraction(2), "cov_with_a": Fraction(2), "cov_between": Fraction(0)}
    if case == "q_offdiag":
        return {"mean": Fraction(0), "variance": Fraction(1), "cov_with_a": Fraction(1), "cov_between": Fraction(0)}
    if case == "p":
        return {"mean": Fraction(0), "variance": d, "cov_between": Fraction(0)}
    if case == "o":
        return {"mean": Fraction(0), "variance": (m - 4) * d, "cov_with_p": d}
    raise ValueError(f"unknown case {case!r}")
