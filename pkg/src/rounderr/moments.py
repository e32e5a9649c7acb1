"""Closed-form predictors for the variance of rounding errors.

Every predictor has two evaluators.  The exact one works in rational
arithmetic with ``sigma2 = u**2/6`` held as a ``Fraction``; the fast one
works in floats with the closed forms rearranged so that no large terms
cancel (``expm1``/``log1p`` for ``(1+s)**k - 1`` and short binomial series
for the higher remainders).  All expectations are zero.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .formats import FloatFormat, make_format

EXACT_N_MAX = 10**6
_DIRECT_N_MAX = 2000
_SERIES_EPS = Fraction(1, 2**200)
LU_EXACT_N_MAX = 6
LU_TRIM_BITS = 256


def _q(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return Fraction(x)  # floats convert exactly


def sigma2_exact(u) -> Fraction:
    """``u**2 / 6`` as an exact rational (``u`` is a power of two for every format)."""
    return _q(u) ** 2 / 6


def _u_of(u_or_fmt) -> float | Fraction:
    if isinstance(u_or_fmt, (FloatFormat, str)):
        return make_format(u_or_fmt).u
    return u_or_fmt


def tau(mx, vx, my, vy) -> Fraction:
    """``E[(xy)^2] = vx*vy + vx*my^2 + vy*mx^2 + mx^2*my^2``."""
    mx, vx, my, vy = map(_q, (mx, vx, my, vy))
    if vx < 0 or vy < 0:
        raise ValueError("variances must be nonnegative")
    return vx * vy + vx * my * my + vy * mx * mx + mx * mx * my * my


@dataclass
class MomentPrediction:
    """Predicted mean and variance of one rounding error."""

    expectation: float
    variance: float
    method: str  # exact_rational | fast_float | asymptotic
    inputs: dict = field(default_factory=dict)
    exact: Fraction | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("exact")
        return d

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------------------
# inner products
# ---------------------------------------------------------------------------

def _check_n(n):
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")


def hbar_exact(tau_, kappa, n: int, s) -> Fraction:
    """Exact ``hbar`` for ``tau``, ``kappa = mx^2 my^2``, length ``n`` and ``s = sigma2``.

    Small ``n`` uses the closed form directly.  Larger ``n`` sums the
    positive power series in ``s`` with exact integer coefficients and stops
    once the remaining tail is provably below ``2**-200`` of the sum.
    """
    _check_n(n)
    if n > EXACT_N_MAX:
        raise ValueError(f"exact evaluation is capped at n <= {EXACT_N_MAX}; use the asymptotic form")
    tau_, kappa, s = _q(tau_), _q(kappa), _q(s)
    if s == 0:
        return Fraction(0)
    if n <= _DIRECT_N_MAX:
        q = 1 + s
        g = (q ** (n - 1) - 1) / s
        a = q ** n + q * q * g - n
        b = q * q * g / s - (n - 1) * q / s - Fraction(n * (n - 1), 2)
        return tau_ * a + 2 * kappa * b
    return _hbar_series_exact(tau_, kappa, n, s)


def _hbar_series_exact(tau_, kappa, n, s) -> Fraction:
    # A = sum a_k s^k, B = sum b_k s^k with
    # a_k = C(n,k) + C(n-1,k+1) + 2C(n-1,k) + [k>=2]C(n-1,k-1)
    # b_k = [k=1](n-1) + C(n-1,k+2) + 2C(n-1,k+1) + [k>=2]C(n-1,k)
    cn = [1]  # C(n, k)
    cm = [1]  # C(n-1, k)

    def grow(lst, N, upto):
        while len(lst) <= upto:
            k = len(lst) - 1
            lst.append(lst[-1] * (N - k) // (k + 1))

    total = Fraction(0)
    sk = Fraction(1)
    k = 0
    while True:
        k += 1
        sk *= s
        grow(cn, n, k)
        grow(cm, n - 1, k + 2)
        a = cn[k] + cm[k + 1] + 2 * cm[k] + (cm[k - 1] if k >= 2 else 0)
        b = cm[k + 2] + 2 * cm[k + 1] + (cm[k] if k >= 2 else 0) + (n - 1 if k == 1 else 0)
        term = (tau_ * a + 2 * kappa * b) * sk
        total += term
        if term == 0 and k > n + 1:
            return total
        # successive coefficient ratios are at most n/k
        r = Fraction(n, k) * s
        if r < Fraction(1, 2) and term * 2 * r <= _SERIES_EPS * total:
            return total


def _binom_tail(N: int, s: float, j: int) -> float:
    """``F_j(N) = ((1+s)^N - sum_{k<j} C(N,k) s^k) / s^j`` without cancellation."""
    if N < j:
        return 0.0
    if N * s < 0.25:
        # sum_{k>=j} C(N,k) s^(k-j)
        term = float(math.comb(N, j))
        total = term
        k = j
        while k < N:
            term *= (N - k) / (k + 1) * s
            total += term
            k += 1
            if term < 1e-18 * total:
                break
        return total
    e = math.expm1(N * math.log1p(s))
    poly = sum(math.comb(N, k) * s ** k for k in range(1, j))
    return (e - poly) / s ** j


def hbar_fast(tau_, kappa, n: int, s: float) -> float:
    """Float ``hbar`` via the cancellation-free form

    ``A = s[F1(n) + (2+s)(n-1) + (1+s)^2 F2(n-1)]`` and
    ``B = s[(n-1) + C(n-1,2)(2+s) + (1+s)^2 F3(n-1)]``.
    """
    _check_n(n)
    tau_, kappa, s = float(tau_), float(kappa), float(s)
    q2 = (1.0 + s) ** 2
    a = s * (_binom_tail(n, s, 1) + (2.0 + s) * (n - 1) + q2 * _binom_tail(n - 1, s, 2))
    b = s * ((n - 1) + math.comb(n - 1, 2) * (2.0 + s) + q2 * _binom_tail(n - 1, s, 3))
    return tau_ * a + 2.0 * kappa * b


def hbar_asymptotic(tau_, kappa, n: int, s) -> float:
    _check_n(n)
    return float(tau_) / 2 * n * n * float(s) + float(kappa) / 3 * n ** 3 * float(s)


def _inner_inputs(mx, vx, my, vy, n, u):
    t = tau(mx, vx, my, vy)
    kappa = _q(mx) ** 2 * _q(my) ** 2
    echo = {"n": n, "u": float(u), "mu_x": float(mx), "var_x": float(vx), "mu_y": float(my), "var_y": float(vy)}
    return t, kappa, echo


def inner_variance_exact(mx, vx, my, vy, n: int, u) -> MomentPrediction:
    """Variance of the left-to-right inner-product error, exact rational evaluation."""
    u = _u_of(u)
    t, kappa, echo = _inner_inputs(mx, vx, my, vy, n, u)
    v = hbar_exact(t, kappa, n, sigma2_exact(u))
    return MomentPrediction(0.0, float(v), "exact_rational", echo, exact=v)


def inner_variance_fast(mx, vx, my, vy, n: int, u) -> MomentPrediction:
    u = _u_of(u)
    t, kappa, echo = _inner_inputs(mx, vx, my, vy, n, u)
    return MomentPrediction(0.0, hbar_fast(t, kappa, n, float(u) ** 2 / 6), "fast_float", echo)


def inner_variance_asymptotic(mx, vx, my, vy, n: int, u) -> MomentPrediction:
    """Leading terms ``(tau/2) n^2 s + (mx^2 my^2 / 3) n^3 s``."""
    u = _u_of(u)
    t, kappa, echo = _inner_inputs(mx, vx, my, vy, n, u)
    return MomentPrediction(0.0, hbar_asymptotic(t, kappa, n, float(u) ** 2 / 6), "asymptotic", echo)


def inner_variance(mx, vx, my, vy, n: int, u, method: str = "exact_rational") -> MomentPrediction:
    fn = {"exact_rational": inner_variance_exact, "exact": inner_variance_exact,
          "fast_float": inner_variance_fast, "fast": inner_variance_fast,
          "asymptotic": inner_variance_asymptotic}.get(method)
    if fn is None:
        raise ValueError(f"unknown method {method!r}")
    if fn is inner_variance_exact and n > EXACT_N_MAX:
        fn = inner_variance_asymptotic
    return fn(mx, vx, my, vy, n, u)


@dataclass
class Autocorrelation:
    """Diagonal autocorrelation ``diag(value, ..., value)`` of size ``size``; zero mean."""

    size: int
    diagonal: float
    offdiagonal: float = 0.0
    method: str = "exact_rational"

    def matrix(self) -> np.ndarray:
        return self.diagonal * np.eye(self.size)


def matvec_autocorr(ma, va, mb, vb, m: int, n: int, u, method: str = "exact_rational") -> Autocorrelation:
    if m < 1:
        raise ValueError("m must be >= 1")
    p = inner_variance(ma, va, mb, vb, n, u, method)
    return Autocorrelation(m, p.variance, 0.0, p.method)


def matmul_autocorr(ma, va, mb, vb, m: int, n: int, p: int, u, method: str = "exact_rational") -> Autocorrelation:
    """Row autocorrelation of ``dC`` for ``C = AB`` (A is m x n, B is n x p): ``diag(p*hbar)``."""
    if m < 1 or p < 1:
        raise ValueError("m and p must be >= 1")
    pr = inner_variance(ma, va, mb, vb, n, u, method)
    return Autocorrelation(m, p * pr.variance, 0.0, pr.method)


# ---------------------------------------------------------------------------
# triangular solves with a Wishart Cholesky factor
# ---------------------------------------------------------------------------

@dataclass
class TriSolveRecursionState:
    """Per-unknown ``V(x_i)``, ``V(dx_i)`` and ``sigma_psi_i^2 = V(dx_i)/V(x_i)`` (index 0 is ``i=1``)."""

    n: int
    m: int
    u: float
    var_x: list
    var_dx: list
    sigma_psi2: list
    method: str

    def prediction(self, i: int) -> MomentPrediction:
        v = self.var_dx[i - 1]
        return MomentPrediction(0.0, float(v), self.method, {"kernel": "trisolve", "n": self.n, "m": self.m, "u": self.u, "i": i},
                                exact=v if isinstance(v, Fraction) else None)


def trisolve_variances(n: int, m: int, u, exact: bool = True) -> TriSolveRecursionState:
    """Forward recursion for the error variance of ``x = T^-1 b`` in forward substitution.

    ``T`` is the Bartlett factor of ``W_n(m, I)`` and ``b`` has standard normal
    entries.  ``V(x_i) = (1 + sum_{j<i} V(x_j)) / (m-i-1)`` and
    ``V(dx_i) = [(1+s)^i + sum_{j<i} V(x_j)(1+psi_j)(1+s)^(i-j+2)] / (m-i-1) - V(x_i)``.
    """
    if not m > n + 1:
        raise ValueError(f"m must exceed n+1 for triangular solves (n={n}, m={m})")
    u = _u_of(u)
    vx, vdx, psi = [], [], []
    if exact:
        s = sigma2_exact(u)
        q = 1 + s
        for i in range(1, n + 1):
            d = m - i - 1
            v = (1 + sum(vx)) / Fraction(d)
            acc = q ** i + sum(vx[j - 1] * (1 + psi[j - 1]) * q ** (i - j + 2) for j in range(1, i))
            dv = acc / d - v
            vx.append(v)
            vdx.append(dv)
            psi.append(dv / v)
    else:
        s = float(u) ** 2 / 6
        L = math.log1p(s)
        for i in range(1, n + 1):
            d = m - i - 1
            v = (1.0 + math.fsum(vx)) / d
            acc = math.expm1(i * L) + math.fsum(
                vx[j - 1] * math.expm1(math.log1p(psi[j - 1]) + (i - j + 2) * L) for j in range(1, i))
            dv = acc / d
            vx.append(v)
            vdx.append(dv)
            psi.append(dv / v)
    return TriSolveRecursionState(n, m, float(u), vx, vdx, psi, "exact_rational" if exact else "fast_float")


def trisolve_x3_example(m: int, u) -> Fraction:
    """Standalone closed form for ``V(dx_3)``, written out for ``i = 3``."""
    if not m > 4:
        raise ValueError(f"m must exceed 4, got {m}")
    s = sigma2_exact(_u_of(u))
    q = 1 + s
    psi2 = (q ** 2 - 1) * (m + q ** 2 - 1) / (m - 1)
    vx3 = Fraction((m - 2) * (m - 3) + 2 * m - 4, (m - 2) * (m - 3) * (m - 4))
    num = q ** 3 + q ** 5 / (m - 2) + Fraction(m - 1, (m - 2) * (m - 3)) * (1 + psi2) * q ** 3
    return num / (m - 4) - vx3


# ---------------------------------------------------------------------------
# Doolittle LU of a Wishart matrix
# ---------------------------------------------------------------------------

@dataclass
class LuRecursionState:
    """Per-step LU error variances, index 0 is ``k=1``.

    ``var_du_diag[k]`` is ``V(du_kk)``; ``var_du_off[k]`` is ``V(du_kj)`` for any
    ``j > k`` (independent of ``j``); ``var_dl[k]`` is ``V(dl_ik)`` for any
    ``i > k``.  ``eps2``, ``eta2`` and ``eta2_diag`` are the normalised ratios
    ``(m-k-1) V(dl)``, ``V(du_off)/(m-k+1)`` and ``V(du_kk)/((m-k+1)(m-k+3))``.
    """

    n: int
    m: int
    u: float
    var_du_diag: list
    var_du_off: list
    var_dl: list
    eps2: list
    eta2: list
    eta2_diag: list
    method: str

    def entry(self, factor: str, i: int, j: int):
        """Variance for 1-based entry ``(i, j)`` of ``'u'`` or ``'l'``."""
        if factor == "u":
            if not i <= j:
                raise ValueError("u entries need i <= j")
            return self.var_du_diag[i - 1] if i == j else self.var_du_off[i - 1]
        if factor == "l":
            if not i > j:
                raise ValueError("l entries need i > j")
            return self.var_dl[j - 1]
        raise ValueError(f"unknown factor {factor!r}")


def lu_variances(n: int, m: int, u, exact: bool = True) -> LuRecursionState:
    """Variances of the Doolittle LU errors for ``A ~ W_n(m, I)``, for ``k = 1..n``."""
    if not m > n + 3:
        raise ValueError(f"m must exceed n+3 for LU (n={n}, m={m})")
    u = _u_of(u)
    # Exact rationals roughly square in size each step, so beyond LU_EXACT_N_MAX
    # the carried ratios are rounded to LU_TRIM_BITS significant bits.
    trim = exact and n > LU_EXACT_N_MAX
    method = ("rational_trimmed" if trim else "exact_rational") if exact else "fast_float"
    state = LuRecursionState(n, m, float(u), [], [], [], [], [], [], method)
    step = _lu_step_exact if exact else _lu_step_fast
    s = sigma2_exact(u) if exact else float(u) ** 2 / 6
    for k in range(1, n + 1):
        ukk, ukj, lik = step(k, m, s, state.eps2, state.eta2)
        eta_d = ukk / ((m - k + 1) * (m - k + 3))
        state.var_du_diag.append(ukk)
        state.var_du_off.append(ukj)
        state.eta2_diag.append(eta_d)
        state.eta2.append(ukj / (m - k + 1))
        lik = lik(eta_d)
        state.var_dl.append(lik)
        state.eps2.append((m - k - 1) * lik)
        if trim:
            state.eps2[-1], state.eta2[-1] = _trim(state.eps2[-1]), _trim(state.eta2[-1])
    return state


def _trim(x: Fraction, bits: int = None) -> Fraction:
    """Round a rational to ``bits`` significant bits."""
    bits = bits or LU_TRIM_BITS
    if x == 0:
        return x
    e = abs(x.numerator).bit_length() - abs(x.denominator).bit_length()
    shift = bits - e
    return Fraction(round(x * Fraction(2) ** shift), 2 ** shift) if shift >= 0 else Fraction(round(x / Fraction(2) ** -shift) * 2 ** -shift)


def _lu_step_exact(k, m, s, eps2, eta2):
    # the printed expressions, evaluated literally (valid at k = 1 as well)
    q = 1 + s
    mix = [(1 + eps2[i - 1]) * (1 + eta2[i - 1]) for i in range(1, k)]
    geo = q * (q ** (k - 2) - 1) / s
    ukk = ((m * m - 4) * (q ** (k - 1) - 1) - 3 * (k - 1)
           + 3 * sum(mix[i - 1] * q ** (k - i + 1) for i in range(1, k))
           - 2 * (m + 2) * (geo - k + 2))
    ukj = ((m - 2) * (q ** (k - 1) - 1) + sum(mix[i - 1] * q ** (k - i + 1) for i in range(1, k))
           - 2 * geo + k - 3)

    def lik(eta_k):
        d = (m - k - 1) * (m - k - 3)
        h = 1 + eta_k
        num = ((m - 6) * (h * q ** k - 1)
               + h * sum(mix[j - 1] * q ** (k - j + 2) for j in range(1, k)) - k + 1
               - 2 * (h * q * q * (q ** (k - 2) - 1) / s - k + 2))
        return num / d

    return ukk, ukj, lik


def _lu_step_fast(k, m, s, eps2, eta2):
    # same quantities with every "(...) - 1" group formed by expm1
    L = math.log1p(s)
    e = lambda p: math.expm1(p * L)  # noqa: E731
    logmix = [math.log1p(eps2[i - 1]) + math.log1p(eta2[i - 1]) for i in range(1, k)]
    mixed = math.fsum(math.expm1(logmix[i - 1] + (k - i + 1) * L) for i in range(1, k))
    geo = math.fsum(e(p) for p in range(1, k - 1))  # sum_{p=1}^{k-2} ((1+s)^p - 1)
    ukk = (m * m - 4) * e(k - 1) + 3 * mixed - 2 * (m + 2) * geo
    ukj = (m - 2) * e(k - 1) + mixed - 2 * geo

    def lik(eta_k):
        d = (m - k - 1) * (m - k - 3)
        lh = math.log1p(eta_k)
        first = (m - 6) * math.expm1(lh + k * L)
        second = math.fsum(math.expm1(lh + logmix[j - 1] + (k - j + 2) * L) for j in range(1, k))
        if k >= 2:
            third = math.fsum(math.expm1(lh + p * L) for p in range(2, k))
        else:
            third = -math.expm1(lh + L)
        return (first + second - 2 * third) / d

    return ukk, ukj, lik


def lu_k3_examples(m: int, u, printed: bool = False) -> tuple[Fraction, Fraction, Fraction]:
    """Standalone ``(V(du_33), V(du_3j), V(dl_i3))`` for ``k = 3``.

    With ``printed=True`` two typeset slips are reproduced verbatim: the
    leading term of ``V(dl_i3)`` divided by ``m-6`` rather than ``m-4``, and
    the ``sigma_eps2`` expression that does not vanish as ``u -> 0``.  The
    default uses the forms that follow from the general recursion.
    """
    if not m > 6:
        raise ValueError(f"m must exceed 6, got {m}")
    s = sigma2_exact(_u_of(u))
    q = 1 + s
    h = ((m * m - 4) * s + 3 * (q ** 3 - 1)) / (m * m - 1)  # sigma_eta2 on the diagonal, k = 2
    if printed:
        eps2 = ((m - 6) * (1 + h) + h * q ** 4 - 1) / (m - 5)
    else:
        eps2 = ((m - 6) * ((1 + h) * q ** 2 - 1) + (1 + h) * q ** 4 - 1) / (m - 5)
    eta2 = ((m - 2) * s + q ** 3 - 1) / (m - 1)
    eta3 = ((m * m - 4) * (q ** 2 - 1) - 2 * (m + 2) * s
            + 3 * (q ** 2 * ((1 + eps2) * (1 + eta2) + q ** 2) - 2)) / (m * m - 2 * m)
    u33 = (m * m - 4) * (q ** 2 - 1) + 3 * q ** 2 * ((1 + eps2) * (1 + eta2) + q ** 2) - 2 * (m + 2) * s - 6
    u3j = (m - 2) * (q ** 2 - 1) + q ** 4 + (1 + eps2) * (1 + eta2) * q ** 2 - 2 * q
    lead = m - 6 if printed else m - 4
    l3 = ((1 + eta3) * q ** 3 - 1) / lead \
        + (1 + eta3) * (q ** 5 + (1 + eps2) * (1 + eta2) * q ** 3) / ((m - 4) * (m - 6)) \
        - 2 * (1 + eta3) * q ** 2 / ((m - 4) * (m - 6))
    return u33, u3j, l3


def kernel_predictions(kernel: str, n: int, u, *, m: int | None = None, p: int | None = None,
                       dist_x=None, dist_y=None, method: str = "exact_rational") -> list[dict]:
    """Predicted error moments for the reported entries of one kernel, as plain dicts.

    Inner-product kernels give one entry (per-element variance, plus the row
    sum ``p * hbar`` for ``matmul``); triangular solves give every ``x_i``;
    LU gives ``u_kk``, ``u_kn`` and ``l_{k+1,k}`` for each step.
    """
    from .distributions import parse_dist

    exact = method in ("exact_rational", "exact")
    if kernel in ("dot", "matvec", "matmul"):
        dx, dy = parse_dist(dist_x or "uniform:0,1"), parse_dist(dist_y or "uniform:0,1")
        pr = inner_variance(dx.mean, dx.variance, dy.mean, dy.variance, n, u, method).to_dict()
        pr["inputs"].update({"kernel": kernel, "dist_x": str(dx), "dist_y": str(dy), "element": "entry"})
        out = [pr]
        if kernel == "matvec":
            pr["inputs"]["m"] = m
        if kernel == "matmul":
            if p is None or m is None:
                raise ValueError("matmul needs m and p")
            row = dict(pr, variance=p * pr["variance"], inputs=dict(pr["inputs"], element="row", m=m, p=p))
            out.append(row)
        return out
    if m is None:
        raise ValueError(f"{kernel} needs m")
    u = _u_of(u)
    if kernel == "trisolve":
        st = trisolve_variances(n, m, u, exact=exact)
        return [dict(st.prediction(i).to_dict(), element=f"x{i}") for i in range(1, n + 1)]
    if kernel == "lu":
        st = lu_variances(n, m, u, exact=exact)
        out = []
        for k in range(1, n + 1):
            ents = [("u", k, k)] + ([("u", k, n), ("l", k + 1, k)] if k < n else [])
            for f, i, j in ents:
                out.append({"expectation": 0.0, "variance": float(st.entry(f, i, j)), "method": st.method,
                            "inputs": {"kernel": "lu", "n": n, "m": m, "u": float(u)}, "element": f"{f}[{i},{j}]"})
        return out
    raise ValueError(f"unknown kernel {kernel!r}")
