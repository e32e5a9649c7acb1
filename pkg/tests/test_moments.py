import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rounderr.moments import (hbar_asymptotic, hbar_exact, hbar_fast, inner_variance, kernel_predictions,
                              lu_k3_examples, lu_variances, matmul_autocorr, sigma2_exact, tau,
                              trisolve_variances, trisolve_x3_example)

U32 = Fraction(1, 2**24)


def hbar_brute(tau_, kappa, n, s):
    """Double sum over product pairs: E[(P_i - 1)(P_j - 1)] = (1+s)^(shared factors) - 1.

    Product i carries its own multiply error and the add errors k = max(i, 2)..n.
    """
    tot = Fraction(0)
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            shared = n - max(i, j, 2) + 1 + (1 if i == j else 0)
            tot += (tau_ if i == j else kappa) * ((1 + s) ** shared - 1)
    return tot


class TestInnerProduct:
    @pytest.mark.parametrize("n", [1, 2, 3, 7, 20])
    def test_exact_matches_brute_force(self, n):
        s = sigma2_exact(Fraction(1, 2**8))
        for t, k in ((Fraction(1, 9), Fraction(1, 16)), (Fraction(1, 9), Fraction(0)), (Fraction(2), Fraction(1))):
            assert hbar_exact(t, k, n, s) == hbar_brute(t, k, n, s)

    def test_n1_is_tau_sigma2(self):
        p = inner_variance(Fraction(1, 2), Fraction(1, 12), Fraction(1, 2), Fraction(1, 12), 1, U32)
        assert p.exact == Fraction(1, 9) * U32 ** 2 / 6

    def test_tau(self):
        assert tau(Fraction(1, 2), Fraction(1, 12), Fraction(1, 2), Fraction(1, 12)) == Fraction(1, 9)
        assert tau(0, 1, 0, 1) == 1

    def test_series_path_continuous(self):
        # n above the direct-form cut-off uses a truncated positive series
        s = sigma2_exact(Fraction(1, 2**11))
        for n in (1999, 2000, 2001, 2500):
            a = hbar_exact(Fraction(1, 9), Fraction(1, 16), n, s)
            assert float(a) == pytest.approx(hbar_fast(1 / 9, 1 / 16, n, float(s)), rel=1e-14)

    @given(st.integers(1, 100_000), st.sampled_from([8, 11, 24]))
    @settings(max_examples=60, deadline=None)
    def test_fast_matches_exact(self, n, t):
        s = sigma2_exact(Fraction(1, 2**t))
        a = hbar_exact(Fraction(1, 3), Fraction(1, 4), n, s)
        b = hbar_fast(1 / 3, 1 / 4, n, float(s))
        assert abs(b - float(a)) <= 1e-12 * float(a)

    def test_asymptotic_leading_terms(self):
        s = float(sigma2_exact(U32))
        n = 10**4
        assert hbar_asymptotic(1 / 9, 1 / 16, n, s) == pytest.approx(hbar_fast(1 / 9, 1 / 16, n, s), rel=1e-3)

    def test_monotone_in_n(self):
        s = sigma2_exact(Fraction(1, 2**8))
        vals = [hbar_exact(1, Fraction(1, 4), n, s) for n in range(1, 40)]
        assert all(a < b for a, b in zip(vals, vals[1:]))

    def test_matmul_row_is_p_hbar(self):
        p = inner_variance(0, 1, 0, 1, 50, U32)
        a = matmul_autocorr(0, 1, 0, 1, 7, 50, 13, U32)
        assert a.diagonal == pytest.approx(13 * p.variance)
        assert a.matrix().shape == (7, 7)

    def test_json(self):
        p = inner_variance(0, 1, 0, 1, 10, U32)
        assert '"variance"' in p.to_json()


class TestTriSolve:
    def test_base_case(self):
        # dx_1 = (b_1 / t_11) delta, E[b^2] = 1, E[1/t_11^2] = 1/(m-2)
        for m in (5, 50, 1050):
            st_ = trisolve_variances(3, m, U32)
            assert st_.var_dx[0] == sigma2_exact(U32) / (m - 2)

    @pytest.mark.parametrize("m", [6, 50, 200, 1050])
    def test_recursion_equals_standalone_x3(self, m):
        assert trisolve_variances(min(5, m - 2), m, U32).var_dx[2] == trisolve_x3_example(m, U32)

    def test_fast_path(self):
        for t in (8, 11, 24):
            u = Fraction(1, 2**t)
            a = trisolve_variances(30, 80, u)
            b = trisolve_variances(30, 80, u, exact=False)
            for x, y in zip(a.var_dx, b.var_dx):
                assert y == pytest.approx(float(x), rel=1e-12)

    def test_precondition(self):
        with pytest.raises(ValueError, match="n\\+1"):
            trisolve_variances(5, 6, U32)


class TestLU:
    def test_first_step(self):
        s = sigma2_exact(U32)
        for m in (8, 50, 1050):
            st_ = lu_variances(4, m, U32)
            assert st_.var_du_diag[0] == 0 and st_.var_du_off[0] == 0
            assert st_.var_dl[0] == s / (m - 2)

    @pytest.mark.parametrize("m", [7, 8, 50, 200, 1050])
    def test_recursion_equals_standalone_k3(self, m):
        st_ = lu_variances(5 if m > 8 else m - 4, m, U32)
        u33, u3j, l3 = lu_k3_examples(m, U32)
        assert st_.var_du_diag[2] == u33
        assert st_.var_du_off[2] == u3j
        assert st_.var_dl[2] == l3

    def test_printed_variant_differs(self):
        a = lu_k3_examples(1050, U32)
        b = lu_k3_examples(1050, U32, printed=True)
        assert a[0] != b[0] and a[2] != b[2]

    def test_invariant_in_n(self):
        a = lu_variances(5, 1050, U32)
        b = lu_variances(6, 1050, U32)
        assert a.var_du_diag == b.var_du_diag[:5] and a.var_dl[:4] == b.var_dl[:4]

    def test_fast_and_trimmed_paths(self):
        for t in (8, 11, 24):
            u = Fraction(1, 2**t)
            a, b = lu_variances(20, 60, u), lu_variances(20, 60, u, exact=False)
            assert a.method == "rational_trimmed"
            for xs, ys in ((a.var_du_diag, b.var_du_diag), (a.var_du_off, b.var_du_off), (a.var_dl, b.var_dl)):
                for x, y in zip(xs[1:], ys[1:]):
                    assert y == pytest.approx(float(x), rel=1e-12)

    def test_precondition(self):
        with pytest.raises(ValueError, match="n\\+3"):
            lu_variances(5, 8, U32)


class TestKernelPredictions:
    def test_dot(self):
        (p,) = kernel_predictions("dot", 100, 2.0**-24, dist_x="gaussian:0,1", dist_y="gaussian:0,1")
        assert p["variance"] == pytest.approx(hbar_fast(1, 0, 100, 2.0**-48 / 6), rel=1e-14)

    def test_lu_elements(self):
        out = kernel_predictions("lu", 3, 2.0**-24, m=50)
        assert [p["element"] for p in out] == ["u[1,1]", "u[1,3]", "l[2,1]", "u[2,2]", "u[2,3]", "l[3,2]", "u[3,3]"]

    def test_unknown(self):
        with pytest.raises(ValueError):
            kernel_predictions("qr", 3, 2.0**-24, m=50)
