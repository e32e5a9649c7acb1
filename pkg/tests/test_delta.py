import numpy as np
import pytest
from scipy import integrate

from rounderr.delta import (DeltaModel, delta_cdf, delta_histogram, delta_moments, delta_pdf,
                            empirical_delta, sample_delta)

U = 2.0 ** -8


class TestDensity:
    def test_integrates_to_one(self):
        total = sum(integrate.quad(delta_pdf, a, b, args=(U,))[0]
                    for a, b in ((-U, -U / 2), (-U / 2, U / 2), (U / 2, U)))
        assert total == pytest.approx(1.0, rel=1e-10)

    def test_variance_is_u2_over_6(self):
        f = lambda t: t * t * delta_pdf(t, U)  # noqa: E731
        v = sum(integrate.quad(f, a, b)[0] for a, b in ((-U, -U / 2), (-U / 2, U / 2), (U / 2, U)))
        assert v == pytest.approx(U * U / 6, rel=1e-10)
        assert delta_moments(U) == (0.0, U * U / 6)

    def test_shape(self):
        assert delta_pdf(0.0, U) == pytest.approx(3 / (4 * U))
        assert delta_pdf(U / 2, U) == pytest.approx(3 / (4 * U))
        assert delta_pdf(U, U) == pytest.approx(0.0, abs=1e-12)
        assert delta_pdf(1.5 * U, U) == 0.0

    def test_cdf_matches_quadrature(self):
        for t in (-0.9 * U, -0.3 * U, 0.2 * U, 0.7 * U):
            q = integrate.quad(delta_pdf, -U, t, args=(U,), points=[-U / 2, U / 2])[0]
            assert delta_cdf(t, U) == pytest.approx(q, abs=1e-12)

    def test_model_object(self):
        m = DeltaModel.for_format("fp32")
        assert m.sigma2 == 2.0 ** -48 / 6
        assert m.sigma2_exact.denominator == 6 * 2 ** 48


class TestSampling:
    def test_inverse_cdf_roundtrip(self):
        rng = np.random.default_rng(2)
        d = sample_delta(U, rng, 200_000)
        assert np.all(np.abs(d) <= U)
        assert d.var() == pytest.approx(U * U / 6, rel=0.01)
        # uniform probability integral transform
        v = np.sort(delta_cdf(d, U))
        assert np.max(np.abs(v - (np.arange(v.size) + 0.5) / v.size)) < 0.005

    def test_bad_u(self):
        with pytest.raises(ValueError):
            sample_delta(0.0, np.random.default_rng(0), 3)


class TestEmpirical:
    def test_bounded_by_u(self):
        rng = np.random.default_rng(3)
        x, y = rng.uniform(0, 1, 10**5), rng.uniform(0, 1, 10**5)
        ops = {"mul": x * y, "add": x + y, "sub": x - y, "div": x / y}
        for op, exact in ops.items():
            normal = (np.abs(exact) >= 2.0 ** -14) & (np.abs(exact) < 65504)  # normal range only
            d = empirical_delta(x[normal], y[normal], op, "fp16")
            assert np.max(np.abs(d)) <= 2.0 ** -11

    def test_zero_result_raises(self):
        with pytest.raises(ZeroDivisionError):
            empirical_delta(np.array([1.0]), np.array([1.0]), "sub", "fp32")

    def test_histogram_density(self):
        d = sample_delta(U, np.random.default_rng(4), 10**6)
        lo, hi, emp, ana = delta_histogram(d, U, bins=32)
        assert np.sum(ana * (hi - lo)) == pytest.approx(1.0)
        np.testing.assert_allclose(emp, ana, rtol=0.05)
