import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, stats

from pitmaneff.dist_core import (
    NULL,
    Alternative,
    BetaParams,
    ThetaWarning,
    beta_m2,
    beta_m4,
    beta_mean,
    density,
    hellinger,
    hellinger_product,
    mixture_moment,
    sample,
    tau,
)

shapes = st.floats(0.2, 8.0)


def alt(p, q, eps):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ThetaWarning)
        return Alternative.from_pqe(p, q, eps)


class TestParams:
    def test_rejects_nonpositive_shapes(self):
        with pytest.raises(ValueError):
            BetaParams(0, 1)
        with pytest.raises(ValueError):
            BetaParams(1, -2)

    def test_eps_range(self):
        with pytest.raises(ValueError):
            Alternative(1.5)
        with pytest.raises(ValueError):
            Alternative(-0.1)

    def test_theta_membership(self):
        assert BetaParams(2, 1).in_theta()
        assert BetaParams(5, 4).in_theta()  # tau = 0 is on the boundary
        assert not BetaParams(1, 2).in_theta()

    def test_outside_theta_warns_not_raises(self):
        with pytest.warns(ThetaWarning):
            Alternative.from_pqe(1, 2, 0.5)

    def test_eps_zero_is_null(self):
        assert Alternative.from_pqe(3, 1, 0.0).is_null


class TestMoments:
    @pytest.mark.parametrize("pq,want", [((1, 1), 0.5), ((2, 1), 2 / 3), ((5, 4), 5 / 9)])
    def test_mean(self, pq, want):
        assert beta_mean(BetaParams(*pq)) == pytest.approx(want, rel=1e-15)

    def test_second_and_fourth(self):
        assert beta_m2(BetaParams(1, 1)) == pytest.approx(1 / 3)
        assert beta_m2(BetaParams(2, 1)) == pytest.approx(1 / 2)
        assert beta_m4(BetaParams(1, 1)) == pytest.approx(1 / 5)
        assert beta_m4(BetaParams(2, 1)) == pytest.approx(1 / 3)

    @pytest.mark.parametrize("pq,want", [((1, 1), 0), ((2, 1), 6), ((5, 4), 0)])
    def test_tau_values(self, pq, want):
        assert tau(*pq) == want

    @given(shapes, shapes)
    def test_tau_identity(self, p, q):
        lhs = beta_m2(BetaParams(p, q)) - 1 / 3
        rhs = tau(p, q) / (3 * (p + q) * (p + q + 1))
        assert lhs == pytest.approx(rhs, abs=1e-12)

    def test_mixture_moment(self):
        assert mixture_moment(Alternative.from_pqe(3, 1, 0.0), 2) == pytest.approx(1 / 3)
        assert mixture_moment(Alternative.from_pqe(2, 1, 1.0), 1) == pytest.approx(2 / 3)
        assert mixture_moment(Alternative.from_pqe(6, 4, 0.5), 1) == pytest.approx(0.55)
        with pytest.raises(ValueError):
            mixture_moment(NULL, 3)

    @pytest.mark.parametrize("p,q,eps", [(0.55, 0.5, 0.5), (0.5, 0.5, 0.9), (4, 3, 1), (0.8, 0.3, 1)])
    @pytest.mark.parametrize("k", [1, 2, 4])
    def test_moments_match_quadrature(self, p, q, eps, k):
        a = alt(p, q, eps)
        ref = (1 - eps) / (k + 1) + eps * stats.beta(p, q).moment(k)
        num, _ = integrate.quad(lambda x: x**k * density(a, x), 0, 1, limit=200,
                                points=[0.5], epsabs=1e-11)
        assert mixture_moment(a, k) == pytest.approx(ref, abs=1e-12)
        assert mixture_moment(a, k) == pytest.approx(num, abs=1e-7)


class TestDensity:
    def test_values(self):
        assert density(NULL, 0.3) == 1.0
        assert density(Alternative.from_pqe(2, 1, 1.0), 0.5) == pytest.approx(1.0)

    def test_outside_open_interval(self):
        with pytest.raises(ValueError):
            density(NULL, 0.0)
        with pytest.raises(ValueError):
            density(NULL, 1.2)

    def test_integrates_to_one(self):
        a = Alternative.from_pqe(0.55, 0.5, 0.5)
        from pitmaneff.quadrature import tanh_sinh
        from pitmaneff.dist_core import _density

        assert tanh_sinh(lambda x, xc: _density(a, x, xc)).value == pytest.approx(1.0, abs=1e-8)


class TestSampling:
    def test_null_mean(self):
        x = sample(NULL, 1_000_000, np.random.default_rng(1))
        se = math.sqrt(1 / 12 / x.size)
        assert abs(x.mean() - 0.5) < 3 * se

    def test_beta_mean(self):
        b = stats.beta(6, 4)
        x = sample(Alternative.from_pqe(6, 4, 1.0), 200_000, np.random.default_rng(2))
        assert abs(x.mean() - 0.6) < 3 * b.std() / math.sqrt(x.size)

    def test_arcsine_cdf(self):
        x = sample(Alternative.from_pqe(0.5, 0.5, 1.0), 100_000, np.random.default_rng(3))
        frac = np.mean(x <= 0.5)
        assert abs(frac - 0.5) < 3 * math.sqrt(0.25 / x.size)
        assert stats.kstest(x, stats.beta(0.5, 0.5).cdf).statistic < 0.01

    def test_mixture_ks(self):
        a = Alternative.from_pqe(0.55, 0.5, 0.5)
        x = sample(a, 100_000, np.random.default_rng(4))
        cdf = lambda t: 0.5 * t + 0.5 * stats.beta(0.55, 0.5).cdf(t)  # noqa: E731
        assert stats.kstest(x, cdf).statistic < 0.01

    def test_reproducible(self):
        a = Alternative.from_pqe(3, 1, 0.2)
        x1 = sample(a, 500, np.random.default_rng(9))
        x2 = sample(a, 500, np.random.default_rng(9))
        assert np.array_equal(x1, x2)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            sample(NULL, 0, np.random.default_rng())


class TestHellinger:
    def test_identical(self):
        a = Alternative.from_pqe(4, 3, 1)
        assert hellinger(a, a) == 0.0

    @pytest.mark.parametrize("pqe,want", [((1.1, 1, 1), 0.048), ((4, 3, 1), 0.479)])
    def test_printed_values(self, pqe, want):
        assert hellinger(Alternative.from_pqe(*pqe), NULL) == pytest.approx(want, abs=0.002)

    def test_against_scipy_quad(self):
        a, b = alt(0.5, 0.5, 0.9), alt(3, 1, 0.2)
        f = lambda x: (math.sqrt(density(a, x)) - math.sqrt(density(b, x))) ** 2  # noqa: E731
        ref, _ = integrate.quad(f, 0, 1, limit=400, points=[0.5])
        assert hellinger(a, b) == pytest.approx(math.sqrt(ref), abs=1e-6)

    @settings(max_examples=20, deadline=None)
    @given(shapes, shapes, st.floats(0.05, 1), shapes, shapes, st.floats(0.05, 1))
    def test_symmetry_and_range(self, p1, q1, e1, p2, q2, e2):
        a, b = alt(p1, q1, e1), alt(p2, q2, e2)
        h = hellinger(a, b)
        assert 0 <= h <= math.sqrt(2)
        assert h == pytest.approx(hellinger(b, a), abs=1e-10)

    def test_product_closed_form(self):
        assert hellinger_product(0.3, 1) == pytest.approx(0.3)
        assert hellinger_product(0.0, 50) == 0.0
        vals = [hellinger_product(0.1, n) for n in (1, 2, 5, 20, 100, 10_000)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] == pytest.approx(math.sqrt(2), abs=1e-3)

    @given(st.floats(1e-3, 1.4), st.integers(1, 500))
    def test_product_increasing(self, h, n):
        # strictly increasing until it saturates at sqrt(2) in double precision
        if (1 - h * h / 2) ** (n + 1) > 1e-12:
            assert hellinger_product(h, n + 1) > hellinger_product(h, n)
        assert hellinger_product(h, n + 1) >= hellinger_product(h, n)
