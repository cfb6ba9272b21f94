import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.stats import beta as beta_dist
from scipy.stats import gamma as gamma_dist

from multiggm.errors import (DimensionTooLarge, InconsistentState,
                             InvalidParameter)
from multiggm.priors import (LogisticBeta, MrfParams, SpikeSlabGamma,
                             gamma_log_pdf, logistic_beta_log_density,
                             mrf_conditional_odds, mrf_log_density,
                             mrf_log_normalizer, mrf_normalizer,
                             omega_edge_log_density, spike_slab_log_density)


def slow_normalizer(nu, coupling):
    """Direct double-loop enumeration, independent of the library code."""
    B = coupling.shape[0]
    total = 0.0
    for bits in itertools.product([0, 1], repeat=B):
        g = np.array(bits, dtype=float)
        total += np.exp(nu * g.sum() + g @ coupling @ g)
    return total


def random_coupling(rng, B):
    c = rng.uniform(0.0, 2.0, size=(B, B))
    c = np.triu(c, 1)
    return c + c.T


class TestMrfParams:
    def test_rejects_nonsquare(self):
        with pytest.raises(InvalidParameter):
            MrfParams(0.0, np.zeros((2, 3)))

    def test_rejects_nonzero_diagonal(self):
        with pytest.raises(InvalidParameter):
            MrfParams(0.0, np.eye(3))

    def test_rejects_asymmetric(self):
        c = np.zeros((2, 2))
        c[0, 1] = 1.0
        with pytest.raises(InvalidParameter):
            MrfParams(0.0, c)

    def test_rejects_negative(self):
        c = np.zeros((2, 2))
        c[0, 1] = c[1, 0] = -0.5
        with pytest.raises(InvalidParameter):
            MrfParams(0.0, c)


class TestNormalizer:
    def test_zero_coupling_closed_form(self):
        # independent coordinates: C = (1 + e^nu)^B
        for nu in (-2.0, 0.0, 1.5):
            for B in (1, 3, 5):
                want = (1.0 + np.exp(nu)) ** B
                got = mrf_normalizer(MrfParams(nu, np.zeros((B, B))))
                assert got == pytest.approx(want, rel=1e-12)

    def test_hand_computed_2d(self):
        # states 00, 10, 01, 11 with coupling theta:
        # C = 1 + 2 e^nu + e^(2 nu + 2 theta)
        nu, theta = -1.0, 0.7
        c = np.array([[0.0, theta], [theta, 0.0]])
        want = 1.0 + 2 * np.exp(nu) + np.exp(2 * nu + 2 * theta)
        assert mrf_normalizer(MrfParams(nu, c)) == pytest.approx(want, rel=1e-12)

    @pytest.mark.parametrize("B", [2, 3, 4, 5, 6])
    def test_matches_slow_enumeration(self, B):
        rng = np.random.default_rng(B)
        for _ in range(5):
            c = random_coupling(rng, B)
            nu = rng.uniform(-3, 1)
            got = mrf_normalizer(MrfParams(nu, c))
            assert got == pytest.approx(slow_normalizer(nu, c), rel=1e-12)

    def test_vectorized_sparsity(self):
        c = random_coupling(np.random.default_rng(0), 4)
        nus = np.array([-2.0, 0.0, 0.5])
        got = mrf_log_normalizer(nus, c)
        for i, nu in enumerate(nus):
            assert got[i] == pytest.approx(np.log(slow_normalizer(nu, c)), rel=1e-12)

    def test_dimension_cap(self):
        with pytest.raises(DimensionTooLarge):
            mrf_log_normalizer(0.0, np.zeros((21, 21)))


class TestDensityAndOdds:
    @pytest.mark.parametrize("B", [2, 3, 4])
    def test_density_sums_to_one(self, B):
        rng = np.random.default_rng(10 + B)
        params = MrfParams(rng.uniform(-2, 1), random_coupling(rng, B))
        total = sum(
            np.exp(mrf_log_density(np.array(bits), params))
            for bits in itertools.product([0, 1], repeat=B))
        assert total == pytest.approx(1.0, rel=1e-12)

    def test_conditional_odds_match_density_ratio(self):
        rng = np.random.default_rng(99)
        B = 4
        params = MrfParams(rng.uniform(-2, 1), random_coupling(rng, B))
        for bits in itertools.product([0, 1], repeat=B - 1):
            for idx in range(B):
                g_others = np.array(bits, dtype=float)
                g1 = np.insert(g_others, idx, 1.0)
                g0 = np.insert(g_others, idx, 0.0)
                want = mrf_log_density(g1, params) - mrf_log_density(g0, params)
                got = mrf_conditional_odds(idx, g_others, params)
                assert got == pytest.approx(want, abs=1e-12)

    def test_conditional_odds_index_errors(self):
        params = MrfParams(0.0, np.zeros((3, 3)))
        with pytest.raises(IndexError):
            mrf_conditional_odds(3, np.zeros(2), params)
        with pytest.raises(InvalidParameter):
            mrf_conditional_odds(0, np.zeros(3), params)


class TestScalarDensities:
    def test_gamma_log_pdf_matches_scipy(self):
        xs = np.array([0.1, 0.5, 1.0, 3.0])
        for shape, rate in [(1.0, 9.0), (4.0, 5.0), (2.5, 0.7)]:
            want = gamma_dist.logpdf(xs, shape, scale=1.0 / rate)
            assert np.allclose(gamma_log_pdf(xs, shape, rate), want, atol=1e-12)

    def test_gamma_log_pdf_integrates_to_one(self):
        total, _ = quad(lambda x: np.exp(gamma_log_pdf(x, 4.0, 5.0)), 0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_spike_slab_cases(self):
        prior = SpikeSlabGamma(4.0, 5.0)
        assert spike_slab_log_density(0.0, 0, prior) == 0.0
        assert spike_slab_log_density(0.3, 1, prior) == pytest.approx(
            gamma_dist.logpdf(0.3, 4.0, scale=0.2))
        with pytest.raises(InconsistentState):
            spike_slab_log_density(0.3, 0, prior)
        with pytest.raises(InconsistentState):
            spike_slab_log_density(0.0, 1, prior)

    def test_logistic_beta_matches_change_of_variables(self):
        # if logistic(x) ~ Beta(a,b) then density of x is
        # Beta pdf at logistic(x) times logistic'(x)
        prior = LogisticBeta(1.0, 7.0)
        for x in (-4.0, -1.0, 0.0, 2.0):
            p = 1.0 / (1.0 + np.exp(-x))
            want = beta_dist.logpdf(p, 1.0, 7.0) + np.log(p * (1 - p))
            assert logistic_beta_log_density(x, prior) == pytest.approx(want, abs=1e-10)

    def test_logistic_beta_integrates_to_one(self):
        prior = LogisticBeta(1.0, 19.0)
        total, _ = quad(lambda x: np.exp(logistic_beta_log_density(x, prior)),
                        -60, 30)
        assert total == pytest.approx(1.0, abs=1e-8)

    def test_logistic_beta_stable_in_tails(self):
        prior = LogisticBeta(1.0, 7.0)
        assert np.isfinite(logistic_beta_log_density(-700.0, prior))
        assert np.isfinite(logistic_beta_log_density(700.0, prior))

    def test_mean_probability(self):
        assert LogisticBeta(1.0, 7.0).mean_probability == pytest.approx(0.125)
        assert LogisticBeta(1.0, 19.0).mean_probability == pytest.approx(0.05)

    def test_omega_edge_log_density(self):
        from scipy.stats import norm
        assert omega_edge_log_density(0.3, 1, 0.02, 1.0) == pytest.approx(
            norm.logpdf(0.3, scale=1.0))
        assert omega_edge_log_density(0.01, 0, 0.02, 1.0) == pytest.approx(
            norm.logpdf(0.01, scale=0.02))
        with pytest.raises(InvalidParameter):
            omega_edge_log_density(0.1, 1, 1.0, 0.02)


@given(nu=st.floats(-4, 2), B=st.integers(1, 5), seed=st.integers(0, 10_000))
@settings(max_examples=60, deadline=None)
def test_normalizer_property(nu, B, seed):
    c = random_coupling(np.random.default_rng(seed), B)
    got = mrf_normalizer(MrfParams(nu, c))
    assert got == pytest.approx(slow_normalizer(nu, c), rel=1e-10)
    assert got >= 1.0  # the all-zero configuration alone contributes 1


# |x| capped where the naive reference below keeps full precision; the
# closed form itself stays finite far beyond this (see the tail test)
@given(x=st.floats(-15, 15), a=st.floats(0.5, 10), b=st.floats(0.5, 20))
@settings(max_examples=60, deadline=None)
def test_logistic_beta_property(x, a, b):
    prior = LogisticBeta(a, b)
    p = 1.0 / (1.0 + np.exp(-x))
    want = beta_dist.logpdf(p, a, b) + np.log(p) + np.log1p(-p)
    assert logistic_beta_log_density(x, prior) == pytest.approx(want, abs=1e-6)
