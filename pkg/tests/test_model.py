"""Scenario container and finite-blocklength rate expressions."""

import math

import numpy as np
import pytest
from scipy import integrate
from scipy.stats import expon, gamma as gamma_dist

from shortsec.model import (
    ChannelGains,
    SystemConfig,
    achievable_secrecy_rate,
    db_to_linear,
    dispersion,
    linear_to_db,
    rate_bounds,
    secrecy_capacity,
    snr_pdf_eavesdropper,
    snr_pdf_legitimate,
)


def cfg(**kw):
    base = dict(K=4, mean_snr=10.0, eps_bar=1e-3, delta_bar=1e-3,
                B=200, N_max=1000, zeta=0.1)
    base.update(kw)
    return SystemConfig(**base)


class TestSystemConfig:
    def test_accepts_reasonable_values(self):
        c = cfg()
        assert c.K == 4 and c.outage_constrained

    @pytest.mark.parametrize("field,value", [
        ("K", 0), ("K", 2.5), ("B", 0), ("N_max", 0),
        ("mean_snr", 0.0), ("mean_snr", -1.0), ("mean_snr", math.inf),
        ("eps_bar", 0.0), ("eps_bar", 0.6), ("delta_bar", 1.2),
        ("zeta", 0.0), ("zeta", 0.7), ("zeta", -0.1),
    ])
    def test_rejects_out_of_range(self, field, value):
        with pytest.raises(ValueError):
            cfg(**{field: value})

    def test_zeta_none_and_one_mean_unconstrained(self):
        assert not cfg(zeta=None).outage_constrained
        assert not cfg(zeta=1.0).outage_constrained
        assert cfg(zeta=0.5).outage_constrained

    def test_frozen(self):
        with pytest.raises(Exception):
            cfg().K = 8


def test_db_round_trip():
    assert db_to_linear(10.0) == pytest.approx(10.0, rel=1e-15)
    assert db_to_linear(0.0) == 1.0
    for x in (0.01, 1.0, 3.5, 250.0):
        assert db_to_linear(linear_to_db(x)) == pytest.approx(x, rel=1e-14)
    with pytest.raises(ValueError):
        linear_to_db(0.0)


class TestSnrDensities:
    @pytest.mark.parametrize("K,gs", [(1, 0.5), (2, 1.0), (4, 10.0), (8, 100.0), (16, 3.0)])
    def test_legitimate_matches_gamma_law(self, K, gs):
        c = cfg(K=K, mean_snr=gs)
        x = np.linspace(0.0, gs * (K + 30), 400)
        want = gamma_dist.pdf(x, a=K, scale=gs)
        assert np.allclose(snr_pdf_legitimate(x, c), want, rtol=1e-12, atol=1e-300)

    def test_legitimate_integrates_to_one(self):
        c = cfg(K=6, mean_snr=4.0)
        total, err = integrate.quad(lambda x: snr_pdf_legitimate(x, c), 0.0, np.inf)
        assert total == pytest.approx(1.0, abs=1e-9)

    def test_eavesdropper_matches_exponential_law(self):
        c = cfg(mean_snr=7.0)
        x = np.linspace(0.0, 200.0, 300)
        assert np.allclose(snr_pdf_eavesdropper(x, c), expon.pdf(x, scale=7.0),
                           rtol=1e-13, atol=0.0)

    def test_zero_and_negative_arguments(self):
        c = cfg(K=3, mean_snr=2.0)
        assert snr_pdf_legitimate(-1.0, c) == 0.0
        assert snr_pdf_legitimate(0.0, c) == 0.0
        assert snr_pdf_legitimate(0.0, cfg(K=1, mean_snr=2.0)) == pytest.approx(0.5)
        assert snr_pdf_eavesdropper(-0.5, c) == 0.0
        assert snr_pdf_eavesdropper(0.0, c) == pytest.approx(0.5)


class TestRates:
    def test_secrecy_capacity_exact_case(self):
        # log2(4) - log2(2) = 1 bit
        assert secrecy_capacity(ChannelGains(3.0, 1.0)) == pytest.approx(1.0, rel=1e-15)
        assert secrecy_capacity(ChannelGains(1.0, 1.0)) == 0.0
        assert secrecy_capacity(ChannelGains(0.5, 3.0)) < 0.0

    def test_dispersion_closed_form(self):
        g = np.linspace(0.0, 50.0, 200)
        assert np.allclose(dispersion(g), 1.0 - (1.0 + g) ** -2, rtol=1e-13, atol=1e-16)
        assert dispersion(0.0) == 0.0
        assert dispersion(1e9) == pytest.approx(1.0, abs=1e-8)
        # tiny-gamma regime keeps relative accuracy (2 gamma leading term)
        assert dispersion(1e-12) == pytest.approx(2e-12, rel=1e-9)

    def test_achievable_rate_frozen_value(self):
        # derived independently from the defining expression with
        # scipy.special.ndtri in place of q_inverse
        g = ChannelGains(6.0, 0.5)
        r = achievable_secrecy_rate(g, 200, 1e-3, 1e-3)
        assert r == pytest.approx(1.6754079375726674, rel=1e-13)

    def test_achievable_rate_limits(self):
        g = ChannelGains(6.0, 0.5)
        cs = secrecy_capacity(g)
        assert achievable_secrecy_rate(g, 10 ** 12, 1e-3, 1e-3) == pytest.approx(cs, abs=1e-5)
        # penalty term shrinks like 1/sqrt(N)
        r100 = achievable_secrecy_rate(g, 100, 1e-3, 1e-3)
        r400 = achievable_secrecy_rate(g, 400, 1e-3, 1e-3)
        assert (cs - r400) == pytest.approx((cs - r100) / 2.0, rel=1e-12)
        # at eps = delta = 0.5 the second-order penalty vanishes
        assert achievable_secrecy_rate(g, 50, 0.5, 0.5) == pytest.approx(cs, rel=1e-15)

    def test_achievable_rate_vectorized(self):
        g = ChannelGains(np.array([6.0, 2.0, 1.0]), np.array([0.5, 0.5, 2.0]))
        r = achievable_secrecy_rate(g, 200, 1e-3, 1e-3)
        assert r.shape == (3,)
        assert r[0] == pytest.approx(1.6754079375726674, rel=1e-13)

    def test_rate_bounds_ordering_and_frozen(self):
        g = ChannelGains(6.0, 0.5)
        rt = rate_bounds(g, 200, 1e-3, 1e-3)
        assert rt.capacity == pytest.approx(2.222392421336448, rel=1e-14)
        assert rt.upper == pytest.approx(1.8880022865371164, rel=1e-13)
        assert rt.achievable < rt.upper < rt.capacity

    def test_rate_bounds_upper_absent_when_v3_negative(self):
        rt = rate_bounds(ChannelGains(0.1, 5.0), 100, 1e-3, 1e-3)
        assert rt.upper is None
        assert math.isfinite(rt.achievable)

    def test_rate_bounds_array_flags_nan(self):
        g = ChannelGains(np.array([6.0, 0.1]), np.array([0.5, 5.0]))
        rt = rate_bounds(g, 100, 1e-3, 1e-3)
        assert math.isfinite(rt.upper[0])
        assert math.isnan(rt.upper[1])

    def test_rate_bounds_requires_eps_delta_sum_below_one(self):
        with pytest.raises(ValueError):
            rate_bounds(ChannelGains(6.0, 0.5), 100, 0.5, 0.5)

    def test_blocklength_must_be_positive(self):
        with pytest.raises(ValueError):
            achievable_secrecy_rate(ChannelGains(1.0, 0.5), 0, 1e-3, 1e-3)

    def test_gains_must_be_nonnegative(self):
        with pytest.raises(ValueError):
            ChannelGains(-0.1, 1.0)
