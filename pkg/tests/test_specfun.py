"""Gaussian tail functions against independent oracles."""

import math

import numpy as np
import pytest
from scipy.special import ndtr, ndtri

from shortsec.specfun import q_function, q_inverse, std_normal_cdf, std_normal_pdf


def test_cdf_known_values():
    assert std_normal_cdf(0.0) == 0.5
    # frozen from erfc; cross-checked against scipy.special.ndtr below
    assert std_normal_cdf(1.0) == pytest.approx(0.8413447460685429, rel=1e-15)
    assert std_normal_cdf(-1.0) == pytest.approx(0.15865525393145705, rel=1e-15)
    assert std_normal_cdf(8.0) == pytest.approx(1.0, abs=1e-15)


def test_cdf_matches_scipy_ndtr():
    x = np.linspace(-8.5, 8.5, 2001)
    got = std_normal_cdf(x)
    want = ndtr(x)
    assert np.allclose(got, want, rtol=5e-14, atol=0.0)


def test_cdf_lower_tail_keeps_relative_accuracy():
    # 1 - Phi(-x) would be hopeless here (Phi(-30) ~ 5e-198); the erfc
    # route stays within implementation noise of cephes ndtr
    for x in (-10.0, -20.0, -30.0):
        rel = abs(std_normal_cdf(x) - ndtr(x)) / ndtr(x)
        assert rel < 1e-12


def test_q_is_complement_of_cdf():
    x = np.linspace(-6.0, 6.0, 501)
    assert np.allclose(q_function(x) + std_normal_cdf(x), 1.0, rtol=0.0, atol=1e-15)
    assert np.allclose(q_function(x), std_normal_cdf(-x), rtol=1e-14, atol=0.0)


def test_q_inverse_frozen_values():
    assert q_inverse(0.5) == 0.0
    # frozen; agrees with -ndtri(1e-3) = 3.090232306167813 to the last ulp
    assert q_inverse(1e-3) == pytest.approx(3.0902323061678132, rel=1e-14)
    assert q_inverse(1e-5) == pytest.approx(4.264890793922602, rel=1e-13)
    assert q_inverse(0.1) == pytest.approx(1.2815515655446004, rel=1e-14)
    assert q_inverse(0.9) == pytest.approx(-1.2815515655446004, rel=1e-14)


def test_q_inverse_matches_scipy_ndtri():
    ps = np.unique(np.concatenate([
        np.logspace(-12, -0.31, 997),
        1.0 - np.logspace(-12, -0.31, 997),
    ]))
    for p in ps:
        want = -ndtri(p)
        assert abs(q_inverse(p) - want) <= 1e-13 * max(1.0, abs(want))


def test_q_inverse_round_trip_contract():
    # |Q(Q^-1(p)) - p| <= 1e-12 * max(p, 1e-6) across [1e-12, 1 - 1e-12]
    ps = np.unique(np.concatenate([
        np.logspace(-12, -0.31, 2003),
        1.0 - np.logspace(-12, -0.31, 2003),
    ]))
    for p in ps:
        assert abs(q_function(q_inverse(p)) - p) <= 1e-12 * max(p, 1e-6)


def test_q_inverse_symmetry_and_monotonicity():
    ps = np.linspace(1e-6, 1.0 - 1e-6, 401)
    xs = np.array([q_inverse(p) for p in ps])
    assert np.all(np.diff(xs) < 0.0)
    # abs tolerance covers the rounding of 1 - p on the test side, which
    # gets amplified by 1/pdf in the tails
    for p in ps:
        assert q_inverse(p) == pytest.approx(-q_inverse(1.0 - p), abs=1e-9)


@pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.7, math.nan])
def test_q_inverse_domain(bad):
    with pytest.raises(ValueError):
        q_inverse(bad)


def test_pdf_is_derivative_of_cdf():
    # lower half only: near Phi ~ 1 the central difference itself drowns
    # in ulp noise, which says nothing about the pdf
    xs = np.linspace(-5.0, 0.0, 51)
    h = 1e-6
    for x in xs:
        fd = (std_normal_cdf(x + h) - std_normal_cdf(x - h)) / (2.0 * h)
        assert fd == pytest.approx(std_normal_pdf(x), rel=1e-7, abs=1e-12)
    assert np.allclose(std_normal_pdf(xs), std_normal_pdf(-xs), rtol=0.0, atol=0.0)
