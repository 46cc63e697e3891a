"""System model for short-packet transmission past an eavesdropper.

A K-antenna transmitter beamforms to a single-antenna receiver while a
single-antenna eavesdropper listens. Both links fade (quasi-static
Rayleigh); with maximum-ratio beamforming the legitimate SNR gamma_b is
Gamma(K, mean_snr)-distributed and the eavesdropper SNR gamma_e is
exponential with the same mean per branch.

Provides:
  * SystemConfig / ChannelGains / RateTriple containers
  * snr_pdf_legitimate, snr_pdf_eavesdropper -- the two SNR densities
  * secrecy_capacity, dispersion, achievable_secrecy_rate, rate_bounds
    -- finite-blocklength secrecy rate expressions (bits per channel use)

All rate functions are array-aware: ChannelGains may hold scalars or
parallel ndarrays, and results broadcast accordingly.
"""

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .specfun import q_inverse

_LN2 = math.log(2.0)

ArrayLike = Union[float, np.ndarray]


def db_to_linear(x_db: float) -> float:
    """Convert a dB quantity to linear scale."""
    return 10.0 ** (x_db / 10.0)


def linear_to_db(x: float) -> float:
    """Convert a linear quantity to dB."""
    if x <= 0.0:
        raise ValueError(f"dB undefined for nonpositive value {x!r}")
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SystemConfig:
    """Scenario parameters.

    Attributes:
        K: number of transmit antennas (>= 1).
        mean_snr: average per-branch SNR, linear scale (> 0).
        eps_bar: decoding-error target at the legitimate receiver,
            in (0, 0.5].
        delta_bar: information-leakage target at the eavesdropper,
            in (0, 0.5].
        B: information payload per packet, bits (>= 1).
        N_max: largest admissible blocklength, channel uses (>= 1).
        zeta: secrecy outage threshold in (0, 0.5], or None / 1.0 for an
            unconstrained run (the outage constraint is void).
    """

    K: int
    mean_snr: float
    eps_bar: float
    delta_bar: float
    B: int
    N_max: int
    zeta: Optional[float] = None

    def __post_init__(self):
        if not (isinstance(self.K, (int, np.integer)) and self.K >= 1):
            raise ValueError(f"K must be an integer >= 1, got {self.K!r}")
        if not (isinstance(self.B, (int, np.integer)) and self.B >= 1):
            raise ValueError(f"B must be an integer >= 1, got {self.B!r}")
        if not (isinstance(self.N_max, (int, np.integer)) and self.N_max >= 1):
            raise ValueError(f"N_max must be an integer >= 1, got {self.N_max!r}")
        if not (math.isfinite(self.mean_snr) and self.mean_snr > 0.0):
            raise ValueError(f"mean_snr must be positive, got {self.mean_snr!r}")
        for name in ("eps_bar", "delta_bar"):
            v = getattr(self, name)
            if not 0.0 < v <= 0.5:
                raise ValueError(f"{name} must lie in (0, 0.5], got {v!r}")
        z = self.zeta
        # zeta = 1.0 (or None) means the outage constraint is void; any
        # binding threshold must sit in (0, 0.5] where the Gaussian
        # reformulation of the constraint is valid.
        if z is not None and z != 1.0 and not 0.0 < z <= 0.5:
            raise ValueError(
                f"zeta must be in (0, 0.5], or None / 1.0 for unconstrained, got {z!r}"
            )

    @property
    def outage_constrained(self) -> bool:
        """True when the outage threshold actually binds."""
        return self.zeta is not None and self.zeta != 1.0


@dataclass(frozen=True)
class ChannelGains:
    """One realization (or a parallel batch) of the two link SNRs."""

    gamma_b: ArrayLike
    gamma_e: ArrayLike

    def __post_init__(self):
        if np.any(np.asarray(self.gamma_b) < 0.0) or np.any(np.asarray(self.gamma_e) < 0.0):
            raise ValueError("channel gains must be nonnegative")


@dataclass(frozen=True)
class RateTriple:
    """Secrecy-rate bounds at one gain realization and blocklength.

    ``upper`` is None when the cross-dispersion V3 is negative, in which
    case the converse expression is undefined; ``upper_defined`` mirrors
    that as a flag for array inputs.
    """

    achievable: ArrayLike
    upper: Optional[ArrayLike]
    capacity: ArrayLike


def snr_pdf_legitimate(x: ArrayLike, cfg: SystemConfig) -> ArrayLike:
    """Density of the legitimate SNR: Gamma(K, mean_snr).

    With maximum-ratio beamforming over K antennas the received SNR is the
    sum of K i.i.d. exponential branch SNRs, hence Gamma-distributed with
    shape K and scale mean_snr.

    Args:
        x: evaluation point(s), nonnegative.
        cfg: scenario.

    Returns:
        f(x), zero for x < 0.
    """
    x = np.asarray(x, dtype=float)
    gs = cfg.mean_snr
    k = cfg.K
    log_norm = k * math.log(gs) + math.lgamma(k)
    with np.errstate(divide="ignore", invalid="ignore"):
        logf = (k - 1) * np.log(x) - x / gs - log_norm
        out = np.where(x > 0.0, np.exp(logf), 0.0)
    # x = 0 boundary: finite only for K = 1 where the density is 1/mean_snr
    if k == 1:
        out = np.where(x == 0.0, 1.0 / gs, out)
    return out if out.ndim else float(out)


def snr_pdf_eavesdropper(x: ArrayLike, cfg: SystemConfig) -> ArrayLike:
    """Density of the eavesdropper SNR: exponential with mean mean_snr."""
    x = np.asarray(x, dtype=float)
    gs = cfg.mean_snr
    out = np.where(x >= 0.0, np.exp(-x / gs) / gs, 0.0)
    return out if out.ndim else float(out)


def secrecy_capacity(g: ChannelGains) -> ArrayLike:
    """Secrecy capacity log2(1 + gamma_b) - log2(1 + gamma_e), bits/use.

    Negative when the eavesdropper outfades the legitimate link; callers
    decide how to treat that (the outage machinery does it implicitly).
    """
    return (np.log1p(g.gamma_b) - np.log1p(g.gamma_e)) / _LN2


def dispersion(gamma: ArrayLike) -> ArrayLike:
    """Channel dispersion V = 1 - (1 + gamma)^-2.

    Evaluated as gamma (gamma + 2) / (1 + gamma)^2, which is the same
    quantity without the small-gamma cancellation.
    """
    gamma = np.asarray(gamma, dtype=float)
    out = gamma * (gamma + 2.0) / np.square(1.0 + gamma)
    return out if out.ndim else float(out)


def achievable_secrecy_rate(g: ChannelGains, N: int, eps_bar: float,
                            delta_bar: float) -> ArrayLike:
    """Second-order achievable secrecy rate at blocklength N, bits/use.

    R = C_s - [sqrt(V_b) Q^-1(eps) + sqrt(V_e) Q^-1(delta)] / (sqrt(N) ln 2).

    Args:
        g: gain realization(s).
        N: blocklength, a positive integer (or positive float for the
           continuous relaxation).
        eps_bar: decoding-error target in (0, 1).
        delta_bar: leakage target in (0, 1).
    """
    if N <= 0:
        raise ValueError(f"blocklength must be positive, got {N!r}")
    penalty = (np.sqrt(dispersion(g.gamma_b)) * q_inverse(eps_bar)
               + np.sqrt(dispersion(g.gamma_e)) * q_inverse(delta_bar))
    return secrecy_capacity(g) - penalty / (math.sqrt(N) * _LN2)


def rate_bounds(g: ChannelGains, N: int, eps_bar: float,
                delta_bar: float) -> RateTriple:
    """Achievable and converse secrecy-rate bounds plus the capacity.

    The converse uses the cross dispersion
    V3 = V_b + V_e - 2 V_e (1 + gamma_e) / (1 + gamma_b),
    which can go negative when the eavesdropper's channel is strong; the
    upper bound is then reported as None (scalar input) or NaN at the
    offending entries (array input).

    Args:
        g: gain realization(s).
        N: blocklength, positive.
        eps_bar, delta_bar: targets with eps_bar + delta_bar < 1 (needed
            for Q^-1 of the sum in the converse).
    """
    if eps_bar + delta_bar >= 1.0:
        raise ValueError("converse bound needs eps_bar + delta_bar < 1")
    if N <= 0:
        raise ValueError(f"blocklength must be positive, got {N!r}")
    cs = secrecy_capacity(g)
    ach = achievable_secrecy_rate(g, N, eps_bar, delta_bar)
    vb = dispersion(g.gamma_b)
    ve = dispersion(g.gamma_e)
    ratio = (1.0 + np.asarray(g.gamma_e, dtype=float)) / (1.0 + np.asarray(g.gamma_b))
    v3 = vb + ve - 2.0 * ratio * ve
    qsum = q_inverse(eps_bar + delta_bar)
    scalar = np.ndim(v3) == 0
    v3 = np.atleast_1d(np.asarray(v3, dtype=float))
    with np.errstate(invalid="ignore"):
        upper = np.atleast_1d(cs) - np.sqrt(np.where(v3 >= 0.0, v3, np.nan)) \
            * qsum / (math.sqrt(N) * _LN2)
    if scalar:
        up = float(upper[0])
        return RateTriple(achievable=float(np.asarray(ach)),
                          upper=None if math.isnan(up) else up,
                          capacity=float(np.asarray(cs)))
    return RateTriple(achievable=ach, upper=upper, capacity=cs)
