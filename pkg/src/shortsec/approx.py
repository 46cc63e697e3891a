"""Gaussian approximation of secrecy outage and effective throughput.

The fading-averaged secrecy rate at blocklength N is treated as normal
with the moment-matched mean/variance from :mod:`shortsec.moments`. An
outage is the event that the rate falls at or below the attempted
transmission rate R0 = B / N; effective throughput is the rate carried
by the packets that survive, T(N) = R0 (1 - p_out(N)).
"""

import math
from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .model import SystemConfig
from .moments import GaussianFit
from .specfun import std_normal_cdf

ArrayLike = Union[float, int, np.ndarray]


@dataclass(frozen=True)
class ThroughputPoint:
    """Outage and throughput at one blocklength."""

    N: int
    rate: float        # attempted rate R0 = B / N, bits per channel use
    outage: float
    throughput: float  # R0 * (1 - outage), by construction

    def __post_init__(self):
        if not 0.0 <= self.outage <= 1.0:
            raise ValueError(f"outage must be a probability, got {self.outage!r}")


def approx_cdf(r: ArrayLike, fit: GaussianFit) -> ArrayLike:
    """CDF of the fitted rate law at threshold r.

    Degenerate fits (zero variance) collapse to the step 1{r >= mean},
    matching the convention that outage at R0 = mean counts as outage.
    """
    if fit.variance == 0.0:
        r = np.asarray(r, dtype=float)
        out = np.where(r >= fit.mean, 1.0, 0.0)
        return out if out.ndim else float(out)
    z = (np.asarray(r, dtype=float) - fit.mean) / fit.std
    out = np.clip(std_normal_cdf(z), 0.0, 1.0)
    return out if out.ndim else float(out)


def outage_probability(N: ArrayLike, cfg: SystemConfig,
                       mu: Sequence[float]) -> ArrayLike:
    """Secrecy outage probability p_out(N) = P(rate <= B / N).

    Args:
        N: blocklength(s), positive; floats admit the continuous
           relaxation used by the optimizer.
        cfg: scenario (only B is read here).
        mu: Gaussian-fit coefficients (mu0..mu4).

    Returns:
        Probability in [0, 1], scalar or array matching N.
    """
    mu0, mu1, mu2, mu3, mu4 = (float(v) for v in mu)
    N = np.asarray(N, dtype=float)
    if np.any(N <= 0.0):
        raise ValueError("blocklengths must be positive")
    rn = 1.0 / np.sqrt(N)
    mean = mu0 - mu1 * rn
    var = (mu4 * rn + mu3) * rn + mu2
    if np.any(var < -1e-12):
        raise ValueError("fit variance negative beyond rounding noise")
    var = np.maximum(var, 0.0)
    r0 = cfg.B * rn * rn
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (r0 - mean) / np.sqrt(var)
        out = np.where(var > 0.0,
                       np.clip(std_normal_cdf(z), 0.0, 1.0),
                       (r0 >= mean).astype(float))
    return out if out.ndim else float(out)


def effective_throughput(N: int, cfg: SystemConfig,
                         mu: Sequence[float]) -> ThroughputPoint:
    """Throughput point at one blocklength.

    Args:
        N: blocklength, positive integer.
        cfg: scenario.
        mu: Gaussian-fit coefficients (mu0..mu4).
    """
    if not (isinstance(N, (int, np.integer)) and N >= 1):
        raise ValueError(f"N must be an integer >= 1, got {N!r}")
    p = float(outage_probability(N, cfg, mu))
    r0 = cfg.B / N
    return ThroughputPoint(N=int(N), rate=r0, outage=p,
                           throughput=r0 * (1.0 - p))
