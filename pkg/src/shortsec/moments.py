"""SNR-averaged moments behind the Gaussian rate approximation.

Averaging the finite-blocklength secrecy rate over the two fading laws
leaves ten blocklength-independent integrals: five against the
legitimate Gamma(K, mean_snr) density (p0..p4) and five against the
eavesdropper exponential density (q0..q4), taken over capacity,
root-dispersion and their squares/cross term. Mixing them with the two
tail quantiles gives five coefficients mu0..mu4 such that the rate at
blocklength N is approximately Normal with

    mean(N)     = mu0 - mu1 / sqrt(N)
    variance(N) = mu4 / N + mu3 / sqrt(N) + mu2.

Quadrature is adaptive Gauss-Legendre on a truncated support; the
truncation points put the discarded tail far below the requested
relative tolerance.
"""

import heapq
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence, Tuple

import numpy as np

from .model import SystemConfig, dispersion
from .specfun import q_inverse

_LN2 = math.log(2.0)

#: default relative tolerance for the moment integrals
DEFAULT_REL_TOL = 1e-9

MomentTuple = Tuple[float, float, float, float, float]


class QuadratureError(RuntimeError):
    """Adaptive quadrature failed to reach the requested tolerance."""

    def __init__(self, message: str, interval=None, estimate=None, residual=None):
        super().__init__(message)
        self.interval = interval
        self.estimate = estimate
        self.residual = residual


@lru_cache(maxsize=8)
def _gl_rule(n: int):
    return np.polynomial.legendre.leggauss(n)


def adaptive_gauss_legendre(f: Callable[[np.ndarray], np.ndarray],
                            a: float, b: float,
                            rel_tol: float = DEFAULT_REL_TOL,
                            nodes: int = 20,
                            max_panels: int = 4096,
                            initial_panels: int = 8) -> float:
    """Integrate a vectorized integrand over [a, b] adaptively.

    Each panel carries an embedded error estimate (difference between the
    n-point and 2n-point Gauss-Legendre values); the panel with the worst
    estimate is halved until the error sum drops below the global target.
    Worst-first refinement copes with endpoint derivative kinks (such as
    the sqrt behaviour of the root-dispersion integrands at zero SNR)
    without starving tiny corner panels.

    Args:
        f: vectorized integrand; called with an ndarray of nodes.
        a, b: integration limits, a < b.
        rel_tol: target relative accuracy of the full integral.
        nodes: Gauss-Legendre points of the coarse rule (fine rule is 2x).
        max_panels: subdivision budget before giving up.
        initial_panels: uniform panels to seed the subdivision.

    Returns:
        The integral estimate (fine-rule sum).

    Raises:
        QuadratureError: if the budget is exhausted before convergence
            (diagnostics carry the worst panel).
    """
    if not b > a:
        raise ValueError(f"need b > a, got [{a!r}, {b!r}]")
    xc, wc = _gl_rule(nodes)
    xf, wf = _gl_rule(2 * nodes)

    def panel(lo: float, hi: float):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (lo + hi)
        coarse = half * float(np.dot(wc, f(mid + half * xc)))
        fine = half * float(np.dot(wf, f(mid + half * xf)))
        return fine, abs(fine - coarse)

    heap = []  # (-err, lo, hi, value)
    edges = np.linspace(a, b, initial_panels + 1)
    for i in range(initial_panels):
        value, err = panel(edges[i], edges[i + 1])
        heapq.heappush(heap, (-err, edges[i], edges[i + 1], value))
    n_panels = initial_panels
    while True:
        total = sum(entry[3] for entry in heap)
        err_sum = -sum(entry[0] for entry in heap)
        if err_sum <= rel_tol * max(abs(total), 1e-300):
            return total
        if n_panels >= max_panels:
            worst = heap[0]
            raise QuadratureError(
                f"error sum {err_sum:g} above target after {n_panels} panels; "
                f"worst panel [{worst[1]:g}, {worst[2]:g}] holds {-worst[0]:g}",
                interval=(worst[1], worst[2]), estimate=total, residual=err_sum,
            )
        _, lo, hi, _ = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        for sub in ((lo, mid), (mid, hi)):
            value, err = panel(*sub)
            heapq.heappush(heap, (-err, sub[0], sub[1], value))
        n_panels += 1


def _capacity(x: np.ndarray) -> np.ndarray:
    return np.log1p(x) / _LN2


def _integrate_moments(pdf, upper: float, rel_tol: float) -> MomentTuple:
    """The five rate moments against one SNR density on [0, upper]."""

    def against(g):
        return adaptive_gauss_legendre(lambda x: g(x) * pdf(x), 0.0, upper,
                                       rel_tol=rel_tol)

    m0 = against(_capacity)
    m1 = against(lambda x: np.sqrt(dispersion(x)))
    m2 = against(lambda x: np.square(_capacity(x)))
    m3 = against(lambda x: 2.0 * _capacity(x) * np.sqrt(dispersion(x)))
    m4 = against(dispersion)
    return (m0, m1, m2, m3, m4)


@lru_cache(maxsize=512)
def _legitimate_raw(K: int, mean_snr: float, rel_tol: float) -> MomentTuple:
    log_norm = K * math.log(mean_snr) + math.lgamma(K)

    def pdf(x):
        return np.exp((K - 1) * np.log(x) - x / mean_snr - log_norm)

    upper = mean_snr * (K + 40.0 * math.sqrt(K))
    return _integrate_moments(pdf, upper, rel_tol)


@lru_cache(maxsize=512)
def _eavesdropper_raw(mean_snr: float, rel_tol: float) -> MomentTuple:
    def pdf(x):
        return np.exp(-x / mean_snr) / mean_snr

    return _integrate_moments(pdf, 40.0 * mean_snr, rel_tol)


def legitimate_moments(cfg: SystemConfig,
                       rel_tol: float = DEFAULT_REL_TOL) -> MomentTuple:
    """Moments p0..p4 of the legitimate link.

    p0 = E[C_b], p1 = E[sqrt(V_b)], p2 = E[C_b^2], p3 = E[2 C_b sqrt(V_b)],
    p4 = E[V_b], expectation over gamma_b ~ Gamma(K, mean_snr).
    """
    return _legitimate_raw(cfg.K, cfg.mean_snr, rel_tol)


def eavesdropper_moments(cfg: SystemConfig,
                         rel_tol: float = DEFAULT_REL_TOL) -> MomentTuple:
    """Moments q0..q4 of the eavesdropper link (exponential SNR)."""
    return _eavesdropper_raw(cfg.mean_snr, rel_tol)


def mu_coefficients(p: Sequence[float], q: Sequence[float],
                    eps_bar: float, delta_bar: float) -> MomentTuple:
    """Blocklength-independent coefficients of the Gaussian fit.

    Args:
        p: legitimate moments p0..p4.
        q: eavesdropper moments q0..q4.
        eps_bar, delta_bar: tail targets, each in (0, 1).

    Returns:
        (mu0, mu1, mu2, mu3, mu4).
    """
    p0, p1, p2, p3, p4 = (float(v) for v in p)
    q0, q1, q2, q3, q4 = (float(v) for v in q)
    qe = q_inverse(eps_bar)
    qd = q_inverse(delta_bar)
    mu0 = p0 - q0
    mu1 = (p1 * qe + q1 * qd) / _LN2
    mu2 = (p2 - p0 * p0) + (q2 - q0 * q0)
    mu3 = ((2.0 * p0 * p1 - p3) * qe - (2.0 * q0 * q1 - q3) * qd) / _LN2
    mu4 = ((p4 - p1 * p1) * qe * qe + (q4 - q1 * q1) * qd * qd) / (_LN2 * _LN2)
    return (mu0, mu1, mu2, mu3, mu4)


@dataclass(frozen=True)
class MomentSet:
    """The ten raw moments plus the five mixed coefficients."""

    p0: float
    p1: float
    p2: float
    p3: float
    p4: float
    q0: float
    q1: float
    q2: float
    q3: float
    q4: float
    mu0: float
    mu1: float
    mu2: float
    mu3: float
    mu4: float

    @property
    def p(self) -> MomentTuple:
        return (self.p0, self.p1, self.p2, self.p3, self.p4)

    @property
    def q(self) -> MomentTuple:
        return (self.q0, self.q1, self.q2, self.q3, self.q4)

    @property
    def mu(self) -> MomentTuple:
        return (self.mu0, self.mu1, self.mu2, self.mu3, self.mu4)


def moment_set(cfg: SystemConfig, rel_tol: float = DEFAULT_REL_TOL) -> MomentSet:
    """All fifteen quantities for one scenario (integrals cached)."""
    p = legitimate_moments(cfg, rel_tol)
    q = eavesdropper_moments(cfg, rel_tol)
    mu = mu_coefficients(p, q, cfg.eps_bar, cfg.delta_bar)
    return MomentSet(*p, *q, *mu)


@dataclass(frozen=True)
class GaussianFit:
    """Moment-matched normal law of the rate at one blocklength."""

    mean: float
    variance: float

    @property
    def std(self) -> float:
        return math.sqrt(self.variance)


def fit_at_blocklength(mu: Sequence[float], N) -> GaussianFit:
    """Gaussian fit N(mean(N), variance(N)) from the mu coefficients.

    Args:
        mu: (mu0..mu4).
        N: blocklength, positive (int or float; the continuous relaxation
           is meaningful).

    Raises:
        ValueError: on nonpositive N, or variance below -1e-12 (a genuinely
            broken coefficient set rather than rounding noise; tiny negative
            values are clamped to zero).
    """
    if N <= 0:
        raise ValueError(f"blocklength must be positive, got {N!r}")
    mu0, mu1, mu2, mu3, mu4 = (float(v) for v in mu)
    rn = 1.0 / math.sqrt(N)
    mean = mu0 - mu1 * rn
    variance = (mu4 * rn + mu3) * rn + mu2
    if variance < 0.0:
        if variance < -1e-12:
            raise ValueError(
                f"variance {variance!r} at N={N!r} is negative beyond rounding noise"
            )
        variance = 0.0
    return GaussianFit(mean=mean, variance=variance)
