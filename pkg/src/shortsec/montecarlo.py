"""Monte Carlo ground truth.

Samples fading realizations, builds empirical rate CDFs and outage
estimates, and brute-forces the throughput-optimal blocklength with
common random numbers across candidates.

Reproducibility contract: a Philox counter generator is keyed by the
seed and every sample owns a fixed, contiguous span of counter blocks
(one block is four 64-bit words). Sample i therefore draws the same
variates no matter how the index range is chunked or how many streams
the work is split into, and stream outputs concatenated in order are
bit-identical to a single-stream run. Variates are produced by inverse
CDF (exp through log1p, normal through the standard normal quantile),
one uniform per variate, which is what keeps the per-sample draw count
fixed; a rejection-based normal generator would break the block
alignment. Cross-implementation equality is not promised, only
within-implementation determinism.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.special import ndtri

from .feasible import FeasibleSet
from .model import ChannelGains, SystemConfig, dispersion, secrecy_capacity
from .optimizer import OptimizationResult
from .specfun import q_inverse

_LN2 = math.log(2.0)
_CHUNK = 65536          # samples per drawing chunk
_N_BLOCK = 64           # blocklength candidates per brute-force pass

_MODES = ("gain-space", "vector-space")


@dataclass(frozen=True)
class SimulationSpec:
    """What to simulate and how to draw it."""

    cfg: SystemConfig
    samples: int
    seed: int
    streams: int = 1
    mode: str = "gain-space"

    def __post_init__(self):
        if not (isinstance(self.samples, int) and self.samples >= 1):
            raise ValueError("samples must be a positive integer")
        if not (isinstance(self.seed, int) and 0 <= self.seed < 2 ** 64):
            raise ValueError("seed must fit in 64 unsigned bits")
        if not (isinstance(self.streams, int) and self.streams >= 1):
            raise ValueError("streams must be a positive integer")
        if self.mode not in _MODES:
            raise ValueError(f"mode must be one of {_MODES}")

    @property
    def uniforms_per_sample(self) -> int:
        if self.mode == "gain-space":
            return self.cfg.K + 1          # K exponentials + 1 exponential
        return 4 * self.cfg.K             # two complex K-vectors


@dataclass(frozen=True)
class EmpiricalCdf:
    """Step CDF of a sample; values are sorted ascending."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("need a nonempty 1-d sample")
        if np.any(np.diff(v) < 0.0):
            raise ValueError("values must be sorted ascending")

    @property
    def n(self) -> int:
        return self.values.size

    def query(self, r):
        """Fraction of the sample at or below r."""
        idx = np.searchsorted(self.values, r, side="right")
        out = idx / self.n
        return float(out) if np.ndim(r) == 0 else out


def _raw_uniforms(seed: int, start_sample: int, count: int,
                  per_sample: int) -> np.ndarray:
    """Open-interval uniforms, shape (count, per_sample), block-aligned."""
    blocks_per_sample = -(-per_sample // 4)
    bg = np.random.Philox(key=seed)
    if start_sample:
        bg.advance(start_sample * blocks_per_sample)
    raw = bg.random_raw(count * blocks_per_sample * 4)
    raw = raw.reshape(count, blocks_per_sample * 4)[:, :per_sample]
    # 53-bit mantissa offset keeps 0 and 1 out of the support
    return ((raw >> np.uint64(11)) + 0.5) * 2.0 ** -53


def _gains_for_range(spec: SimulationSpec, start: int, count: int) -> Tuple[np.ndarray, np.ndarray]:
    K = spec.cfg.K
    gs = spec.cfg.mean_snr
    u = _raw_uniforms(spec.seed, start, count, spec.uniforms_per_sample)
    if spec.mode == "gain-space":
        exps = -np.log1p(-u)
        return gs * exps[:, :K].sum(axis=1), gs * exps[:, K]
    z = ndtri(u)
    hb = (z[:, 0:K] + 1j * z[:, K:2 * K]) / math.sqrt(2.0)
    he = (z[:, 2 * K:3 * K] + 1j * z[:, 3 * K:4 * K]) / math.sqrt(2.0)
    norm_sq = np.sum(hb.real ** 2 + hb.imag ** 2, axis=1)
    # beamforming toward the intended receiver: w = conj(h_b) / ||h_b||
    proj = np.sum(he * np.conj(hb), axis=1)
    gamma_b = gs * norm_sq
    gamma_e = gs * (proj.real ** 2 + proj.imag ** 2) / norm_sq
    return gamma_b, gamma_e


def sample_gains(spec: SimulationSpec, count: Optional[int] = None) -> ChannelGains:
    """Draw channel gain realizations (struct of arrays).

    Work splits into spec.streams contiguous index ranges processed in
    order; the result is bit-identical for any stream count.
    """
    total = spec.samples if count is None else int(count)
    if total < 1:
        raise ValueError("count must be positive")
    gb = np.empty(total, dtype=np.float64)
    ge = np.empty(total, dtype=np.float64)
    bounds = [total * s // spec.streams for s in range(spec.streams + 1)]
    for s in range(spec.streams):
        lo, hi = bounds[s], bounds[s + 1]
        pos = lo
        while pos < hi:
            step = min(_CHUNK, hi - pos)
            gb[pos:pos + step], ge[pos:pos + step] = _gains_for_range(spec, pos, step)
            pos += step
    return ChannelGains(gamma_b=gb, gamma_e=ge)


def _rate_parts(spec: SimulationSpec, gains: ChannelGains) -> Tuple[np.ndarray, np.ndarray]:
    """Per-sample (X, Y) with rate(N) = X - Y / sqrt(N)."""
    cfg = spec.cfg
    X = secrecy_capacity(gains)
    Y = (np.sqrt(dispersion(gains.gamma_b)) * q_inverse(cfg.eps_bar)
         + np.sqrt(dispersion(gains.gamma_e)) * q_inverse(cfg.delta_bar)) / _LN2
    return np.asarray(X), np.asarray(Y)


def empirical_rate_cdf(spec: SimulationSpec, N: int) -> EmpiricalCdf:
    """Empirical CDF of the achievable secrecy rate at blocklength N."""
    if N < 1:
        raise ValueError("blocklength must be at least 1")
    X, Y = _rate_parts(spec, sample_gains(spec))
    rates = X - Y / math.sqrt(N)
    return EmpiricalCdf(values=np.sort(rates))


def empirical_outage(spec: SimulationSpec, N: int,
                     rate_threshold: Optional[float] = None) -> float:
    """Fraction of realizations whose rate falls at or below the target.

    The target defaults to the operating rate B/N.
    """
    if N < 1:
        raise ValueError("blocklength must be at least 1")
    thr = spec.cfg.B / N if rate_threshold is None else float(rate_threshold)
    X, Y = _rate_parts(spec, sample_gains(spec))
    return float(np.mean(X - Y / math.sqrt(N) <= thr))


def _intervals_from_mask(mask: np.ndarray) -> Tuple[Tuple[int, int], ...]:
    """Maximal runs of True as closed [lo, hi] blocklength intervals."""
    idx = np.flatnonzero(mask) + 1        # N = index + 1
    if idx.size == 0:
        return ()
    cuts = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate(([0], cuts + 1))
    ends = np.concatenate((cuts, [idx.size - 1]))
    return tuple((int(idx[s]), int(idx[e])) for s, e in zip(starts, ends))


def brute_force_optimum(spec: SimulationSpec) -> OptimizationResult:
    """Empirical throughput argmax over N in [1, N_max], shared randomness.

    The same gain sample evaluates every candidate, so the empirical
    outage is exactly nonincreasing in N and the feasible region is
    noise-consistent across candidates. First maximum wins ties.
    """
    cfg = spec.cfg
    X, Y = _rate_parts(spec, sample_gains(spec))
    N_all = np.arange(1, cfg.N_max + 1, dtype=np.float64)
    p_hat = np.empty(cfg.N_max, dtype=np.float64)
    for lo in range(0, cfg.N_max, _N_BLOCK):
        Nc = N_all[lo:lo + _N_BLOCK]
        rates = X[None, :] - Y[None, :] / np.sqrt(Nc)[:, None]
        p_hat[lo:lo + _N_BLOCK] = np.mean(rates <= (cfg.B / Nc)[:, None], axis=1)
    T_hat = (cfg.B / N_all) * (1.0 - p_hat)
    if cfg.outage_constrained:
        mask = p_hat <= cfg.zeta
        if not mask.any():
            return OptimizationResult(
                N_opt=None, throughput_opt=None, outage_at_opt=None,
                feasible=FeasibleSet(reason="no blocklength met the threshold empirically"),
                evaluations=cfg.N_max, method="monte-carlo",
                reason="empirical outage above the threshold everywhere")
        cand = np.flatnonzero(mask)
    else:
        cand = np.arange(cfg.N_max)
    j = cand[int(np.argmax(T_hat[cand]))]
    return OptimizationResult(
        N_opt=int(j + 1), throughput_opt=float(T_hat[j]),
        outage_at_opt=float(p_hat[j]),
        feasible=FeasibleSet(intervals=_intervals_from_mask(
            p_hat <= cfg.zeta if cfg.outage_constrained else np.ones(cfg.N_max, bool))),
        evaluations=cfg.N_max, method="monte-carlo")
