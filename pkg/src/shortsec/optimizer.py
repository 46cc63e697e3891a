"""Throughput-maximizing blocklength, general route.

Builds the Gaussian fit from the exact channel moments, derives the
feasible integer set, and evaluates throughput over every candidate in
one vectorized pass. Ties resolve to the smallest blocklength.
"""

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .approx import outage_probability
from .feasible import FeasibleSet, feasible_blocklengths
from .model import SystemConfig
from .moments import DEFAULT_REL_TOL, MomentSet, moment_set


@dataclass(frozen=True)
class OptimizationResult:
    """Outcome of a blocklength search.

    N_opt is None when no blocklength is feasible; reason then explains
    why. evaluations counts throughput evaluations performed.
    """

    N_opt: Optional[int]
    throughput_opt: Optional[float]
    outage_at_opt: Optional[float]
    feasible: FeasibleSet
    evaluations: int
    method: str
    reason: Optional[str] = None
    note: Optional[str] = None   # non-fatal diagnostics (near-boundary flags)

    @property
    def found(self) -> bool:
        return self.N_opt is not None


def optimize_over(candidates: np.ndarray, cfg: SystemConfig,
                  mu: Sequence[float]) -> tuple:
    """(N, throughput, outage) maximizing (B/N)(1 - p_out) over candidates.

    First maximum wins, so equal throughputs resolve to the smallest N.
    """
    N = np.asarray(candidates, dtype=np.float64)
    p = outage_probability(N, cfg, mu)
    T = (cfg.B / N) * (1.0 - p)
    i = int(np.argmax(T))
    return int(candidates[i]), float(T[i]), float(p[i])


def optimize_blocklength_general(cfg: SystemConfig,
                                 rel_tol: float = DEFAULT_REL_TOL,
                                 moments: Optional[MomentSet] = None) -> OptimizationResult:
    """Best integer blocklength in [1, N_max] under the outage threshold.

    Args:
        cfg: scenario (zeta void means unconstrained).
        rel_tol: moment quadrature tolerance.
        moments: precomputed MomentSet for cfg, to skip the quadrature.
    """
    ms = moments if moments is not None else moment_set(cfg, rel_tol)
    fs = feasible_blocklengths(cfg, ms.mu)
    if fs.is_empty:
        return OptimizationResult(
            N_opt=None, throughput_opt=None, outage_at_opt=None,
            feasible=fs, evaluations=0, method="general",
            reason=fs.reason or "no feasible blocklength")
    candidates = fs.integers()
    N_opt, T_opt, p_opt = optimize_over(candidates, cfg, ms.mu)
    return OptimizationResult(
        N_opt=N_opt, throughput_opt=T_opt, outage_at_opt=p_opt,
        feasible=fs, evaluations=len(candidates), method="general")
