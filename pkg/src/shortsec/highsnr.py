"""Closed-form route for the high-SNR regime.

Deep in the high-SNR regime the rate distribution simplifies: the
capacity difference tends to log2(gamma_b / gamma_e), whose law no
longer involves the mean SNR, and both dispersions tend to one so the
finite-length penalty becomes t/sqrt(N) with
t = (Qinv(eps_bar) + Qinv(delta_bar)) / ln2. Outage, throughput, and
the throughput-optimal blocklength then come in closed form up to one
scalar root-find on the derivative factor Xi.

Everything is arranged around exp2(-h) in [0, 1) rather than 2^h, so
payloads large enough to underflow the tail (B in the hundreds) still
evaluate to the correct signs instead of overflowing.
"""

import math
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np

from .feasible import FeasibleSet
from .model import SystemConfig
from .optimizer import OptimizationResult
from .specfun import q_inverse

_LN2 = math.log(2.0)

ArrayLike = Union[float, np.ndarray]


@dataclass(frozen=True)
class HighSnrParams:
    """Inputs of the high-SNR closed forms.

    t is the quantile sum (Qinv(eps) + Qinv(delta)) / ln2 and must be
    nonnegative, which holds whenever both targets are at most 1/2.
    zeta is the outage threshold; None (or 1.0) means unconstrained.
    """

    t: float
    K: int
    B: int
    N_max: int
    zeta: Optional[float] = None

    def __post_init__(self):
        if not self.t >= 0.0:
            raise ValueError("t must be nonnegative (targets above 1/2?)")
        if not (isinstance(self.K, int) and self.K >= 1):
            raise ValueError("K must be a positive integer")
        if not (isinstance(self.B, int) and self.B >= 1):
            raise ValueError("B must be a positive integer")
        if not (isinstance(self.N_max, int) and self.N_max >= 1):
            raise ValueError("N_max must be a positive integer")
        if self.zeta is not None and not (0.0 < self.zeta <= 1.0):
            raise ValueError("zeta must lie in (0, 1] or be None")

    @classmethod
    def from_config(cls, cfg: SystemConfig) -> "HighSnrParams":
        t = (q_inverse(cfg.eps_bar) + q_inverse(cfg.delta_bar)) / _LN2
        zeta = cfg.zeta if cfg.outage_constrained else None
        return cls(t=t, K=cfg.K, B=cfg.B, N_max=cfg.N_max, zeta=zeta)

    @property
    def outage_constrained(self) -> bool:
        return self.zeta is not None and self.zeta < 1.0


def _as_float_array(N) -> np.ndarray:
    arr = np.asarray(N, dtype=np.float64)
    if np.any(arr < 1.0):
        raise ValueError("blocklength must be at least 1")
    return arr


def _h(N: np.ndarray, hp: HighSnrParams) -> np.ndarray:
    return hp.B / N + hp.t / np.sqrt(N)


def _scalar_like(value: np.ndarray, *inputs) -> ArrayLike:
    if all(np.ndim(x) == 0 for x in inputs):
        return float(value)
    return value


def highsnr_cdf(r: ArrayLike, N: ArrayLike, hp: HighSnrParams) -> ArrayLike:
    """P(rate <= r) at blocklength N: (2^(r+v) / (2^(r+v)+1))^K, v = t/sqrt(N)."""
    N_arr = _as_float_array(N)
    x = np.asarray(r, dtype=np.float64) + hp.t / np.sqrt(N_arr)
    with np.errstate(over="ignore"):      # exp2 -> inf for very negative r is fine
        out = np.exp(-hp.K * np.log1p(np.exp2(-x)))
    return _scalar_like(out, r, N)


def highsnr_outage(N: ArrayLike, hp: HighSnrParams) -> ArrayLike:
    """Decoding-or-leakage outage H(N)^K with h(N) = B/N + t/sqrt(N)."""
    N_arr = _as_float_array(N)
    out = np.exp(-hp.K * np.log1p(np.exp2(-_h(N_arr, hp))))
    return _scalar_like(out, N)


def highsnr_throughput(N: ArrayLike, hp: HighSnrParams) -> ArrayLike:
    """(B/N) * (1 - H(N)^K), kept accurate when the outage is near 0 or 1."""
    N_arr = _as_float_array(N)
    log_H = -np.log1p(np.exp2(-_h(N_arr, hp)))
    out = (hp.B / N_arr) * (-np.expm1(hp.K * log_H))
    return _scalar_like(out, N)


def _lam(N: np.ndarray, hp: HighSnrParams) -> np.ndarray:
    return _LN2 * (hp.B + 0.5 * hp.t * np.sqrt(N)) * hp.K


def xi(N: ArrayLike, hp: HighSnrParams) -> ArrayLike:
    """Sign of dT/dN: Xi(N) = (lambda/(N(2^h+1)) + 1) H^K - 1.

    Evaluated as s - q - s*q with s = (lambda/N) 2^-h/(1+2^-h) and
    q = 1 - H^K, which preserves the tiny positive values at small N
    instead of rounding them to 0 against the -1 term.
    """
    N_arr = _as_float_array(N)
    w = np.exp2(-_h(N_arr, hp))
    s = (_lam(N_arr, hp) / N_arr) * w / (1.0 + w)
    q = -np.expm1(-hp.K * np.log1p(w))    # 1 - H^K
    out = s - q - s * q
    return _scalar_like(out, N)


def xi1(N: ArrayLike, hp: HighSnrParams) -> ArrayLike:
    """Monotonicity driver of Xi:

    Xi1(N) = lambda^2 (K - 2^h) / (K N (2^h + 1)) + 2 lambda
             - (ln2/4) K t sqrt(N),
    negative then positive over N >= 1 (change near N1 = h^-1(log2 K)).
    """
    N_arr = _as_float_array(N)
    w = np.exp2(-_h(N_arr, hp))
    lam = _lam(N_arr, hp)
    first = lam * lam * (hp.K * w - 1.0) / (hp.K * N_arr * (1.0 + w))
    out = first + 2.0 * lam - 0.25 * _LN2 * hp.K * hp.t * np.sqrt(N_arr)
    return _scalar_like(out, N)


def inverse_h(y: float, hp: HighSnrParams, tol: float = 1e-9) -> float:
    """N with h(N) = y, by bisection (h is strictly decreasing)."""
    if y <= 0.0:
        raise ValueError("h is positive; no finite preimage for y <= 0")

    def h_scalar(N: float) -> float:
        return hp.B / N + hp.t / math.sqrt(N)

    lo = hi = 1.0
    while h_scalar(lo) < y:
        lo *= 0.5
    while h_scalar(hi) > y:
        hi *= 2.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if h_scalar(mid) > y:
            lo = mid
        else:
            hi = mid
        if hi - lo <= tol * max(1.0, mid):
            break
    return 0.5 * (lo + hi)


def unconstrained_optimum(hp: HighSnrParams) -> Tuple[float, int, float]:
    """(N_star_real, N_star_int, T at N_star_int), ignoring any threshold.

    N_star_real is the root of Xi found by doubling from [1, 2] and
    bisecting to |Xi| <= 1e-12 or width <= 1e-9 N. The integer optimum
    is whichever of floor/ceil carries more throughput (ties to the
    smaller). Xi(1) <= 0 short-circuits to N = 1; the sign structure is
    only guaranteed for B >= 50, so treat smaller payloads as advisory.
    """
    if xi(1.0, hp) <= 0.0:
        return 1.0, 1, float(highsnr_throughput(1, hp))
    lo, hi = 1.0, 2.0
    while xi(hi, hp) > 0.0:
        lo = hi
        hi *= 2.0
        if hi > 1e12:
            raise RuntimeError("no sign change of Xi found below 1e12")
    N_star = hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        val = xi(mid, hp)
        if abs(val) <= 1e-12:
            N_star = mid
            break
        if val > 0.0:
            lo = mid
        else:
            hi = mid
        N_star = 0.5 * (lo + hi)
        if hi - lo <= 1e-9 * mid:
            break
    fl = max(1, math.floor(N_star))
    ce = math.ceil(N_star)
    T_fl = float(highsnr_throughput(fl, hp))
    T_ce = float(highsnr_throughput(ce, hp))
    if T_fl >= T_ce:
        return N_star, fl, T_fl
    return N_star, ce, T_ce


def _absent(fs_reason: str, reason: str, note: Optional[str]) -> OptimizationResult:
    return OptimizationResult(
        N_opt=None, throughput_opt=None, outage_at_opt=None,
        feasible=FeasibleSet(reason=fs_reason), evaluations=0,
        method="high-snr", reason=reason, note=note)


def constrained_optimum(hp: HighSnrParams) -> OptimizationResult:
    """Best integer blocklength in [1, N_max] with outage at most zeta.

    The feasible region is [N0, N_max] with N0 from the closed form
    (verified against the direct outage test, so the boundary integer is
    exact); the optimum is the unconstrained root clamped into it.
    Absent when zeta <= 2^-K (the infinite-blocklength outage floor) or
    when N0 lands beyond N_max.
    """
    note = None
    if hp.B < 50:
        note = "payload below 50; closed-form sign structure is advisory"
    N_G = hp.N_max
    if not hp.outage_constrained:
        N_star, N_int, T_at = unconstrained_optimum(hp)
        N_opt = min(N_int, N_G)
        if N_star > N_G:
            N_opt = N_G
        return OptimizationResult(
            N_opt=N_opt, throughput_opt=float(highsnr_throughput(N_opt, hp)),
            outage_at_opt=float(highsnr_outage(N_opt, hp)),
            feasible=FeasibleSet(intervals=((1, N_G),)),
            evaluations=2, method="high-snr", note=note)

    zeta = float(hp.zeta)
    floor_gap = zeta - 2.0 ** (-hp.K)
    if abs(floor_gap) < 1e-12:
        flag = "outage threshold within 1e-12 of the floor 2^-K"
        note = flag if note is None else note + "; " + flag
    if floor_gap <= 0.0:
        return _absent(
            "outage threshold at or below the infinite-blocklength floor 2^-K",
            "outage threshold at or below 2^-K (excessively strict)", note)

    # z = zeta^(1/K); 1-z via expm1 keeps precision for large K
    one_minus_z = -math.expm1(math.log(zeta) / hp.K)
    z = 1.0 - one_minus_z
    tau = (math.log(z) - math.log(one_minus_z)) / _LN2
    delta2 = hp.t * hp.t + 4.0 * hp.B * tau
    sqrt_N0 = (math.sqrt(delta2) + hp.t) / (2.0 * tau)
    N0 = sqrt_N0 * sqrt_N0

    A = max(1, math.ceil(N0 - 1e-9))
    while A <= N_G and float(highsnr_outage(A, hp)) > zeta:
        A += 1
    while A > 1 and float(highsnr_outage(A - 1, hp)) <= zeta:
        A -= 1
    if A > N_G:
        return _absent(
            "smallest feasible blocklength exceeds N_max",
            f"minimum feasible blocklength N0 ~ {N0:.1f} exceeds N_max {N_G}",
            note)

    N_star, _, _ = unconstrained_optimum(hp)
    if N_star < A:
        N_opt = A
    elif N_star > N_G:
        N_opt = N_G
    else:
        fl = max(A, math.floor(N_star))
        ce = min(N_G, math.ceil(N_star))
        N_opt = fl if float(highsnr_throughput(fl, hp)) >= \
            float(highsnr_throughput(ce, hp)) else ce
    return OptimizationResult(
        N_opt=N_opt,
        throughput_opt=float(highsnr_throughput(N_opt, hp)),
        outage_at_opt=float(highsnr_outage(N_opt, hp)),
        feasible=FeasibleSet(intervals=((A, N_G),)),
        evaluations=3, method="high-snr", note=note)
