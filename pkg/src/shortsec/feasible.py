"""Outage-feasible blocklength sets.

Under the Gaussian rate fit, a binding outage threshold zeta < 1/2
turns p_out(N) <= zeta into two algebraic conditions in n = 1/sqrt(N):

  * the mean constraint B/N < mean(N), i.e. n below a closed-form bound
    n_hat (equivalently N above a bound N_L), and
  * g(n) >= 0 for a quartic g whose coefficients mix the fit
    coefficients mu0..mu4 with the threshold quantile.

The primary route isolates the sign structure of g exactly: critical
points from the closed-form cubic solution (complex Cardano route),
one bisection per monotone piece, then an integer verification pass
that makes the returned set agree bit-for-bit with direct evaluation
of p_out at every boundary integer.

``feasible_blocklengths_by_cases`` is an independent second derivation
(shape classification by coefficient signs, companion-matrix roots)
used as a cross-check; it abstains (returns None) when a sign test
falls inside its numerical margin.
"""

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .approx import outage_probability
from .model import SystemConfig
from .specfun import q_inverse

#: primitive cube root of unity used by the closed-form cubic solution
_W = complex(-0.5, 0.5 * math.sqrt(3.0))
_W2 = _W * _W

#: n-intervals narrower than this are treated as numerically spurious
_MIN_SEGMENT_WIDTH = 1e-9

#: |Im| ceiling when accepting a complex cube-root combination as real
_RESIDUE_TOL = 1e-9


def _cbrt(x: float) -> float:
    return math.copysign(abs(x) ** (1.0 / 3.0), x)


@dataclass(frozen=True)
class QuarticCoeffs:
    """g(n) = a n^4 + b n^3 + c n^2 + d n + e."""

    a: float
    b: float
    c: float
    d: float
    e: float

    def __call__(self, n: float) -> float:
        return (((self.a * n + self.b) * n + self.c) * n + self.d) * n + self.e

    def derivative(self, n: float) -> float:
        return ((4.0 * self.a * n + 3.0 * self.b) * n + 2.0 * self.c) * n + self.d

    @property
    def scale(self) -> float:
        return max(abs(self.a), abs(self.b), abs(self.c), abs(self.d), abs(self.e), 1.0)


@dataclass(frozen=True)
class CriticalPoints:
    """Real stationary points of the quartic (roots of g')."""

    roots: Tuple[float, ...]      # all real roots of g', ascending
    t_g: float                    # largest
    t_l: Optional[float]          # second largest distinct, if any
    t_0: Optional[float]          # positive inflection point, if real


@dataclass(frozen=True)
class FeasibleSet:
    """Sorted disjoint integer blocklength intervals [lo, hi]."""

    intervals: Tuple[Tuple[int, int], ...] = ()
    reason: Optional[str] = None

    def __post_init__(self):
        prev_hi = 0
        for lo, hi in self.intervals:
            if not (1 <= lo <= hi):
                raise ValueError(f"bad interval [{lo}, {hi}]")
            if lo <= prev_hi:
                raise ValueError("intervals must be sorted and disjoint")
            prev_hi = hi

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    @property
    def count(self) -> int:
        return sum(hi - lo + 1 for lo, hi in self.intervals)

    def __contains__(self, N: int) -> bool:
        return any(lo <= N <= hi for lo, hi in self.intervals)

    def integers(self) -> np.ndarray:
        """All member blocklengths, ascending."""
        if not self.intervals:
            return np.empty(0, dtype=np.int64)
        return np.concatenate([np.arange(lo, hi + 1, dtype=np.int64)
                               for lo, hi in self.intervals])


def quartic_coefficients(cfg: SystemConfig, mu: Sequence[float]) -> QuarticCoeffs:
    """Coefficients of g(n) for the binding threshold in cfg.zeta.

    g(n) = (B n^2 + mu1 n - mu0)^2 - PhiInv(zeta)^2 (mu4 n^2 + mu3 n + mu2),
    expanded; g >= 0 together with the mean constraint characterizes
    feasibility.
    """
    if not cfg.outage_constrained:
        raise ValueError("no binding outage threshold in this configuration")
    mu0, mu1, mu2, mu3, mu4 = (float(v) for v in mu)
    B = float(cfg.B)
    phi_inv = -q_inverse(cfg.zeta)   # <= 0 for zeta <= 1/2
    s2 = phi_inv * phi_inv
    return QuarticCoeffs(
        a=B * B,
        b=2.0 * B * mu1,
        c=mu1 * mu1 - 2.0 * B * mu0 - s2 * mu4,
        d=-2.0 * mu0 * mu1 - s2 * mu3,
        e=mu0 * mu0 - s2 * mu2,
    )


def _cubic_real_roots(c3: float, c2: float, c1: float, c0: float) -> Tuple[float, ...]:
    """Real roots of c3 x^3 + c2 x^2 + c1 x + c0, closed form.

    Depressed-cubic Cardano route; the three-root branch combines the
    complex cube roots with the primitive root of unity and accepts a
    root as real only when the imaginary residue is negligible.
    """
    if c3 == 0.0:
        raise ValueError("leading coefficient must be nonzero")
    shift = -c2 / (3.0 * c3)
    p = (3.0 * c3 * c1 - c2 * c2) / (3.0 * c3 * c3)
    q = (2.0 * c2 ** 3 - 9.0 * c3 * c2 * c1 + 27.0 * c3 * c3 * c0) / (27.0 * c3 ** 3)
    disc = 0.25 * q * q + p ** 3 / 27.0
    if disc > 0.0:
        s = math.sqrt(disc)
        return (shift + _cbrt(-0.5 * q + s) + _cbrt(-0.5 * q - s),)
    if disc == 0.0:
        if p == 0.0:
            return (shift, shift, shift)
        double = -1.5 * q / p
        simple = 3.0 * q / p
        return tuple(sorted((simple, double, double)))
    sq = cmath.sqrt(complex(disc, 0.0))      # purely imaginary here
    croot = (-0.5 * q + sq) ** (1.0 / 3.0)
    droot = (-0.5 * q - sq) ** (1.0 / 3.0)   # conjugate branch
    roots = []
    for wk, w2k in ((1.0, 1.0), (_W, _W2), (_W2, _W)):
        z = wk * croot + w2k * droot
        if abs(z.imag) > _RESIDUE_TOL * max(1.0, abs(z)):
            raise ArithmeticError(
                f"cube-root combination not real: residue {z.imag!r}")
        roots.append(z.real + shift)
    return tuple(sorted(roots))


def derivative_critical_points(qc: QuarticCoeffs) -> CriticalPoints:
    """Stationary points of g from the closed-form cubic solution."""
    roots = tuple(sorted(_cubic_real_roots(4.0 * qc.a, 3.0 * qc.b, 2.0 * qc.c, qc.d)))
    t_g = roots[-1]
    distinct: List[float] = []
    for r in roots:
        if not distinct or abs(r - distinct[-1]) > 1e-9 * max(1.0, abs(r)):
            distinct.append(r)
    t_l = distinct[-2] if len(distinct) >= 2 else None
    disc2 = 9.0 * qc.b * qc.b - 24.0 * qc.a * qc.c
    t_0 = (math.sqrt(disc2) - 3.0 * qc.b) / (12.0 * qc.a) if disc2 >= 0.0 else None
    return CriticalPoints(roots=roots, t_g=t_g, t_l=t_l, t_0=t_0)


def _mean_constraint_bound(B: float, mu0: float, mu1: float) -> float:
    """Positive root n_hat of B n^2 + mu1 n - mu0 (requires mu0 > 0).

    Picks whichever rationalization keeps the additions cancellation-free
    for the sign of mu1.
    """
    root = math.sqrt(mu1 * mu1 + 4.0 * B * mu0)
    if mu1 >= 0.0:
        return 2.0 * mu0 / (root + mu1)
    return (root - mu1) / (2.0 * B)


def blocklength_lower_bound(cfg: SystemConfig, mu: Sequence[float]) -> float:
    """Smallest real N with B/N below the fitted mean (requires mu0 > 0).

    N_L = 1 / n_hat^2 where n_hat solves B n^2 + mu1 n - mu0 = 0.
    """
    mu0, mu1 = float(mu[0]), float(mu[1])
    if mu0 <= 0.0:
        raise ValueError("mean constraint never satisfied when mu0 <= 0")
    n_hat = _mean_constraint_bound(float(cfg.B), mu0, mu1)
    return 1.0 / (n_hat * n_hat)


def _bisect_sign_change(g, lo: float, hi: float, f_lo: float, f_hi: float) -> float:
    """Root of g on a monotone piece with a strict sign change."""
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid == lo or mid == hi:
            break
        fm = g(mid)
        if fm == 0.0:
            return mid
        if (fm > 0.0) == (f_lo > 0.0):
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
        if hi - lo <= 1e-12 * max(abs(lo), abs(hi)):
            break
    return 0.5 * (lo + hi)


def _nonnegative_segments(qc: QuarticCoeffs, lo: float, hi: float) -> List[Tuple[float, float]]:
    """Maximal subintervals of [lo, hi] where g >= 0."""
    crit = [t for t in derivative_critical_points(qc).roots if lo < t < hi]
    breaks = [lo, *sorted(crit), hi]
    values = [qc(x) for x in breaks]
    roots: List[float] = []
    for i in range(len(breaks) - 1):
        x0, x1 = breaks[i], breaks[i + 1]
        f0, f1 = values[i], values[i + 1]
        if f0 == 0.0:
            roots.append(x0)
        if f0 * f1 < 0.0:
            roots.append(_bisect_sign_change(qc, x0, x1, f0, f1))
    if values[-1] == 0.0:
        roots.append(hi)
    points = sorted({lo, hi, *roots})
    segments: List[Tuple[float, float]] = []
    for x0, x1 in zip(points[:-1], points[1:]):
        if x1 - x0 < _MIN_SEGMENT_WIDTH:
            continue
        if qc(0.5 * (x0 + x1)) >= 0.0:
            if segments and segments[-1][1] == x0:
                segments[-1] = (segments[-1][0], x1)
            else:
                segments.append((x0, x1))
    return segments


def _verified_integer_intervals(segments_N: Sequence[Tuple[float, float]],
                                cfg: SystemConfig, mu: Sequence[float],
                                zeta: float) -> Tuple[Tuple[int, int], ...]:
    """Snap float N-segments to the exact integer truth.

    Every boundary is settled by evaluating p_out(N) <= zeta directly,
    so root-finding ulps cannot move an integer in or out of the set.
    """
    N_G = cfg.N_max

    def meets(N: int) -> bool:
        return outage_probability(N, cfg, mu) <= zeta

    raw: List[Tuple[int, int]] = []
    for lo_f, hi_f in segments_N:
        lo = max(1, math.ceil(lo_f - 1e-9))
        hi = min(N_G, math.floor(hi_f + 1e-9))
        while lo <= hi and not meets(lo):
            lo += 1
        while hi >= lo and not meets(hi):
            hi -= 1
        if lo > hi:
            continue
        while lo > 1 and meets(lo - 1):
            lo -= 1
        while hi < N_G and meets(hi + 1):
            hi += 1
        raw.append((lo, hi))
    raw.sort()
    merged: List[Tuple[int, int]] = []
    for lo, hi in raw:
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


def _segments_to_blocklengths(segments_n: Sequence[Tuple[float, float]]) -> List[Tuple[float, float]]:
    """Map n-segments through N = 1/n^2 (order reverses)."""
    out = [(1.0 / (x1 * x1), 1.0 / (x0 * x0)) for x0, x1 in segments_n]
    out.sort()
    return out


def feasible_blocklengths(cfg: SystemConfig, mu: Sequence[float]) -> FeasibleSet:
    """Integer blocklengths in [1, N_max] meeting the outage threshold.

    Args:
        cfg: scenario; cfg.zeta may be void (None/1.0), in which case the
            whole range is feasible.
        mu: Gaussian-fit coefficients (mu0..mu4).

    Returns:
        FeasibleSet whose membership agrees exactly with the direct test
        p_out(N) <= zeta at every integer.
    """
    N_G = cfg.N_max
    if not cfg.outage_constrained:
        return FeasibleSet(intervals=((1, N_G),))
    zeta = float(cfg.zeta)
    mu0 = float(mu[0])
    if mu0 <= 0.0:
        return FeasibleSet(reason="mean secrecy margin nonpositive (mu0 <= 0)")
    n_hat = _mean_constraint_bound(float(cfg.B), mu0, float(mu[1]))
    n_lo = 1.0 / math.sqrt(N_G)
    n_hi = min(1.0, n_hat)
    if n_hi <= n_lo:
        # the mean constraint pushes past N_max; probe the edge anyway so
        # a boundary sitting within rounding noise cannot flip the answer
        segments_N: List[Tuple[float, float]] = [(float(N_G), float(N_G))]
    elif zeta == 0.5:
        # the quartic is a perfect square here, only the mean constraint binds
        segments_N = _segments_to_blocklengths([(n_lo, n_hi)])
    else:
        qc = quartic_coefficients(cfg, mu)
        segments_N = _segments_to_blocklengths(_nonnegative_segments(qc, n_lo, n_hi))
    intervals = _verified_integer_intervals(segments_N, cfg, mu, zeta)
    if not intervals:
        return FeasibleSet(reason="outage threshold unreachable in [1, N_max]")
    return FeasibleSet(intervals=intervals)


# --- independent cross-check route ---------------------------------------

def _positive_companion_roots(qc: QuarticCoeffs) -> List[float]:
    rr = np.roots([qc.a, qc.b, qc.c, qc.d, qc.e])
    real = rr[np.abs(rr.imag) <= 1e-9 * np.maximum(1.0, np.abs(rr))].real
    return sorted(float(r) for r in real if r > 0.0)


def feasible_blocklengths_by_cases(cfg: SystemConfig,
                                   mu: Sequence[float]) -> Optional[FeasibleSet]:
    """Shape-classification derivation of the feasible set.

    Classifies the quartic's trend on (0, inf) by the signs of c, d, the
    slope at the inflection point, and the values at the stationary
    points, then reads the nonnegativity region off the (companion
    matrix) root list. Returns None when any deciding sign falls within
    its numerical margin or the root count contradicts the classified
    shape; callers treat that as "no opinion".
    """
    N_G = cfg.N_max
    if not cfg.outage_constrained:
        return FeasibleSet(intervals=((1, N_G),))
    zeta = float(cfg.zeta)
    mu0 = float(mu[0])
    if mu0 <= 0.0:
        return FeasibleSet(reason="mean secrecy margin nonpositive (mu0 <= 0)")
    if zeta == 0.5:
        return feasible_blocklengths(cfg, mu)
    qc = quartic_coefficients(cfg, mu)
    margin = 1e-9 * qc.scale
    if qc.b < margin:
        # the trend table assumes a rising cubic term; outside that the
        # classification is not trustworthy
        return None

    def sign_of(value: float) -> Optional[int]:
        if abs(value) < margin:
            return None
        return 1 if value > 0.0 else -1

    sc, sd, se = sign_of(qc.c), sign_of(qc.d), sign_of(qc.e)
    if sc is None or sd is None or se is None:
        return None
    cp = derivative_critical_points(qc)
    if sc > 0 and sd > 0:
        case = "A"
    elif sc > 0:
        case = "B"
    else:
        if cp.t_0 is None:
            return None
        s_infl = sign_of(qc.derivative(cp.t_0))
        if s_infl is None:
            return None
        if s_infl > 0:
            case = "A"
        elif sd < 0:
            case = "B"
        else:
            case = "C"

    roots = _positive_companion_roots(qc)

    def region_from(expected: int) -> Optional[List[Tuple[float, float]]]:
        """n-region where g >= 0, from the last `expected` crossings."""
        if len(roots) != expected:
            return None
        if expected == 0:
            return [(0.0, math.inf)]
        if expected == 1:
            return [(roots[0], math.inf)]
        if expected == 2:
            return [(0.0, roots[0]), (roots[1], math.inf)]
        return [(roots[0], roots[1]), (roots[2], math.inf)]

    if case == "A":
        region = region_from(0 if se > 0 else 1)
    elif case == "B":
        s_tg = sign_of(qc(cp.t_g))
        if s_tg is None:
            return None
        if s_tg > 0:
            region = region_from(0)
        else:
            region = region_from(1 if se < 0 else 2)
    else:
        s_tg = sign_of(qc(cp.t_g))
        s_tl = None if cp.t_l is None else sign_of(qc(cp.t_l))
        if s_tg is None:
            return None
        if s_tg > 0:
            region = region_from(0 if se > 0 else 1)
        elif s_tl is None:
            return None
        elif s_tl < 0:
            region = region_from(1)
        else:
            region = region_from(2 if se > 0 else 3)
    if region is None:
        return None

    n_hat = _mean_constraint_bound(float(cfg.B), mu0, float(mu[1]))
    n_lo, n_hi = 1.0 / math.sqrt(N_G), min(1.0, n_hat)
    if n_hi <= n_lo:
        segments_N: List[Tuple[float, float]] = [(float(N_G), float(N_G))]
    else:
        clipped = [(max(x0, n_lo), min(x1, n_hi)) for x0, x1 in region]
        segments_N = _segments_to_blocklengths(
            [(x0, x1) for x0, x1 in clipped if x1 - x0 >= _MIN_SEGMENT_WIDTH])
    intervals = _verified_integer_intervals(segments_N, cfg, mu, zeta)
    if not intervals:
        return FeasibleSet(reason="outage threshold unreachable in [1, N_max]")
    return FeasibleSet(intervals=intervals)
