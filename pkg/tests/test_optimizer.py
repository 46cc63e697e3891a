import numpy as np
import pytest

from shortsec.approx import outage_probability
from shortsec.model import SystemConfig
from shortsec.moments import moment_set
from shortsec.optimizer import optimize_blocklength_general, optimize_over


def cfg_with(B=400, zeta=0.2, N_max=1000, K=8, mean_snr=10.0):
    return SystemConfig(K=K, mean_snr=mean_snr, eps_bar=1e-3, delta_bar=1e-3,
                        B=B, N_max=N_max, zeta=zeta)


def naive_optimum(cfg, mu):
    """Scan every blocklength; first maximum wins."""
    N = np.arange(1, cfg.N_max + 1)
    p = outage_probability(N, cfg, mu)
    T = (cfg.B / N) * (1.0 - p)
    if cfg.outage_constrained:
        ok = p <= cfg.zeta
        if not ok.any():
            return None
        N, p, T = N[ok], p[ok], T[ok]
    i = int(np.argmax(T))
    return int(N[i]), float(T[i]), float(p[i])


def test_default_scenario_optimum():
    res = optimize_blocklength_general(cfg_with())
    assert res.found
    assert res.N_opt == 252
    assert res.throughput_opt == pytest.approx(1.2706221381017215, rel=1e-10)
    assert res.outage_at_opt == pytest.approx(0.1995080529959154, rel=1e-10)
    assert res.outage_at_opt <= 0.2
    assert res.method == "general"
    assert res.evaluations == res.feasible.count


@pytest.mark.parametrize("K,mean_snr,B,zeta", [
    (2, 3.1622776601683795, 100, 0.1),   # infeasible at this threshold
    (4, 10.0, 200, 0.05),
    (8, 10.0, 400, 0.2),
    (8, 100.0, 600, 0.5),
    (12, 31.622776601683793, 800, 0.01),
])
def test_matches_naive_scan(K, mean_snr, B, zeta):
    cfg = cfg_with(B=B, zeta=zeta, N_max=900, K=K, mean_snr=mean_snr)
    ms = moment_set(cfg)
    res = optimize_blocklength_general(cfg, moments=ms)
    want = naive_optimum(cfg, ms.mu)
    if want is None:
        assert not res.found
        assert res.reason
    else:
        assert (res.N_opt, res.throughput_opt, res.outage_at_opt) == want


def test_unconstrained_matches_full_scan():
    cfg = cfg_with(zeta=None, N_max=800)
    ms = moment_set(cfg)
    res = optimize_blocklength_general(cfg, moments=ms)
    want = naive_optimum(cfg, ms.mu)
    assert (res.N_opt, res.throughput_opt, res.outage_at_opt) == want
    assert res.evaluations == 800
    # the outage threshold only ever removes candidates
    constrained = optimize_blocklength_general(cfg_with(zeta=0.2, N_max=800))
    assert constrained.throughput_opt <= res.throughput_opt


def test_infeasible_returns_reason():
    res = optimize_blocklength_general(cfg_with(zeta=1e-9))
    assert not res.found
    assert res.N_opt is None and res.throughput_opt is None
    assert res.feasible.is_empty
    assert "unreachable" in res.reason
    assert res.evaluations == 0


def test_precomputed_moments_give_identical_result():
    cfg = cfg_with()
    ms = moment_set(cfg)
    a = optimize_blocklength_general(cfg)
    b = optimize_blocklength_general(cfg, moments=ms)
    assert (a.N_opt, a.throughput_opt, a.outage_at_opt) == \
        (b.N_opt, b.throughput_opt, b.outage_at_opt)


def test_optimize_over_first_maximum_wins():
    cfg = cfg_with(zeta=None)
    ms = moment_set(cfg)
    # duplicated candidate: equal throughputs, the earlier entry is kept
    N, T, p = optimize_over(np.array([252, 252, 300]), cfg, ms.mu)
    assert N == 252
    assert T == pytest.approx((cfg.B / 252) * (1 - p), rel=1e-15)
