import numpy as np
import pytest
from fastapi.testclient import TestClient
from pydantic import ValidationError

from shortsec.highsnr import HighSnrParams, constrained_optimum
from shortsec.montecarlo import SimulationSpec, brute_force_optimum
from shortsec.optimizer import optimize_blocklength_general
from shortsec.service import (
    CdfRequest,
    OptimizeRequest,
    Scenario,
    SweepRequest,
    create_app,
    run_cdf,
    run_optimize,
    run_sweep,
)


def scenario(**kw):
    base = dict(K=8, gamma_db=10.0, eps_bar=1e-3, delta_bar=1e-3,
                B=400, N_max=1000, zeta=0.2)
    base.update(kw)
    return Scenario(**base)


# --- schemas ----------------------------------------------------------------

def test_scenario_validation():
    for bad in (dict(K=0), dict(eps_bar=1.0), dict(delta_bar=0.0),
                dict(B=0), dict(N_max=0), dict(zeta=1.5), dict(zeta=0.0)):
        with pytest.raises(ValidationError):
            scenario(**bad)
    assert scenario(zeta=None).zeta is None


def test_scenario_converts_db_once():
    cfg = scenario(gamma_db=10.0).to_config()
    assert cfg.mean_snr == pytest.approx(10.0, rel=1e-15)
    assert scenario(gamma_db=0.0).to_config().mean_snr == 1.0


def test_monte_carlo_requires_entropy():
    with pytest.raises(ValidationError):
        OptimizeRequest(scenario=scenario(), method="monte-carlo")
    with pytest.raises(ValidationError):
        OptimizeRequest(scenario=scenario(), method="monte-carlo", samples=10)
    with pytest.raises(ValidationError):
        SweepRequest(scenario=scenario(), vary="B", start=100, stop=200,
                     steps=2, method="monte-carlo", seed=1)


# --- optimize handler -------------------------------------------------------

def test_optimize_general_route():
    resp = run_optimize(OptimizeRequest(scenario=scenario(), method="general"))
    direct = optimize_blocklength_general(scenario().to_config())
    assert resp.method == "general"
    assert resp.N_opt == direct.N_opt == 252
    assert resp.T_opt == direct.throughput_opt
    assert resp.p_out_at_opt == direct.outage_at_opt
    assert resp.feasible_intervals == [(252, 1000)]
    assert resp.diagnostics.reason is None
    assert resp.diagnostics.seed is None


def test_optimize_high_snr_route():
    resp = run_optimize(OptimizeRequest(scenario=scenario(), method="high-snr"))
    direct = constrained_optimum(HighSnrParams.from_config(scenario().to_config()))
    assert resp.method == "high-snr"
    assert resp.N_opt == direct.N_opt
    assert resp.T_opt == direct.throughput_opt


def test_optimize_monte_carlo_route():
    req = OptimizeRequest(scenario=scenario(), method="monte-carlo",
                          samples=20000, seed=7)
    resp = run_optimize(req)
    direct = brute_force_optimum(
        SimulationSpec(cfg=scenario().to_config(), samples=20000, seed=7))
    assert resp.N_opt == direct.N_opt
    assert resp.T_opt == direct.throughput_opt
    assert resp.diagnostics.samples == 20000
    assert resp.diagnostics.seed == 7


def test_optimize_infeasible_is_null_with_reason():
    resp = run_optimize(OptimizeRequest(scenario=scenario(zeta=1e-9)))
    assert resp.N_opt is None and resp.T_opt is None
    assert resp.feasible_intervals == []
    assert "unreachable" in resp.diagnostics.reason


def test_optimize_nonpositive_margin_reason():
    # a single antenna gives identical legitimate and eavesdropper laws,
    # so the mean secrecy margin vanishes
    resp = run_optimize(OptimizeRequest(scenario=scenario(K=1)))
    assert resp.N_opt is None
    assert "mu0" in resp.diagnostics.reason


def test_optimize_high_snr_floor_reason():
    resp = run_optimize(OptimizeRequest(scenario=scenario(zeta=2.0**-8 / 2),
                                        method="high-snr"))
    assert resp.N_opt is None
    assert "2^-K" in resp.diagnostics.reason


# --- cdf handler ------------------------------------------------------------

def test_cdf_shape_and_span():
    req = CdfRequest(scenario=scenario(K=4, zeta=None), blocklength=200,
                     samples=20000, seed=5)
    resp = run_cdf(req)
    assert len(resp.r) == len(resp.empirical_cdf) == len(resp.approx_cdf) == 400
    assert resp.highsnr_cdf is None
    assert resp.empirical_cdf[0] == pytest.approx(0.001, abs=1e-4)
    assert resp.empirical_cdf[-1] == pytest.approx(0.999, abs=1e-4)
    assert np.all(np.diff(resp.r) > 0)
    assert np.all(np.diff(resp.empirical_cdf) >= 0)
    assert np.all(np.diff(resp.approx_cdf) >= 0)


def test_cdf_high_snr_column():
    req = CdfRequest(scenario=scenario(K=4, gamma_db=20.0, zeta=None),
                     blocklength=200, samples=20000, seed=5,
                     include_high_snr=True)
    resp = run_cdf(req)
    assert len(resp.highsnr_cdf) == 400
    gap = np.max(np.abs(np.array(resp.highsnr_cdf)
                        - np.array(resp.empirical_cdf)))
    assert gap < 0.03


def test_cdf_deterministic():
    req = CdfRequest(scenario=scenario(), blocklength=300,
                     samples=5000, seed=9)
    assert run_cdf(req) == run_cdf(req)


# --- sweep handler ----------------------------------------------------------

def test_sweep_single_step_equals_optimize():
    sw = run_sweep(SweepRequest(scenario=scenario(), vary="gamma-db",
                                start=10.0, stop=10.0, steps=1))
    opt = run_optimize(OptimizeRequest(scenario=scenario()))
    assert len(sw.rows) == 1
    row = sw.rows[0]
    assert (row.N_opt, row.T_opt, row.p_out_at_opt) == \
        (opt.N_opt, opt.T_opt, opt.p_out_at_opt)


def test_sweep_orders_rows_and_carries_reasons():
    sw = run_sweep(SweepRequest(scenario=scenario(), vary="K",
                                start=2, stop=16, steps=8))
    assert [r.value for r in sw.rows] == [2, 4, 6, 8, 10, 12, 14, 16]
    assert sw.rows[0].N_opt is None and sw.rows[0].reason
    found = [r.N_opt for r in sw.rows if r.N_opt is not None]
    assert found == sorted(found, reverse=True)  # larger K, shorter optimum


def test_sweep_rejects_fractional_antenna_counts():
    with pytest.raises(ValueError):
        run_sweep(SweepRequest(scenario=scenario(), vary="K",
                               start=2, stop=3, steps=3))


def test_sweep_monte_carlo_route():
    sw = run_sweep(SweepRequest(scenario=scenario(), vary="B",
                                start=200, stop=400, steps=2,
                                method="monte-carlo", samples=5000, seed=3))
    assert all(r.N_opt is not None for r in sw.rows)
    direct = brute_force_optimum(
        SimulationSpec(cfg=scenario(B=200).to_config(), samples=5000, seed=3))
    assert sw.rows[0].N_opt == direct.N_opt


# --- http surface -----------------------------------------------------------

@pytest.fixture(scope="module")
def client():
    return TestClient(create_app())


def test_http_health(client):
    r = client.get("/health")
    assert r.status_code == 200
    assert r.json()["status"] == "ok"


def test_http_optimize_stable_key_order(client):
    body = {"scenario": scenario().model_dump(), "method": "general"}
    r = client.post("/optimize", json=body)
    assert r.status_code == 200
    assert list(r.json().keys()) == ["method", "N_opt", "T_opt",
                                     "p_out_at_opt", "feasible_intervals",
                                     "diagnostics"]
    assert r.json()["N_opt"] == 252


def test_http_validation_is_422(client):
    bad = {"scenario": scenario().model_dump() | {"N_max": 0}}
    assert client.post("/optimize", json=bad).status_code == 422
    no_seed = {"scenario": scenario().model_dump(), "method": "monte-carlo",
               "samples": 100}
    assert client.post("/optimize", json=no_seed).status_code == 422


def test_http_cdf_and_sweep(client):
    body = {"scenario": scenario(K=4, zeta=None).model_dump(),
            "blocklength": 200, "samples": 2000, "seed": 5}
    r = client.post("/cdf", json=body)
    assert r.status_code == 200
    assert len(r.json()["r"]) == 400
    assert "highsnr_cdf" not in r.json()  # excluded when not requested
    sweep = {"scenario": scenario().model_dump(), "vary": "gamma-db",
             "start": 5.0, "stop": 7.0, "steps": 3}
    r = client.post("/sweep", json=sweep)
    assert r.status_code == 200
    assert len(r.json()["rows"]) == 3
