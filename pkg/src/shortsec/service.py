"""Request/response schemas and the HTTP service around the core package.

All computation lives in the pure handlers ``run_cdf``, ``run_optimize``
and ``run_sweep``; the FastAPI app and the command line front end are thin
wrappers around them, so a result is identical whether the request arrives
over HTTP or in-process.

Scenario inputs take the average SNR in dB and convert to linear exactly
once, here at the boundary. Everything below this layer works in linear
units.
"""

from __future__ import annotations

from typing import List, Literal, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from . import __version__
from .approx import approx_cdf
from .highsnr import HighSnrParams, constrained_optimum, highsnr_cdf
from .model import SystemConfig, db_to_linear
from .moments import fit_at_blocklength, moment_set
from .montecarlo import SimulationSpec, empirical_rate_cdf
from .optimizer import OptimizationResult, optimize_blocklength_general

Method = Literal["general", "high-snr", "monte-carlo"]
VariedParameter = Literal["gamma-db", "B", "K", "zeta", "eps", "delta"]

GRID_POINTS = 400
# the r grid spans the central mass of the empirical sample; the extreme
# tails carry one-in-a-thousand noise and would dominate a diff otherwise
GRID_QUANTILES = (0.001, 0.999)


class Scenario(BaseModel):
    """Wire format of one system configuration (SNR in dB)."""

    model_config = ConfigDict(frozen=True)

    K: int = Field(ge=1)
    gamma_db: float
    eps_bar: float = Field(gt=0.0, lt=1.0)
    delta_bar: float = Field(gt=0.0, lt=1.0)
    B: int = Field(ge=1)
    N_max: int = Field(ge=1)
    zeta: Optional[float] = Field(default=None, gt=0.0, le=1.0)

    @model_validator(mode="after")
    def _constructible(self) -> "Scenario":
        # SystemConfig owns the cross-field invariants; surface its
        # message as a validation error rather than a server fault
        self.to_config()
        return self

    def to_config(self) -> SystemConfig:
        return SystemConfig(K=self.K, mean_snr=db_to_linear(self.gamma_db),
                            eps_bar=self.eps_bar, delta_bar=self.delta_bar,
                            B=self.B, N_max=self.N_max, zeta=self.zeta)


class CdfRequest(BaseModel):
    scenario: Scenario
    blocklength: int = Field(ge=1)
    samples: int = Field(ge=1)
    seed: int = Field(ge=0, lt=2**64)
    include_high_snr: bool = False


class CdfResponse(BaseModel):
    """Rate-threshold grid with empirical and analytic CDF columns."""

    gamma_db: float
    blocklength: int
    samples: int
    seed: int
    r: List[float]
    empirical_cdf: List[float]
    approx_cdf: List[float]
    highsnr_cdf: Optional[List[float]] = None


class Diagnostics(BaseModel):
    evaluations: int
    reason: Optional[str] = None
    note: Optional[str] = None
    samples: Optional[int] = None
    seed: Optional[int] = None


class OptimizeRequest(BaseModel):
    scenario: Scenario
    method: Method = "general"
    samples: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _monte_carlo_needs_entropy(self) -> "OptimizeRequest":
        if self.method == "monte-carlo":
            if self.samples is None or self.seed is None:
                raise ValueError(
                    "method 'monte-carlo' requires explicit samples and seed")
        return self


class OptimizeResponse(BaseModel):
    """Optimum report; an absent optimum is an explicit null with reason."""

    method: str
    N_opt: Optional[int] = None
    T_opt: Optional[float] = None
    p_out_at_opt: Optional[float] = None
    feasible_intervals: List[Tuple[int, int]] = []
    diagnostics: Diagnostics


class SweepRequest(BaseModel):
    scenario: Scenario
    vary: VariedParameter
    start: float
    stop: float
    steps: int = Field(ge=1)
    method: Method = "general"
    samples: Optional[int] = Field(default=None, ge=1)
    seed: Optional[int] = Field(default=None, ge=0, lt=2**64)

    @model_validator(mode="after")
    def _monte_carlo_needs_entropy(self) -> "SweepRequest":
        if self.method == "monte-carlo":
            if self.samples is None or self.seed is None:
                raise ValueError(
                    "method 'monte-carlo' requires explicit samples and seed")
        return self


class SweepRow(BaseModel):
    value: float
    N_opt: Optional[int] = None
    T_opt: Optional[float] = None
    p_out_at_opt: Optional[float] = None
    reason: Optional[str] = None


class SweepResponse(BaseModel):
    vary: str
    method: str
    rows: List[SweepRow]


class HealthResponse(BaseModel):
    status: str
    version: str


def run_cdf(req: CdfRequest) -> CdfResponse:
    """Empirical rate CDF with analytic overlays on a 400-point grid."""
    cfg = req.scenario.to_config()
    spec = SimulationSpec(cfg=cfg, samples=req.samples, seed=req.seed)
    cdf = empirical_rate_cdf(spec, req.blocklength)
    lo, hi = np.quantile(cdf.values, GRID_QUANTILES)
    r = np.linspace(lo, hi, GRID_POINTS)
    fit = fit_at_blocklength(moment_set(cfg).mu, req.blocklength)
    high = None
    if req.include_high_snr:
        hp = HighSnrParams.from_config(cfg)
        high = np.asarray(highsnr_cdf(r, req.blocklength, hp)).tolist()
    return CdfResponse(
        gamma_db=req.scenario.gamma_db,
        blocklength=req.blocklength,
        samples=req.samples,
        seed=req.seed,
        r=r.tolist(),
        empirical_cdf=np.asarray(cdf.query(r)).tolist(),
        approx_cdf=np.asarray(approx_cdf(r, fit)).tolist(),
        highsnr_cdf=high,
    )


def _to_response(res: OptimizationResult, samples: Optional[int],
                 seed: Optional[int]) -> OptimizeResponse:
    mc = res.method == "monte-carlo"
    return OptimizeResponse(
        method=res.method,
        N_opt=res.N_opt,
        T_opt=res.throughput_opt,
        p_out_at_opt=res.outage_at_opt,
        feasible_intervals=list(res.feasible.intervals),
        diagnostics=Diagnostics(
            evaluations=res.evaluations,
            reason=res.reason,
            note=res.note,
            samples=samples if mc else None,
            seed=seed if mc else None,
        ),
    )


def run_optimize(req: OptimizeRequest) -> OptimizeResponse:
    """Throughput-optimal blocklength by the requested route.

    Infeasible scenarios are a successful response with a null optimum and
    a reason string, not an error.
    """
    cfg = req.scenario.to_config()
    if req.method == "general":
        res = optimize_blocklength_general(cfg)
    elif req.method == "high-snr":
        res = constrained_optimum(HighSnrParams.from_config(cfg))
    else:
        from .montecarlo import brute_force_optimum
        spec = SimulationSpec(cfg=cfg, samples=req.samples, seed=req.seed)
        res = brute_force_optimum(spec)
    return _to_response(res, req.samples, req.seed)


def _scenario_with(base: Scenario, vary: str, value: float) -> Scenario:
    fields = base.model_dump()
    if vary in ("B", "K"):
        n = int(round(value))
        if abs(value - n) > 1e-9:
            raise ValueError(f"swept {vary} values must be integers, got {value!r}")
        fields[vary] = n
    else:
        key = {"gamma-db": "gamma_db", "zeta": "zeta",
               "eps": "eps_bar", "delta": "delta_bar"}[vary]
        fields[key] = float(value)
    return Scenario(**fields)


def run_sweep(req: SweepRequest) -> SweepResponse:
    """One optimization per grid value of the varied parameter.

    Rows come back in sweep order; an infeasible point is a row with null
    optimum columns and the reason attached.
    """
    values = np.linspace(req.start, req.stop, req.steps)
    rows = []
    for value in values:
        scen = _scenario_with(req.scenario, req.vary, float(value))
        sub = OptimizeRequest(scenario=scen, method=req.method,
                              samples=req.samples, seed=req.seed)
        res = run_optimize(sub)
        rows.append(SweepRow(value=float(value), N_opt=res.N_opt,
                             T_opt=res.T_opt, p_out_at_opt=res.p_out_at_opt,
                             reason=res.diagnostics.reason))
    return SweepResponse(vary=req.vary, method=req.method, rows=rows)


def create_app():
    """FastAPI application exposing the three handlers plus a health probe."""
    from fastapi import FastAPI

    app = FastAPI(title="shortsec", version=__version__)

    @app.get("/health", response_model=HealthResponse)
    def health() -> HealthResponse:
        return HealthResponse(status="ok", version=__version__)

    @app.post("/cdf", response_model=CdfResponse, response_model_exclude_none=True)
    def cdf(req: CdfRequest) -> CdfResponse:
        return run_cdf(req)

    @app.post("/optimize", response_model=OptimizeResponse)
    def optimize(req: OptimizeRequest) -> OptimizeResponse:
        return run_optimize(req)

    @app.post("/sweep", response_model=SweepResponse)
    def sweep(req: SweepRequest) -> SweepResponse:
        return run_sweep(req)

    return app
