"""Batch command line front end.

Subcommands produce machine-readable artifacts: ``cdf`` writes rate-CDF
curves as CSV (one file per requested SNR), ``optimize`` writes a single
JSON result, ``sweep`` writes one CSV row per parameter value, and
``serve`` runs the HTTP service. Every artifact-producing command also
writes a run manifest alongside its outputs; passing that manifest back
through ``--config`` replays the run.

Conventions:
  - SNR is taken in dB on the command line and converted once at the
    boundary.
  - Precedence: built-in defaults < ``--config`` file < explicit flags.
  - CSV cells carry floats with 17 significant digits; JSON numbers use
    Python's shortest round-trip form. Both reparse to the exact value.
  - Monte Carlo paths require an explicit ``--seed``; there is no silent
    entropy.
  - Exit status 0 means the inputs were valid, even when the scenario
    turns out infeasible (the result then holds a null optimum plus a
    reason). Usage and configuration errors exit with status 2.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from . import __version__
from .manifest import RunManifest, file_digest, write_manifest
from .service import (
    CdfRequest,
    CdfResponse,
    OptimizeRequest,
    OptimizeResponse,
    Scenario,
    SweepRequest,
    SweepResponse,
    run_cdf,
    run_optimize,
    run_sweep,
)

OUTDIR_ENV = "SHORTSEC_OUTDIR"

# the canonical scenario; every field can be overridden by config or flag
DEFAULT_SCENARIO: Dict[str, Any] = {
    "K": 8, "gamma_db": 10.0, "eps_bar": 1e-3, "delta_bar": 1e-3,
    "B": 400, "N_max": 1000, "zeta": 0.2,
}
DEFAULT_SAMPLES = 100000

_SCENARIO_KEYS = tuple(DEFAULT_SCENARIO)


def format_float(v: float) -> str:
    """Fixed 17-significant-digit form; reparses to the exact double."""
    return format(float(v), ".17g")


def _csv_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _write_csv(path: Path, header: Sequence[str], rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_csv_cell(v) for v in row])


def _write_json(path: Path, obj: Dict[str, Any]) -> None:
    # key order follows the response model's field order; documented stable
    path.write_text(json.dumps(obj, indent=2) + "\n", encoding="utf-8")


class UsageError(Exception):
    """Configuration problem attributable to the invocation."""


def _load_config(path: Optional[Path]) -> Dict[str, Any]:
    if path is None:
        return {}
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as e:
        raise UsageError(f"cannot read config file: {e}") from e
    except json.JSONDecodeError as e:
        raise UsageError(f"config file is not valid JSON: {e}") from e
    if isinstance(data, dict) and "command" in data and "parameters" in data:
        data = data["parameters"]  # a previous run manifest
    if not isinstance(data, dict):
        raise UsageError("config file must hold a JSON object")
    if isinstance(data.get("scenario"), dict):
        flat = dict(data["scenario"])
        flat.update({k: v for k, v in data.items() if k != "scenario"})
        data = flat
    return data


def _resolve_scenario(args, file_cfg: Dict[str, Any]) -> Dict[str, Any]:
    merged = dict(DEFAULT_SCENARIO)
    merged.update({k: v for k, v in file_cfg.items() if k in _SCENARIO_KEYS})
    for key in _SCENARIO_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            merged[key] = v
    if isinstance(merged.get("zeta"), str):
        merged["zeta"] = _parse_zeta(merged["zeta"])
    return merged


def _parse_zeta(text: str):
    if text.strip().lower() in ("none", "off"):
        return None
    try:
        return float(text)
    except ValueError as e:
        raise UsageError(f"--zeta expects a number or 'none', got {text!r}") from e


def _pick(args, file_cfg: Dict[str, Any], key: str, default=None):
    v = getattr(args, key, None)
    if v is not None:
        return v
    if key in file_cfg:
        return file_cfg[key]
    return default


def _outdir(args) -> Path:
    d = args.outdir or os.environ.get(OUTDIR_ENV) or Path.cwd()
    d = Path(d)
    d.mkdir(parents=True, exist_ok=True)
    return d


def _out_path(args, outdir: Path, default_name: str) -> Path:
    out = getattr(args, "out", None)
    if out is None:
        return outdir / default_name
    out = Path(out)
    return out if out.is_absolute() else outdir / out


def _post(server: str, route: str, req, resp_cls):
    import httpx

    url = server.rstrip("/") + route
    r = httpx.post(url, json=req.model_dump(mode="json"), timeout=600.0)
    if r.status_code == 422:
        raise UsageError(f"server rejected the request: {r.text}")
    r.raise_for_status()
    return resp_cls.model_validate(r.json())


def _finish(command: str, parameters: Dict[str, Any], seed: Optional[int],
            t0: float, written: List[Path], manifest_path: Path) -> int:
    m = RunManifest(
        command=command,
        parameters=parameters,
        seed=seed,
        duration_seconds=time.monotonic() - t0,
        outputs={p.name: file_digest(p) for p in written},
    )
    write_manifest(m, manifest_path)
    for p in written:
        print(p)
    print(manifest_path)
    return 0


# --- subcommands ------------------------------------------------------------

def _cmd_cdf(args) -> int:
    t0 = time.monotonic()
    file_cfg = _load_config(args.config)
    scen_fields = _resolve_scenario(args, file_cfg)

    gammas = args.gamma_db
    if gammas is None:
        raw = file_cfg.get("gamma_db", DEFAULT_SCENARIO["gamma_db"])
        gammas = list(raw) if isinstance(raw, (list, tuple)) else [raw]
    blocklength = _pick(args, file_cfg, "blocklength")
    if blocklength is None:
        raise UsageError("cdf requires --blocklength (or a config providing it)")
    samples = _pick(args, file_cfg, "samples", DEFAULT_SAMPLES)
    seed = _pick(args, file_cfg, "seed")
    if seed is None:
        raise UsageError("cdf is a Monte Carlo command; --seed is required")
    high = _pick(args, file_cfg, "high_snr", False)

    outdir = _outdir(args)
    if args.out is not None and len(gammas) != 1:
        raise UsageError("--out names one file; use --outdir for several SNRs")

    written: List[Path] = []
    for g in gammas:
        scen = Scenario(**{**scen_fields, "gamma_db": float(g)})
        req = CdfRequest(scenario=scen, blocklength=blocklength,
                         samples=samples, seed=seed, include_high_snr=high)
        if args.server:
            resp = _post(args.server, "/cdf", req, CdfResponse)
        else:
            resp = run_cdf(req)
        header = ["r", "empirical_cdf", "approx_cdf"]
        cols = [resp.r, resp.empirical_cdf, resp.approx_cdf]
        if resp.highsnr_cdf is not None:
            header.append("highsnr_cdf")
            cols.append(resp.highsnr_cdf)
        path = _out_path(args, outdir, f"cdf_gamma_{g:g}dB.csv")
        _write_csv(path, header, zip(*cols))
        written.append(path)

    parameters = {"scenario": {k: v for k, v in scen_fields.items()
                               if k != "gamma_db"},
                  "gamma_db": [float(g) for g in gammas],
                  "blocklength": blocklength, "samples": samples,
                  "seed": seed, "high_snr": high}
    return _finish("cdf", parameters, seed, t0, written,
                   _out_path(args, outdir, "cdf.manifest.json")
                   if args.out is None else
                   written[0].with_suffix(".manifest.json"))


def _cmd_optimize(args) -> int:
    t0 = time.monotonic()
    file_cfg = _load_config(args.config)
    scen = Scenario(**_resolve_scenario(args, file_cfg))
    method = _pick(args, file_cfg, "method", "general")
    samples = _pick(args, file_cfg, "samples")
    seed = _pick(args, file_cfg, "seed")
    if method == "monte-carlo":
        if seed is None:
            raise UsageError("method 'monte-carlo' requires --seed")
        if samples is None:
            samples = DEFAULT_SAMPLES
    else:
        samples = seed = None

    req = OptimizeRequest(scenario=scen, method=method,
                          samples=samples, seed=seed)
    if args.server:
        resp = _post(args.server, "/optimize", req, OptimizeResponse)
    else:
        resp = run_optimize(req)

    outdir = _outdir(args)
    path = _out_path(args, outdir, "optimize.json")
    _write_json(path, resp.model_dump())

    parameters = {"scenario": scen.model_dump(), "method": method,
                  "samples": samples, "seed": seed}
    return _finish("optimize", parameters, seed, t0, [path],
                   path.with_suffix(".manifest.json"))


def _cmd_sweep(args) -> int:
    t0 = time.monotonic()
    file_cfg = _load_config(args.config)
    scen = Scenario(**_resolve_scenario(args, file_cfg))
    vary = _pick(args, file_cfg, "vary")
    start = _pick(args, file_cfg, "start")
    stop = _pick(args, file_cfg, "stop")
    steps = _pick(args, file_cfg, "steps")
    if vary is None or start is None or stop is None or steps is None:
        raise UsageError("sweep requires --vary, --from, --to and --steps")
    method = _pick(args, file_cfg, "method", "general")
    samples = _pick(args, file_cfg, "samples")
    seed = _pick(args, file_cfg, "seed")
    if method == "monte-carlo":
        if seed is None:
            raise UsageError("method 'monte-carlo' requires --seed")
        if samples is None:
            samples = DEFAULT_SAMPLES
    else:
        samples = seed = None

    req = SweepRequest(scenario=scen, vary=vary, start=float(start),
                       stop=float(stop), steps=int(steps), method=method,
                       samples=samples, seed=seed)
    if args.server:
        resp = _post(args.server, "/sweep", req, SweepResponse)
    else:
        resp = run_sweep(req)

    outdir = _outdir(args)
    path = _out_path(args, outdir, f"sweep_{vary}.csv")
    _write_csv(path, [vary, "N_opt", "T_opt", "p_out_at_opt"],
               ((r.value, r.N_opt, r.T_opt, r.p_out_at_opt)
                for r in resp.rows))

    parameters = {"scenario": scen.model_dump(), "vary": vary,
                  "start": float(start), "stop": float(stop),
                  "steps": int(steps), "method": method,
                  "samples": samples, "seed": seed}
    return _finish("sweep", parameters, seed, t0, [path],
                   path.with_suffix(".manifest.json"))


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


# --- parser -----------------------------------------------------------------

def _add_common(sp, repeat_gamma: bool = False) -> None:
    sp.add_argument("--config", type=Path,
                    help="JSON scenario/config file; flags override it; "
                         "a previous run manifest is accepted")
    sp.add_argument("--K", type=int, help="transmit antenna count")
    if repeat_gamma:
        sp.add_argument("--gamma-db", dest="gamma_db", type=float,
                        action="append",
                        help="average SNR in dB (repeatable: one output per value)")
    else:
        sp.add_argument("--gamma-db", dest="gamma_db", type=float,
                        help="average SNR in dB")
    sp.add_argument("--eps", dest="eps_bar", type=float,
                    help="decoding error target")
    sp.add_argument("--delta", dest="delta_bar", type=float,
                    help="information leakage target")
    sp.add_argument("--B", type=int, help="information bits per block")
    sp.add_argument("--n-max", dest="N_max", type=int,
                    help="largest admissible blocklength")
    sp.add_argument("--zeta", type=str,
                    help="outage threshold in (0, 1], or 'none' to disable")
    sp.add_argument("--outdir", type=Path,
                    help=f"output directory (default: ${OUTDIR_ENV} or CWD)")
    sp.add_argument("--out", type=Path,
                    help="output file name (relative names land in --outdir)")
    sp.add_argument("--server", type=str,
                    help="base URL of a running service; compute there instead "
                         "of in-process")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="shortsec",
        description="Secrecy outage and throughput-optimal blocklength "
                    "for short packets.")
    p.add_argument("--version", action="version",
                   version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    cdf = sub.add_parser("cdf", help="rate CDF curves as CSV")
    _add_common(cdf, repeat_gamma=True)
    cdf.add_argument("--blocklength", type=int, help="blocklength N")
    cdf.add_argument("--samples", type=int, help="Monte Carlo sample count")
    cdf.add_argument("--seed", type=int, help="Monte Carlo seed (required)")
    cdf.add_argument("--high-snr", dest="high_snr",
                     action=argparse.BooleanOptionalAction, default=None,
                     help="add the high-SNR closed-form CDF column")
    cdf.set_defaults(func=_cmd_cdf)

    opt = sub.add_parser("optimize", help="optimal blocklength as JSON")
    _add_common(opt)
    opt.add_argument("--method", choices=("general", "high-snr", "monte-carlo"),
                     help="optimization route (default: general)")
    opt.add_argument("--samples", type=int, help="Monte Carlo sample count")
    opt.add_argument("--seed", type=int,
                     help="Monte Carlo seed (required for monte-carlo)")
    opt.set_defaults(func=_cmd_optimize)

    sw = sub.add_parser("sweep", help="optimum versus one parameter, as CSV")
    _add_common(sw)
    sw.add_argument("--vary", choices=("gamma-db", "B", "K", "zeta", "eps",
                                       "delta"),
                    help="which parameter to sweep")
    sw.add_argument("--from", dest="start", type=float, help="first value")
    sw.add_argument("--to", dest="stop", type=float, help="last value")
    sw.add_argument("--steps", type=int, help="number of grid points")
    sw.add_argument("--method", choices=("general", "high-snr", "monte-carlo"),
                    help="optimization route (default: general)")
    sw.add_argument("--samples", type=int, help="Monte Carlo sample count")
    sw.add_argument("--seed", type=int,
                    help="Monte Carlo seed (required for monte-carlo)")
    sw.set_defaults(func=_cmd_sweep)

    srv = sub.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default="127.0.0.1")
    srv.add_argument("--port", type=int, default=8000)
    srv.set_defaults(func=_cmd_serve)

    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (ValidationError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
