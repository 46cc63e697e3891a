"""Secrecy outage and throughput-optimal blocklength for short packets.

Layering, bottom up: specfun (Gaussian tails) -> model (scenario and rate
expressions) -> moments (SNR-averaged quadrature moments) -> approx
(Gaussian outage/throughput approximation) -> feasible (outage-feasible
blocklength sets via quartic root isolation) -> optimizer (general
throughput maximization) -> highsnr (closed forms in the high-SNR regime)
-> montecarlo (counter-based simulation oracles) -> service / cli.
"""

__version__ = "0.1.0"

from .model import ChannelGains, SystemConfig, db_to_linear, linear_to_db

__all__ = [
    "ChannelGains",
    "SystemConfig",
    "db_to_linear",
    "linear_to_db",
    "__version__",
]

# heavier layers (moments and up) are imported lazily so that
# `import shortsec` stays cheap; pull submodules explicitly when needed


def __getattr__(name):
    if name in ("moment_set", "MomentSet", "fit_at_blocklength"):
        from . import moments
        return getattr(moments, name)
    if name in ("outage_probability", "effective_throughput", "approx_cdf"):
        from . import approx
        return getattr(approx, name)
    if name in ("feasible_blocklengths", "FeasibleSet", "blocklength_lower_bound"):
        from . import feasible
        return getattr(feasible, name)
    if name in ("optimize_blocklength_general", "OptimizationResult"):
        from . import optimizer
        return getattr(optimizer, name)
    if name in ("HighSnrParams", "constrained_optimum", "unconstrained_optimum"):
        from . import highsnr
        return getattr(highsnr, name)
    if name in ("SimulationSpec", "sample_gains", "empirical_rate_cdf",
                "empirical_outage", "brute_force_optimum"):
        from . import montecarlo
        return getattr(montecarlo, name)
    if name == "create_app":
        from . import service
        return service.create_app
    raise AttributeError(f"module {__name__!r} has no attribute {name!r}")
