"""Concentrating solutions of the coupled NLS system: Python front end."""

import json

from . import _impl
from ._impl import (
    ConfigError,
    CouplingParams,
    GroundState,
    NotApplicable,
    RunConfig,
    SolverError,
    admissible,
    admissible_intervals,
    coupling_sigmas,
    load_config,
    shoot_w0,
    solve_ground_state,
    wz0_integral,
)

__all__ = [
    "ConfigError",
    "CouplingParams",
    "GroundState",
    "NotApplicable",
    "RunConfig",
    "SolverError",
    "admissible",
    "admissible_intervals",
    "cli",
    "coupling_sigmas",
    "kernel_diagnostics",
    "load_config",
    "run_mode",
    "scalar_virial_check",
    "shoot_w0",
    "sigma_identity_check",
    "solve",
    "solve_ground_state",
    "sweep",
    "wz0_integral",
]


def kernel_diagnostics(ground_state, mu1, mu2, beta, n_modes=6):
    return json.loads(_impl.kernel_diagnostics(ground_state, mu1, mu2, beta, n_modes))


def scalar_virial_check(ground_state):
    return json.loads(_impl.scalar_virial_check(ground_state))


def sigma_identity_check(coupling):
    return json.loads(_impl.sigma_identity_check(coupling))


def solve(config, epsilon=None):
    """Solve at one epsilon; returns u, v (numpy), grid origin and spacing, and the sidecar dict."""
    st = _impl.solve(config, epsilon)
    st["meta"] = json.loads(st["meta"])
    return st


def sweep(config):
    """Epsilon sweep: (CSV text, list of check reports)."""
    csv, reports = _impl.sweep_csv(config)
    return csv, json.loads(reports)


def run_mode(config):
    """Run config.mode; returns (exit code, log text)."""
    return _impl.run_mode(config)


def cli(args):
    """`cnls <mode> --config ...` in-process; returns (exit code, stdout, stderr)."""
    return _impl.cli(list(args))
