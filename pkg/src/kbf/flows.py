"""The two subflows of the splitting.

The linear subproblem is solved exactly in Fourier space by per-mode
exponential factors; the nonlinear subproblem is integrated with the
classical fourth-order Runge-Kutta method on the conservative spectral
right-hand side.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, NegativeDuration, NonFiniteState
from .model import LinearSymbol, ModelParams, _nonlinear_rhs_coeffs
from .spectral import GridSpec, SpectralState, _derivative_symbol, dealias_mask

__all__ = [
    "LinearPropagator",
    "NonlinearFlowConfig",
    "build_propagator",
    "apply_linear",
    "rk4_step",
    "nonlinear_flow",
]


@dataclass(frozen=True, eq=False)
class LinearPropagator:
    """Per-mode factors ``exp(lambda_k * t)`` for one fixed duration ``t >= 0``."""

    factors: np.ndarray = field(repr=False)
    duration: float
    grid: GridSpec


@dataclass(frozen=True)
class NonlinearFlowConfig:
    """Substep count and dealiasing rule for the nonlinear integrator."""

    substeps: int = 1
    dealias: str = "none"

    def __post_init__(self):
        if self.substeps < 1:
            raise ValueError(f"substeps must be >= 1, got {self.substeps}")


def build_propagator(symbol: LinearSymbol, t: float) -> LinearPropagator:
    """Exact linear propagator over duration ``t``.

    Negative durations are rejected: the backward flow amplifies high modes
    without bound when ``nu > 0``.
    """
    if not (t >= 0) or not math.isfinite(t):
        raise NegativeDuration(f"propagator duration must be >= 0, got {t}")
    factors = np.exp(symbol.values * t)
    factors.setflags(write=False)
    return LinearPropagator(factors=factors, duration=float(t), grid=symbol.grid)


def apply_linear(prop: LinearPropagator, state: SpectralState) -> SpectralState:
    """Advance a state through the exact linear flow."""
    if prop.grid != state.grid:
        raise GridMismatch("propagator and state were built on different grids")
    return SpectralState(prop.factors * state.coeffs, state.grid)


def _rk4_coeffs(coeffs: np.ndarray, dt: float, f) -> np.ndarray:
    a = f(coeffs)
    b = f(coeffs + (0.5 * dt) * a)
    c = f(coeffs + (0.5 * dt) * b)
    d = f(coeffs + dt * c)
    out = coeffs + (dt / 6.0) * (a + 2.0 * b + 2.0 * c + d)
    if not np.all(np.isfinite(out)):
        raise NonFiniteState("RK4 stage produced non-finite values")
    return out


def rk4_step(state: SpectralState, dt: float, rhs) -> SpectralState:
    """One classical four-stage Runge-Kutta step of ``state' = rhs(state)``."""
    if not math.isfinite(dt):
        raise ValueError("dt must be finite")
    grid = state.grid

    def f(coeffs):
        out = rhs(SpectralState(coeffs, grid)).coeffs
        if not np.all(np.isfinite(out)):
            raise NonFiniteState("right-hand side produced non-finite values")
        return out

    return SpectralState(_rk4_coeffs(state.coeffs, dt, f), grid)


def _nonlinear_flow_coeffs(
    coeffs: np.ndarray,
    dt: float,
    params: ModelParams,
    ik: np.ndarray,
    mask: np.ndarray | None,
    substeps: int,
) -> np.ndarray:
    def f(c):
        return _nonlinear_rhs_coeffs(c, params, ik, mask)

    sub_dt = dt / substeps
    for _ in range(substeps):
        coeffs = _rk4_coeffs(coeffs, sub_dt, f)
    return coeffs


def nonlinear_flow(
    state: SpectralState,
    dt: float,
    params: ModelParams,
    cfg: NonlinearFlowConfig = NonlinearFlowConfig(),
) -> SpectralState:
    """Advance the nonlinear subproblem by ``dt`` using RK4 substeps."""
    if not math.isfinite(dt):
        raise ValueError("dt must be finite")
    grid = state.grid
    ik = _derivative_symbol(grid, 1)
    mask = None if cfg.dealias == "none" else dealias_mask(grid, cfg.dealias)
    out = _nonlinear_flow_coeffs(state.coeffs, dt, params, ik, mask, cfg.substeps)
    return SpectralState(out, grid)
