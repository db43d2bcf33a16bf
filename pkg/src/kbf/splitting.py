"""Strang and Lie-Trotter compositions of the subflows, plus the time loop.

One Strang step applies half a linear step, a full nonlinear step and
another half linear step; the Lie-Trotter baseline applies a full linear
step followed by a full nonlinear step.  ``evolve`` runs a whole number of
steps with optional snapshots, an observer hook, blow-up guarding and
optional fusion of adjacent linear half steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BlowUp, ConfigError, NonFiniteState
from .flows import NonlinearFlowConfig, _nonlinear_flow_coeffs, build_propagator
from .model import LinearSymbol, ModelParams, linear_symbol
from .spectral import SpectralState, _derivative_symbol, dealias_mask

__all__ = [
    "SolveConfig",
    "Trajectory",
    "strang_step",
    "lie_trotter_step",
    "evolve",
]

SCHEMES = ("strang", "lie_trotter")

# evolve aborts when the L2 norm exceeds this multiple of the initial norm
BLOWUP_NORM_FACTOR = 1e6


@dataclass(frozen=True)
class SolveConfig:
    """Time-stepping parameters; ``t_final/dt`` must be a whole number of steps."""

    dt: float
    t_final: float
    scheme: str = "strang"
    nonlinear_cfg: NonlinearFlowConfig = NonlinearFlowConfig()
    fuse_half_steps: bool = False
    snapshot_stride: int = 0

    def __post_init__(self):
        if not (self.dt > 0) or not (self.t_final > 0):
            raise ConfigError("dt and t_final must be positive")
        if self.dt > self.t_final * (1 + 1e-12):
            raise ConfigError(f"dt={self.dt} exceeds t_final={self.t_final}")
        ratio = self.t_final / self.dt
        if abs(ratio - round(ratio)) > 1e-9 * max(1.0, ratio):
            raise ConfigError(
                f"t_final/dt = {ratio!r} is not a whole number of steps"
            )
        if self.scheme not in SCHEMES:
            raise ConfigError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if self.snapshot_stride < 0:
            raise ConfigError("snapshot_stride must be >= 0")

    @property
    def n_steps(self) -> int:
        return round(self.t_final / self.dt)


@dataclass(frozen=True)
class Trajectory:
    """Recorded snapshots of one solve; the final state is always present."""

    times: tuple
    states: tuple
    final: SpectralState
    steps_taken: int


def strang_step(
    state: SpectralState,
    dt: float,
    params: ModelParams,
    symbol: LinearSymbol,
    cfg: NonlinearFlowConfig = NonlinearFlowConfig(),
) -> SpectralState:
    """One Strang step: half linear, full nonlinear, half linear."""
    if not (dt > 0):
        raise ConfigError(f"dt must be positive, got {dt}")
    half = build_propagator(symbol, dt / 2.0)
    grid = state.grid
    ik = _derivative_symbol(grid, 1)
    mask = None if cfg.dealias == "none" else dealias_mask(grid, cfg.dealias)
    c = half.factors * state.coeffs
    c = _nonlinear_flow_coeffs(c, dt, params, ik, mask, cfg.substeps)
    c = half.factors * c
    return SpectralState(c, grid)


def lie_trotter_step(
    state: SpectralState,
    dt: float,
    params: ModelParams,
    symbol: LinearSymbol,
    cfg: NonlinearFlowConfig = NonlinearFlowConfig(),
) -> SpectralState:
    """One Lie-Trotter step: full linear step, then full nonlinear step."""
    if not (dt > 0):
        raise ConfigError(f"dt must be positive, got {dt}")
    full = build_propagator(symbol, dt)
    grid = state.grid
    ik = _derivative_symbol(grid, 1)
    mask = None if cfg.dealias == "none" else dealias_mask(grid, cfg.dealias)
    c = full.factors * state.coeffs
    c = _nonlinear_flow_coeffs(c, dt, params, ik, mask, cfg.substeps)
    return SpectralState(c, grid)


def _l2_from_coeffs(coeffs: np.ndarray, grid) -> float:
    return math.sqrt(float(np.sum(np.abs(coeffs) ** 2)) * grid.spacing / grid.n_modes)


def evolve(
    initial: SpectralState,
    params: ModelParams,
    config: SolveConfig,
    observer=None,
) -> Trajectory:
    """Run ``t_final/dt`` steps of the chosen scheme from ``initial``.

    Snapshots are recorded every ``snapshot_stride`` steps plus the initial
    and final states; stride 0 records the final state only.  The observer,
    when given, is called as ``observer(step, time, state)`` at each recorded
    step.  Raises BlowUp when a state turns non-finite or its L2 norm grows
    past ``BLOWUP_NORM_FACTOR`` times the initial norm.
    """
    grid = initial.grid
    symbol = linear_symbol(params, grid)
    cfg = config.nonlinear_cfg
    n = config.n_steps
    dt = config.dt
    stride = config.snapshot_stride

    ik = _derivative_symbol(grid, 1)
    mask = None if cfg.dealias == "none" else dealias_mask(grid, cfg.dealias)
    half = build_propagator(symbol, dt / 2.0).factors
    full = build_propagator(symbol, dt).factors

    initial_norm = _l2_from_coeffs(initial.coeffs, grid)
    norm_cap = BLOWUP_NORM_FACTOR * max(initial_norm, 1e-300)

    snap_steps = {n}
    if stride > 0:
        snap_steps.update(range(0, n + 1, stride))
        snap_steps.add(0)

    times = []
    states = []

    def record(step, coeffs):
        t = config.t_final if step == n else step * dt
        s = SpectralState(coeffs, grid)
        times.append(t)
        states.append(s)
        if observer is not None:
            observer(step, t, s)

    def step_nonlinear(step, coeffs):
        try:
            return _nonlinear_flow_coeffs(coeffs, dt, params, ik, mask, cfg.substeps)
        except NonFiniteState as exc:
            raise BlowUp(step, step * dt, str(exc)) from exc

    def guard(step, coeffs):
        if not np.all(np.isfinite(coeffs)):
            raise BlowUp(step, step * dt, "state turned non-finite")
        if _l2_from_coeffs(coeffs, grid) > norm_cap:
            raise BlowUp(step, step * dt, "L2 norm exploded")

    c = initial.coeffs.copy()
    if 0 in snap_steps:
        record(0, c.copy())

    if config.scheme == "lie_trotter":
        for step in range(1, n + 1):
            c = step_nonlinear(step, full * c)
            guard(step, c)
            if step in snap_steps:
                record(step, c.copy())
    elif not config.fuse_half_steps:
        for step in range(1, n + 1):
            c = half * (step_nonlinear(step, half * c))
            guard(step, c)
            if step in snap_steps:
                record(step, c.copy())
    else:
        # Merge the trailing and leading linear half steps of adjacent Strang
        # steps into one full step, except where a snapshot needs the true
        # end-of-step state.
        c = half * c
        for step in range(1, n + 1):
            c = step_nonlinear(step, c)
            if step in snap_steps:
                c = half * c
                guard(step, c)
                record(step, c.copy())
                if step < n:
                    c = half * c
            else:
                guard(step, c)
                c = full * c

    return Trajectory(
        times=tuple(times), states=tuple(states), final=states[-1], steps_taken=n
    )
