"""Independent solution sources.

An integrating-factor RK4 solver for the full equation serves as the
reference for convergence studies; closed-form oracles cover the
degenerate parameter limits (pure linear flow, logistic reaction).  The
oracles deliberately share no code with the production flows.
"""

from __future__ import annotations

import hashlib
import math
import struct
import threading
from pathlib import Path

import numpy as np

from .errors import (
    ConfigError,
    FileFormatError,
    NegativeDuration,
    NonFiniteState,
    SingularSolution,
)
from .model import LinearSymbol, ModelParams, _nonlinear_rhs_coeffs
from .spectral import GridSpec, SpectralState, _derivative_symbol

__all__ = [
    "integrating_factor_rk4_solve",
    "logistic_exact",
    "linear_exact_solution",
    "make_reference",
    "write_reference_file",
    "read_reference_file",
]

_MAGIC = b"KBFR"
_VERSION = 1

_cache_lock = threading.Lock()
_memory_cache: dict[str, np.ndarray] = {}


def integrating_factor_rk4_solve(
    initial: SpectralState,
    params: ModelParams,
    symbol: LinearSymbol,
    dt: float,
    t_final: float,
) -> SpectralState:
    """Integrate the full equation with the integrating-factor RK4 method.

    The linear part is removed by the exact exponential substitution
    ``w = exp(-lambda*(t-t_n)) * yhat`` recentered at each step, so the
    explicit RK4 stages see only the nonlinearity; stage exponentials at
    ``dt/2`` and ``dt`` are precomputed once.  Exact for any ``dt`` when the
    nonlinear coefficients vanish.
    """
    if not (dt > 0):
        raise ConfigError(f"dt must be positive, got {dt}")
    ratio = t_final / dt
    n = round(ratio)
    if n < 1 or abs(ratio - n) > 1e-9 * max(1.0, ratio):
        raise ConfigError(f"t_final/dt = {ratio!r} is not a whole number of steps")
    grid = initial.grid
    ik = _derivative_symbol(grid, 1)
    e_half = np.exp(symbol.values * (dt / 2.0))
    e_full = e_half * e_half

    def f(c):
        return _nonlinear_rhs_coeffs(c, params, ik, None)

    c = initial.coeffs.copy()
    for step in range(n):
        a = f(c)
        b = f(e_half * (c + (0.5 * dt) * a))
        s3 = f(e_half * c + (0.5 * dt) * b)
        s4 = f(e_full * c + dt * (e_half * s3))
        c = e_full * c + (dt / 6.0) * (e_full * a + 2.0 * e_half * (b + s3) + s4)
        if not np.all(np.isfinite(c)):
            raise NonFiniteState(f"reference solve turned non-finite at step {step + 1}")
    return SpectralState(c, grid)


def logistic_exact(c0: float, eps_react: float, t: float) -> float:
    """Closed-form logistic solution ``c0*e^(eps*t) / (1 - c0 + c0*e^(eps*t))``."""
    growth = math.exp(eps_react * t)
    denom = 1.0 - c0 + c0 * growth
    if abs(denom) < 1e-14:
        raise SingularSolution(
            f"logistic solution singular for c0={c0}, eps={eps_react}, t={t}"
        )
    return c0 * growth / denom


def linear_exact_solution(
    initial: SpectralState, symbol: LinearSymbol, t: float
) -> SpectralState:
    """Exact linear evolution by direct per-mode exponentiation.

    Same contract as the propagator route but kept as a separate code path
    for oracle duty.
    """
    if not (t >= 0) or not math.isfinite(t):
        raise NegativeDuration(f"duration must be >= 0, got {t}")
    return SpectralState(np.exp(symbol.values * t) * initial.coeffs, initial.grid)


_QUALITY_STEPS = {"standard": 4096, "high": 16384}


def _content_key(
    initial: SpectralState,
    params: ModelParams,
    t_final: float,
    quality: str,
) -> str:
    g = initial.grid
    h = hashlib.sha256()
    h.update(initial.coeffs.tobytes())
    h.update(
        struct.pack(
            "<qdd", g.n_modes, g.domain_start, g.domain_length
        )
    )
    h.update(
        struct.pack(
            "<5d", params.nu, params.mu, params.gamma, params.eps_conv, params.eps_react
        )
    )
    h.update(struct.pack("<d", t_final))
    h.update(quality.encode())
    return h.hexdigest()


def write_reference_file(path, state: SpectralState) -> None:
    """Write coefficients in the binary cache layout.

    Little-endian: magic ``KBFR``, version u32, N u32, then N interleaved
    (re, im) float64 pairs.
    """
    n = state.grid.n_modes
    payload = np.empty(2 * n, dtype="<f8")
    payload[0::2] = state.coeffs.real
    payload[1::2] = state.coeffs.imag
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<II", _VERSION, n))
        fh.write(payload.tobytes())


def read_reference_file(path, grid: GridSpec) -> SpectralState:
    """Read a cache file written by :func:`write_reference_file`."""
    with open(path, "rb") as fh:
        blob = fh.read()
    if len(blob) < 12 or blob[:4] != _MAGIC:
        raise FileFormatError(f"{path}: bad magic bytes")
    version, n = struct.unpack("<II", blob[4:12])
    if version != _VERSION:
        raise FileFormatError(f"{path}: unsupported version {version}")
    if len(blob) != 12 + 16 * n:
        raise FileFormatError(f"{path}: truncated payload")
    if n != grid.n_modes:
        raise FileFormatError(f"{path}: file has {n} modes, grid has {grid.n_modes}")
    payload = np.frombuffer(blob, dtype="<f8", offset=12)
    return SpectralState(payload[0::2] + 1j * payload[1::2], grid)


def make_reference(
    initial: SpectralState,
    params: ModelParams,
    symbol: LinearSymbol,
    t_final: float,
    quality: str = "standard",
    cache_dir=None,
) -> SpectralState:
    """Cached integrating-factor reference solution at ``t_final``.

    ``standard`` quality uses ``dt = t_final/4096``, ``high`` uses
    ``t_final/16384``; results are keyed by a content hash of the inputs in
    an in-memory cache and, when ``cache_dir`` is given, on disk.
    """
    if quality not in _QUALITY_STEPS:
        raise ConfigError(f"quality must be one of {sorted(_QUALITY_STEPS)}")
    key = _content_key(initial, params, t_final, quality)
    with _cache_lock:
        hit = _memory_cache.get(key)
    if hit is not None:
        return SpectralState(hit, initial.grid)

    disk_path = None
    if cache_dir is not None:
        disk_path = Path(cache_dir) / f"{key}.kbfr"
        if disk_path.exists():
            state = read_reference_file(disk_path, initial.grid)
            with _cache_lock:
                _memory_cache[key] = state.coeffs
            return state

    steps = _QUALITY_STEPS[quality]
    state = integrating_factor_rk4_solve(
        initial, params, symbol, t_final / steps, t_final
    )
    with _cache_lock:
        _memory_cache[key] = state.coeffs
    if disk_path is not None:
        disk_path.parent.mkdir(parents=True, exist_ok=True)
        write_reference_file(disk_path, state)
    return state
