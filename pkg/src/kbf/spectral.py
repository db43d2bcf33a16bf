"""Periodic Fourier collocation core.

Grid construction, the DFT/IDFT pair, spectral differentiation,
trigonometric interpolation, discrete L2/H^s norms and dealiasing masks.

Conventions
-----------
Coefficients are stored in FFT order (numpy's layout), indexed by the
integer wavenumbers ``0, 1, ..., N/2-1, -N/2, ..., -1``; the forward
transform is unscaled and the inverse carries the ``1/N`` factor.  The
physical wavenumber of integer mode ``k`` is ``(2*pi/L)*k``.  Norm weights
carry the grid spacing ``h`` so that the L2 norm approximates the integral
norm and s=0 Sobolev norms satisfy Parseval against it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidGrid,
    InvalidTestFunction,
    NonFiniteInput,
    NotRealRepresentable,
)

__all__ = [
    "GridSpec",
    "SpectralState",
    "NormSpec",
    "make_grid",
    "to_spectral",
    "to_physical",
    "derivative",
    "eval_interpolant",
    "norm",
    "dealias_mask",
    "interpolation_error_decay",
    "real_residue",
    "TEST_FUNCTIONS",
]


@dataclass(frozen=True, eq=False)
class GridSpec:
    """Equispaced periodic grid on [a, a+L), right endpoint excluded."""

    n_modes: int
    domain_start: float
    domain_length: float
    points: np.ndarray = field(repr=False)
    wavenumber_scale: float

    def __eq__(self, other):
        if not isinstance(other, GridSpec):
            return NotImplemented
        return (
            self.n_modes == other.n_modes
            and self.domain_start == other.domain_start
            and self.domain_length == other.domain_length
        )

    def __hash__(self):
        return hash((self.n_modes, self.domain_start, self.domain_length))

    @property
    def spacing(self) -> float:
        return self.domain_length / self.n_modes

    @property
    def wavenumbers(self) -> np.ndarray:
        """Integer wavenumbers in FFT order: 0..N/2-1, -N/2..-1."""
        return _int_wavenumbers(self.n_modes)

    @property
    def physical_wavenumbers(self) -> np.ndarray:
        return self.wavenumber_scale * _int_wavenumbers(self.n_modes)


def _int_wavenumbers(n: int) -> np.ndarray:
    k = np.fft.fftfreq(n, d=1.0 / n)
    return k.astype(np.int64)


def make_grid(n_modes: int, domain_start: float, domain_length: float) -> GridSpec:
    """Build a periodic grid with ``n_modes`` equispaced collocation points.

    ``n_modes`` must be even and at least 4; ``domain_length`` positive.
    """
    if n_modes < 4 or n_modes % 2 != 0:
        raise InvalidGrid(f"n_modes must be even and >= 4, got {n_modes}")
    if not (domain_length > 0) or not math.isfinite(domain_length):
        raise InvalidGrid(f"domain_length must be positive, got {domain_length}")
    if not math.isfinite(domain_start):
        raise InvalidGrid("domain_start must be finite")
    points = domain_start + np.arange(n_modes) * (domain_length / n_modes)
    points.setflags(write=False)
    return GridSpec(
        n_modes=int(n_modes),
        domain_start=float(domain_start),
        domain_length=float(domain_length),
        points=points,
        wavenumber_scale=2.0 * np.pi / float(domain_length),
    )


@dataclass(frozen=True)
class SpectralState:
    """Fourier coefficients of one solution snapshot, tied to its grid."""

    coeffs: np.ndarray
    grid: GridSpec

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=np.complex128)
        if c.shape != (self.grid.n_modes,):
            raise DimensionMismatch(
                f"coefficient vector has length {c.shape}, grid has {self.grid.n_modes} modes"
            )
        c = c.copy()
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)


@dataclass(frozen=True)
class NormSpec:
    """Choice of discrete norm: plain L2 or Sobolev H^s."""

    kind: str = "l2"
    s: int = 0

    def __post_init__(self):
        if self.kind not in ("l2", "hs"):
            raise ValueError(f"norm kind must be 'l2' or 'hs', got {self.kind!r}")
        if self.s < 0:
            raise ValueError("Sobolev index s must be nonnegative")


def to_spectral(values: np.ndarray, grid: GridSpec) -> SpectralState:
    """Forward DFT of real grid values (unscaled forward convention)."""
    v = np.asarray(values, dtype=np.float64)
    if v.shape != (grid.n_modes,):
        raise DimensionMismatch(
            f"expected {grid.n_modes} values, got shape {v.shape}"
        )
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("values contain NaN or infinity")
    return SpectralState(np.fft.fft(v), grid)


def real_residue(coeffs: np.ndarray) -> float:
    """Relative size of the imaginary contamination of the grid values."""
    z = np.fft.ifft(coeffs)
    scale = np.max(np.abs(z))
    if scale == 0.0:
        return 0.0
    return float(np.max(np.abs(z.imag)) / scale)


def to_physical(state: SpectralState, tol: float = 1e-8) -> np.ndarray:
    """Inverse DFT to real grid values.

    Raises NotRealRepresentable if the imaginary residue exceeds ``tol``
    relative to the state's magnitude.
    """
    z = np.fft.ifft(state.coeffs)
    scale = np.max(np.abs(z))
    if scale > 0.0 and np.max(np.abs(z.imag)) > tol * scale:
        raise NotRealRepresentable(
            f"imaginary residue {np.max(np.abs(z.imag)) / scale:.3e} exceeds {tol:g}"
        )
    return z.real


def _derivative_symbol(grid: GridSpec, order: int) -> np.ndarray:
    """(i*kappa)**order with exact real/imaginary split and odd-order Nyquist zeroing."""
    kappa = grid.physical_wavenumbers
    mag = kappa.astype(np.float64) ** order
    cycle = order % 4
    if cycle == 0:
        sym = mag.astype(np.complex128)
    elif cycle == 1:
        sym = 1j * mag
    elif cycle == 2:
        sym = (-mag).astype(np.complex128)
    else:
        sym = -1j * mag
    if order % 2 == 1:
        # The Nyquist mode has no conjugate partner; an odd-order symbol there
        # would push real data off the real line.
        sym[grid.n_modes // 2] = 0.0
    return sym


def derivative(state: SpectralState, order: int) -> SpectralState:
    """Spectral derivative of the given order (>= 1)."""
    if order < 1:
        raise ValueError(f"derivative order must be >= 1, got {order}")
    sym = _derivative_symbol(state.grid, order)
    return SpectralState(sym * state.coeffs, state.grid)


def eval_interpolant(state: SpectralState, points: np.ndarray, tol: float = 1e-8) -> np.ndarray:
    """Evaluate the trigonometric interpolant at arbitrary points.

    Direct summation over modes; the Nyquist coefficient contributes a pure
    cosine so real data yields a real interpolant.
    """
    if real_residue(state.coeffs) > tol:
        raise NotRealRepresentable("state is not real-representable")
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    grid = state.grid
    n = grid.n_modes
    xi = pts - grid.domain_start
    kappa = grid.physical_wavenumbers
    nyq = n // 2
    mask = np.ones(n, dtype=bool)
    mask[nyq] = False
    phases = np.exp(1j * np.outer(xi, kappa[mask]))
    vals = phases @ state.coeffs[mask]
    vals = vals + state.coeffs[nyq].real * np.cos(kappa[nyq] * xi)
    return np.asarray(vals.real / n)


def _hs_sq_from_coeffs(coeffs: np.ndarray, grid: GridSpec, s: int) -> float:
    kappa = grid.physical_wavenumbers
    w = grid.spacing / grid.n_modes
    weights = (1.0 + kappa * kappa) ** s if s else 1.0
    return float(np.sum(weights * np.abs(coeffs) ** 2) * w)


def norm(obj, spec: NormSpec = NormSpec(), grid: GridSpec | None = None) -> float:
    """Discrete norm of a state or of raw grid values.

    L2 of grid values is ``sqrt(h * sum y_j^2)``; the H^s norm weights the
    coefficients by ``(1 + kappa^2)^s`` with the normalization chosen so that
    s=0 agrees with L2 (Parseval).  Raw values need an explicit ``grid``.
    """
    if isinstance(obj, SpectralState):
        coeffs, g = obj.coeffs, obj.grid
        if not np.all(np.isfinite(coeffs)):
            raise NonFiniteInput("coefficients contain NaN or infinity")
        s = spec.s if spec.kind == "hs" else 0
        return math.sqrt(_hs_sq_from_coeffs(coeffs, g, s))
    v = np.asarray(obj, dtype=np.float64)
    if grid is None:
        raise ValueError("raw values need an explicit grid")
    if v.shape != (grid.n_modes,):
        raise DimensionMismatch(f"expected {grid.n_modes} values, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise NonFiniteInput("values contain NaN or infinity")
    if spec.kind == "l2":
        return math.sqrt(float(grid.spacing * np.sum(v * v)))
    return norm(to_spectral(v, grid), spec)


def dealias_mask(grid: GridSpec, rule: str = "none") -> np.ndarray:
    """Boolean keep-mask over modes; ``two_thirds`` keeps ``|k| <= floor(N/3)``."""
    if rule == "none":
        return np.ones(grid.n_modes, dtype=bool)
    if rule == "two_thirds":
        cutoff = grid.n_modes // 3
        return np.abs(grid.wavenumbers) <= cutoff
    raise ValueError(f"unknown dealias rule {rule!r}")


TEST_FUNCTIONS = {
    "inverse_two_plus_cos": lambda x: 1.0 / (2.0 + np.cos(x)),
    "exp_sin": lambda x: np.exp(np.sin(x)),
    "abs_sin_cubed": lambda x: np.abs(np.sin(x)) ** 3,
}


def interpolation_error_decay(function_id: str, spec: NormSpec, n_list) -> list[tuple[int, float]]:
    """Interpolation error of a built-in 2*pi-periodic test function vs N.

    The error is measured against samples on a reference grid with
    ``N_ref >= 8 * max(n_list)``; pairs are returned in ascending N.
    """
    try:
        f = TEST_FUNCTIONS[function_id]
    except KeyError:
        raise InvalidTestFunction(
            f"unknown test function {function_id!r}; choose from {sorted(TEST_FUNCTIONS)}"
        ) from None
    ns = sorted(int(n) for n in n_list)
    if not ns:
        return []
    n_ref = max(512, 8 * ns[-1])
    ref_grid = make_grid(n_ref, 0.0, 2.0 * np.pi)
    ref_vals = f(ref_grid.points)
    out = []
    for n in ns:
        g = make_grid(n, 0.0, 2.0 * np.pi)
        interp = eval_interpolant(to_spectral(f(g.points), g), ref_grid.points)
        out.append((n, norm(interp - ref_vals, spec, grid=ref_grid)))
    return out
