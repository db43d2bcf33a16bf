"""Convergence studies and error reporting.

Temporal studies measure the error of the splitting schemes at a ladder of
step counts against the integrating-factor reference; spatial studies fix a
fine time step and sweep mode counts against a run on the finest grid.
Reports carry the full configuration echo and serialize to CSV and to a
structured text form, both of which reparse exactly.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

from .conditions import InitialConditionSpec, build_initial
from .errors import BlowUp, FileFormatError, GridMismatch, NonPositiveError
from .flows import NonlinearFlowConfig
from .model import ModelParams, linear_symbol
from .reference import make_reference
from .spectral import (
    GridSpec,
    NormSpec,
    SpectralState,
    eval_interpolant,
    make_grid,
    norm,
    to_physical,
)
from .splitting import SolveConfig, evolve

__all__ = [
    "ConvergenceReport",
    "ExperimentSpec",
    "error_norm",
    "observed_order",
    "temporal_convergence_study",
    "spatial_convergence_study",
    "report_to_csv",
    "report_from_csv",
    "report_to_text",
    "report_from_text",
]


def _fmt(x: float) -> str:
    # 17 significant digits round-trip binary64 exactly
    return format(float(x), ".17g")


# below this error level, pairwise orders are round-off noise and are omitted
ORDER_FLOOR = 1e-12


@dataclass(frozen=True)
class ConvergenceReport:
    """Errors and pairwise observed orders along one refinement axis."""

    study_kind: str
    axis: tuple
    errors: tuple
    orders: tuple
    norm: NormSpec
    config_echo: dict = field(default_factory=dict)

    def __post_init__(self):
        if list(self.axis) != sorted(self.axis) or len(set(self.axis)) != len(self.axis):
            raise ValueError("axis must be strictly increasing")
        if any(not math.isfinite(e) for e in self.errors):
            raise ValueError("errors must be finite")


@dataclass(frozen=True)
class ExperimentSpec:
    """Everything needed to rerun one convergence study."""

    params: ModelParams
    grid: GridSpec
    initial_condition: InitialConditionSpec
    t_final: float
    scheme: str = "strang"
    norm: NormSpec = NormSpec()
    axis: tuple = ()
    nonlinear_cfg: NonlinearFlowConfig = NonlinearFlowConfig()

    def __post_init__(self):
        if not self.axis:
            raise ValueError("axis must be non-empty")
        object.__setattr__(self, "axis", tuple(int(a) for a in self.axis))


def error_norm(
    approx: SpectralState,
    reference: SpectralState,
    spec: NormSpec = NormSpec(),
    allow_interpolation: bool = True,
) -> float:
    """Norm of the difference; a coarser state is interpolated onto the finer grid."""
    ga, gr = approx.grid, reference.grid
    if ga == gr:
        return norm(SpectralState(approx.coeffs - reference.coeffs, ga), spec)
    same_domain = (
        ga.domain_start == gr.domain_start and ga.domain_length == gr.domain_length
    )
    if not allow_interpolation or not same_domain:
        raise GridMismatch("states live on different grids")
    coarse, fine = (approx, reference) if ga.n_modes < gr.n_modes else (reference, approx)
    diff = eval_interpolant(coarse, fine.grid.points) - to_physical(fine)
    return norm(diff, spec, grid=fine.grid)


def observed_order(errors, refinement_factor: float = 2.0) -> list[float]:
    """Pairwise orders ``log(e_i/e_{i+1}) / log(factor)`` along a refinement ladder."""
    errs = [float(e) for e in errors]
    if len(errs) < 2:
        raise NonPositiveError("need at least two errors")
    if any(e <= 0 for e in errs):
        raise NonPositiveError("errors must be strictly positive")
    logf = math.log(refinement_factor)
    return [math.log(a / b) / logf for a, b in zip(errs[:-1], errs[1:])]


def _thread_count() -> int:
    try:
        return max(1, int(os.environ.get("KBF_THREADS", "1")))
    except ValueError:
        return 1


def _map_ordered(fn, items):
    workers = min(_thread_count(), len(items))
    if workers <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))


def _echo_common(spec: ExperimentSpec) -> dict:
    p, g, ic = spec.params, spec.grid, spec.initial_condition
    echo = {
        "scheme": spec.scheme,
        "nu": _fmt(p.nu),
        "mu": _fmt(p.mu),
        "gamma": _fmt(p.gamma),
        "eps_conv": _fmt(p.eps_conv),
        "eps_react": _fmt(p.eps_react),
        "n_modes": str(g.n_modes),
        "domain_start": _fmt(g.domain_start),
        "domain_length": _fmt(g.domain_length),
        "t_final": _fmt(spec.t_final),
        "substeps": str(spec.nonlinear_cfg.substeps),
        "dealias": spec.nonlinear_cfg.dealias,
        "norm": _norm_to_str(spec.norm),
        "ic.kind": ic.kind,
    }
    if ic.kind == "constant":
        echo["ic.c"] = _fmt(ic.c)
    elif ic.kind == "mode":
        echo["ic.mode_k"] = str(ic.mode_k)
        echo["ic.mode_amp"] = _fmt(ic.mode_amp)
        echo["ic.mode_offset"] = _fmt(ic.mode_offset)
    elif ic.kind == "file":
        echo["ic.path"] = ic.path
    return echo


def _norm_to_str(n: NormSpec) -> str:
    return "l2" if n.kind == "l2" else f"h{n.s}"


def _norm_from_str(s: str) -> NormSpec:
    if s == "l2":
        return NormSpec("l2", 0)
    if s.startswith("h") and s[1:].isdigit():
        return NormSpec("hs", int(s[1:]))
    raise FileFormatError(f"bad norm spec {s!r}")


def temporal_convergence_study(
    spec: ExperimentSpec,
    quality: str = "high",
    cache_dir=None,
) -> ConvergenceReport:
    """Errors versus step count at fixed N, against the integrating-factor reference.

    The reference is computed once before the step-count fan-out; the error
    is measured at the final time only.  The errors are absolute.
    """
    initial = build_initial(spec.initial_condition, spec.grid)
    symbol = linear_symbol(spec.params, spec.grid)
    ref = make_reference(
        initial, spec.params, symbol, spec.t_final, quality=quality, cache_dir=cache_dir
    )

    def run(n_steps: int) -> float:
        cfg = SolveConfig(
            dt=spec.t_final / n_steps,
            t_final=spec.t_final,
            scheme=spec.scheme,
            nonlinear_cfg=spec.nonlinear_cfg,
        )
        try:
            traj = evolve(initial, spec.params, cfg)
        except BlowUp as exc:
            raise BlowUp(
                exc.step, exc.time, f"blow-up at axis value {n_steps}: {exc}"
            ) from exc
        return error_norm(traj.final, ref, spec.norm)

    axis = tuple(sorted(spec.axis))
    errors = tuple(_map_ordered(run, list(axis)))
    orders = tuple(observed_order(errors)) if min(errors) > ORDER_FLOOR else ()
    echo = _echo_common(spec)
    echo["study"] = "temporal"
    echo["reference_quality"] = quality
    echo["error_kind"] = "absolute"
    echo["axis"] = ",".join(str(a) for a in axis)
    return ConvergenceReport(
        study_kind="temporal",
        axis=axis,
        errors=errors,
        orders=orders,
        norm=spec.norm,
        config_echo=echo,
    )


def spatial_convergence_study(spec: ExperimentSpec, dt: float | None = None) -> ConvergenceReport:
    """Errors versus mode count at a fixed fine time step.

    Every run, including the reference on ``spec.grid`` (the finest grid),
    uses the same scheme and the same ``dt`` (default ``t_final/2048``), so
    the shared time-discretization error cancels and the differences isolate
    the spatial error.  Coarse solutions are interpolated onto the reference
    grid for differencing.
    """
    if dt is None:
        dt = spec.t_final / 2048.0
    ref_grid = spec.grid
    for n in spec.axis:
        if n % 2 != 0 or n < 4:
            raise ValueError(f"axis mode counts must be even and >= 4, got {n}")
        if n >= ref_grid.n_modes:
            raise ValueError(
                f"axis mode count {n} must stay below the reference grid ({ref_grid.n_modes})"
            )

    def run_on(n_modes: int) -> SpectralState:
        g = make_grid(n_modes, ref_grid.domain_start, ref_grid.domain_length)
        cfg = SolveConfig(
            dt=dt,
            t_final=spec.t_final,
            scheme=spec.scheme,
            nonlinear_cfg=spec.nonlinear_cfg,
        )
        initial = build_initial(spec.initial_condition, g)
        try:
            return evolve(initial, spec.params, cfg).final
        except BlowUp as exc:
            raise BlowUp(exc.step, exc.time, f"blow-up at axis value {n_modes}: {exc}") from exc

    ref = run_on(ref_grid.n_modes)
    axis = tuple(sorted(spec.axis))
    errors = tuple(
        _map_ordered(lambda n: error_norm(run_on(n), ref, spec.norm), list(axis))
    )
    orders = tuple(observed_order(errors)) if min(errors) > ORDER_FLOOR else ()
    echo = _echo_common(spec)
    echo["study"] = "spatial"
    echo["dt"] = _fmt(dt)
    echo["reference_n_modes"] = str(ref_grid.n_modes)
    echo["error_kind"] = "absolute"
    echo["axis"] = ",".join(str(a) for a in axis)
    return ConvergenceReport(
        study_kind="spatial",
        axis=axis,
        errors=errors,
        orders=orders,
        norm=spec.norm,
        config_echo=echo,
    )


def _report_rows(report: ConvergenceReport):
    t_final = float(report.config_echo.get("t_final", "nan"))
    for i, (a, e) in enumerate(zip(report.axis, report.errors)):
        if report.study_kind == "temporal":
            dt_or_n = _fmt(t_final / a)
        else:
            dt_or_n = report.config_echo.get("dt", "")
        order = _fmt(report.orders[i - 1]) if 0 < i <= len(report.orders) else ""
        yield str(a), dt_or_n, _fmt(e), order


def report_to_csv(report: ConvergenceReport) -> str:
    """CSV with a commented key-value header and axis/dt_or_n/error/order columns."""
    lines = [f"# {k} = {v}" for k, v in report.config_echo.items()]
    lines.append("axis,dt_or_n,error,order")
    lines.extend(",".join(row) for row in _report_rows(report))
    return "\n".join(lines) + "\n"


def report_to_text(report: ConvergenceReport) -> str:
    """Structured text: key-value metadata, a blank line, then the table."""
    lines = [f"{k} = {v}" for k, v in report.config_echo.items()]
    lines.append("")
    lines.append("axis dt_or_n error order")
    lines.extend(" ".join(x if x else "-" for x in row) for row in _report_rows(report))
    return "\n".join(lines) + "\n"


def _report_from_parts(echo: dict, rows: list) -> ConvergenceReport:
    study = echo.get("study", "")
    if study not in ("temporal", "spatial"):
        raise FileFormatError(f"bad or missing study kind {study!r}")
    axis = tuple(int(r[0]) for r in rows)
    errors = tuple(float(r[2]) for r in rows)
    orders = tuple(float(r[3]) for r in rows if r[3] not in ("", "-"))
    return ConvergenceReport(
        study_kind=study,
        axis=axis,
        errors=errors,
        orders=orders,
        norm=_norm_from_str(echo.get("norm", "l2")),
        config_echo=echo,
    )


def report_from_csv(text: str) -> ConvergenceReport:
    echo = {}
    rows = []
    seen_header = False
    for raw in text.splitlines():
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                echo[k.strip()] = v.strip()
            continue
        if not seen_header:
            if line != "axis,dt_or_n,error,order":
                raise FileFormatError(f"bad report header {line!r}")
            seen_header = True
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise FileFormatError(f"bad report row {line!r}")
        rows.append(parts)
    if not seen_header:
        raise FileFormatError("missing report header")
    return _report_from_parts(echo, rows)


def report_from_text(text: str) -> ConvergenceReport:
    lines = text.splitlines()
    echo = {}
    i = 0
    while i < len(lines) and lines[i].strip():
        k, _, v = lines[i].partition("=")
        if not _:
            raise FileFormatError(f"bad metadata line {lines[i]!r}")
        echo[k.strip()] = v.strip()
        i += 1
    while i < len(lines) and not lines[i].strip():
        i += 1
    if i >= len(lines) or lines[i].split() != ["axis", "dt_or_n", "error", "order"]:
        raise FileFormatError("missing table header")
    rows = []
    for line in lines[i + 1 :]:
        if not line.strip():
            continue
        parts = line.split()
        if len(parts) != 4:
            raise FileFormatError(f"bad table row {line!r}")
        rows.append(parts)
    return _report_from_parts(echo, rows)
