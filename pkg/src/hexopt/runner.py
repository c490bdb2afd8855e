"""Drive the optimizer over scenarios and sweeps, and write result tables."""

from __future__ import annotations

import csv
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, fields

from .catalog import STRATEGIES, ScenarioSpec, lookup_material
from .dimensional import BaselineOperating, dimensionalize
from .optimize import (
    GammaLinkedProblem,
    Infeasible,
    OptimizationResult,
    ThicknessConstrainedProblem,
    improvement_factor,
    maximize,
    solve_length_for_effectiveness,
)
from .thermal import (
    FlowConstants,
    MaterialSpec,
    NondimDesign,
    ReferenceScales,
    axial_conduction_parameter,
    effectiveness_limit,
    evaluate,
    power_density_nondim,
)

__all__ = [
    "ResultRow",
    "RunError",
    "ScenarioContext",
    "run_scenario",
    "run_effectiveness_sweep",
    "run_thickness_sweep",
    "sort_rows",
    "emit",
    "verify_rows",
    "DEFAULT_EPS_GRID",
    "DEFAULT_T_GRID",
    "DEFAULT_EPS_SET",
]

DEFAULT_EPS_GRID = tuple(round(0.55 + 0.0325 * i, 6) for i in range(13))
DEFAULT_T_GRID = (0.05e-3, 0.1e-3, 0.15e-3, 0.2e-3, 0.25e-3, 0.3e-3, 0.4e-3, 0.5e-3)
DEFAULT_EPS_SET = (0.6, 0.7, 0.79, 0.9)

_STRATEGY_ORDER = ("baseline",) + STRATEGIES


class RunError(RuntimeError):
    """Solver or scenario failure, tagged with the material it occurred for."""


@dataclass(frozen=True)
class ResultRow:
    scenario: str
    strategy: str
    material: str
    eps_d: float
    effectiveness: float | None
    t_star: float | None
    t: float | None
    D_star: float | None
    D: float | None
    L_star: float | None
    L: float | None
    q_nondim: float | None
    power_density: float | None
    improvement_factor: float | None
    fouling_active: bool
    feasible: bool
    eps_limit: float | None
    W: float | None = None
    n: int | None = None
    mdot_per_width: float | None = None


FIELD_NAMES = tuple(f.name for f in fields(ResultRow))


@dataclass(frozen=True)
class ScenarioContext:
    """Quantities shared by every point of a scenario."""

    spec: ScenarioSpec
    scales: ReferenceScales
    baseline: BaselineOperating
    baseline_design: NondimDesign
    q_baseline: float
    consts: FlowConstants = FlowConstants()

    @classmethod
    def from_spec(cls, spec: ScenarioSpec, consts: FlowConstants = FlowConstants()) -> "ScenarioContext":
        scales = ReferenceScales.from_fluid(spec.fluid, spec.t_ref, spec.reference_dp, spec.dp)
        b = spec.baseline
        operating = BaselineOperating.from_geometry(
            spec.fluid,
            L=b.L,
            D=b.D,
            W=b.W,
            n=b.n,
            delta_T=spec.delta_T,
            t_ref=spec.t_ref,
            dp_ref=spec.reference_dp,
            dp=spec.dp,
            consts=consts,
        )
        design = NondimDesign(b.L / spec.t_ref, b.D / spec.t_ref, b.t / spec.t_ref)
        q = evaluate(design, spec.fluid, b.material, scales, consts).q_nondim
        return cls(spec, scales, operating, design, q, consts)


def _row(
    ctx: ScenarioContext, strategy: str, material: MaterialSpec, eps_d: float, result: OptimizationResult
) -> ResultRow:
    spec, d, perf = ctx.spec, result.design, result.performance
    dim = dimensionalize(d, perf.effectiveness, ctx.baseline, spec.fluid, ctx.consts, ctx.scales.psi)
    return ResultRow(
        scenario=spec.name,
        strategy=strategy,
        material=material.name,
        eps_d=eps_d,
        effectiveness=perf.effectiveness,
        t_star=d.t_star,
        t=dim.t,
        D_star=d.D_star,
        D=dim.D,
        L_star=d.L_star,
        L=dim.L,
        q_nondim=perf.q_nondim,
        power_density=dim.power_density,
        improvement_factor=improvement_factor(perf.q_nondim, ctx.q_baseline),
        fouling_active=result.fouling_active,
        feasible=True,
        eps_limit=effectiveness_limit(perf.m_axial),
        W=dim.W,
        n=dim.n,
        mdot_per_width=dim.mdot_per_width,
    )


def _infeasible_row(ctx: ScenarioContext, strategy: str, material: MaterialSpec, eps_d: float, exc: Infeasible) -> ResultRow:
    return ResultRow(
        scenario=ctx.spec.name,
        strategy=strategy,
        material=material.name,
        eps_d=eps_d,
        effectiveness=None,
        t_star=None,
        t=None,
        D_star=None,
        D=None,
        L_star=None,
        L=None,
        q_nondim=None,
        power_density=None,
        improvement_factor=None,
        fouling_active=False,
        feasible=False,
        eps_limit=exc.eps_limit,
    )


def baseline_row(ctx: ScenarioContext) -> ResultRow:
    spec = ctx.spec
    material = spec.baseline.material
    perf = evaluate(ctx.baseline_design, spec.fluid, material, ctx.scales, ctx.consts)
    result = OptimizationResult(ctx.baseline_design, perf)
    return _row(ctx, "baseline", material, perf.effectiveness, result)


def _am_reference(ctx: ScenarioContext, material: MaterialSpec, eps_d: float, t: float) -> OptimizationResult:
    spec = ctx.spec
    D_star = spec.baseline.D / spec.t_ref
    t_star = t / spec.t_ref
    L_star = solve_length_for_effectiveness(D_star, t_star, eps_d, material, spec.fluid, ctx.scales, ctx.consts)
    design = NondimDesign(L_star, D_star, t_star)
    return OptimizationResult(design, evaluate(design, spec.fluid, material, ctx.scales, ctx.consts))


def _solve_point(task) -> ResultRow:
    """One (strategy, material, eps_d, thickness) point; module level so worker processes can run it."""
    ctx, strategy, material, eps_d, t = task
    spec = ctx.spec
    try:
        if strategy == "am_reference":
            result = _am_reference(ctx, material, eps_d, t)
        elif strategy == "gamma_linked":
            result = maximize(GammaLinkedProblem(eps_d, spec.gamma, material, spec.fluid, ctx.scales, ctx.consts))
        else:
            d_min = spec.D_min if strategy != "uniform_thickness" and spec.D_min is not None else 0.0
            problem = ThicknessConstrainedProblem(
                eps_d, t / spec.t_ref, material, spec.fluid, ctx.scales, d_min / spec.t_ref, ctx.consts
            )
            result = maximize(problem)
    except Infeasible as exc:
        return _infeasible_row(ctx, strategy, material, eps_d, exc)
    except Exception as exc:  # noqa: BLE001 - re-raised with material context
        raise RunError(f"{spec.name}/{strategy}/{material.name} at eps_d={eps_d}: {exc}") from exc
    return _row(ctx, strategy, material, eps_d, result)


def _run(tasks, jobs: int) -> list[ResultRow]:
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_solve_point, tasks))
    return [_solve_point(t) for t in tasks]


def _material_rank(spec: ScenarioSpec):
    order = {m.name: i for i, m in enumerate(spec.materials)}
    return lambda name: order.get(name, len(order))


def sort_rows(rows, spec: ScenarioSpec) -> list[ResultRow]:
    """Canonical order: strategy, material (catalog order), then eps_d.

    The sort is stable; rows are generated in ascending thickness, which
    survives for infeasible points that carry no thickness.
    """
    rank = _material_rank(spec)

    def key(r: ResultRow):
        strat = _STRATEGY_ORDER.index(r.strategy) if r.strategy in _STRATEGY_ORDER else len(_STRATEGY_ORDER)
        return (strat, rank(r.material), r.eps_d)

    return sorted(rows, key=key)


def run_scenario(
    spec: ScenarioSpec,
    *,
    include_baseline: bool | None = None,
    jobs: int = 1,
    consts: FlowConstants = FlowConstants(),
) -> list[ResultRow]:
    """One row per material for the scenario's strategy.

    The baseline row is included by default for ``gamma_linked`` scenarios,
    whose improvement factors are quoted against it.
    """
    ctx = ScenarioContext.from_spec(spec, consts)
    tasks = []
    for m in spec.materials:
        t = None if spec.strategy == "gamma_linked" else spec.thickness_for(m)
        tasks.append((ctx, spec.strategy, m, spec.eps_d, t))
    rows = _run(tasks, jobs)
    if include_baseline is None:
        include_baseline = spec.strategy == "gamma_linked"
    if include_baseline:
        rows.insert(0, baseline_row(ctx))
    return sort_rows(rows, spec)


def run_effectiveness_sweep(
    spec: ScenarioSpec, eps_grid=None, *, jobs: int = 1, consts: FlowConstants = FlowConstants()
) -> list[ResultRow]:
    """Material-specific thickness with the fouling bound, over a grid of target effectiveness."""
    eps_grid = tuple(eps_grid or spec.eps_grid or DEFAULT_EPS_GRID)
    ctx = ScenarioContext.from_spec(spec, consts)
    tasks = [
        (ctx, "material_specific_fouling", m, e, spec.thickness_for(m, "material_specific_fouling"))
        for m in spec.materials
        for e in sorted(eps_grid)
    ]
    return sort_rows(_run(tasks, jobs), spec)


def run_thickness_sweep(
    spec: ScenarioSpec,
    t_grid=None,
    eps_set=None,
    material=None,
    *,
    jobs: int = 1,
    consts: FlowConstants = FlowConstants(),
) -> list[ResultRow]:
    """Fixed-thickness optimizations with the fouling bound over ``t_grid`` x ``eps_set``.

    ``material`` may be a name, a list of names, or ``None`` for every
    material in the scenario. Thicknesses are in metres.
    """
    t_grid = tuple(t_grid or spec.t_grid or DEFAULT_T_GRID)
    eps_set = tuple(eps_set or spec.eps_grid or DEFAULT_EPS_SET)
    if material is None:
        materials = list(spec.materials)
    else:
        names = [material] if isinstance(material, str) else list(material)
        materials = [_resolve(spec, n) for n in names]
    ctx = ScenarioContext.from_spec(spec, consts)
    tasks = [
        (ctx, "uniform_thickness_fouling", m, e, t)
        for m in materials
        for e in sorted(eps_set)
        for t in sorted(t_grid)
    ]
    return sort_rows(_run(tasks, jobs), spec)


def _resolve(spec: ScenarioSpec, name: str) -> MaterialSpec:
    try:
        return lookup_material(name, spec.materials)
    except KeyError:
        return lookup_material(name)


# --- output ------------------------------------------------------------------

_SCI_FIELDS = {"q_nondim", "power_density"}


def _csv_cell(name: str, value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return f"{value:.10e}" if name in _SCI_FIELDS else repr(value)
    return str(value)


def _render(rows, fmt: str) -> str:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(FIELD_NAMES)
        for r in rows:
            writer.writerow([_csv_cell(k, getattr(r, k)) for k in FIELD_NAMES])
        return buf.getvalue()
    if fmt == "json":
        return json.dumps([asdict(r) for r in rows], indent=2) + "\n"
    raise ValueError(f"unknown format {fmt!r}; expected 'csv' or 'json'")


def emit(rows, fmt: str = "csv", destination=None) -> None:
    """Write rows as CSV or JSON to a path, an open text stream, or stdout (``None``)."""
    text = _render(rows, fmt)
    if destination is None:
        sys.stdout.write(text)
    elif hasattr(destination, "write"):
        destination.write(text)
    else:
        try:
            with open(destination, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            raise OSError(f"cannot write results to {destination}: {exc.strerror or exc}") from exc


def verify_rows(rows, spec: ScenarioSpec, consts: FlowConstants = FlowConstants(), *, eps_tol: float = 1e-9) -> list[str]:
    """Re-evaluate every feasible row from its design fields; return a list of discrepancies."""
    ctx = ScenarioContext.from_spec(spec, consts)
    problems = []
    for r in rows:
        if not r.feasible:
            continue
        material = spec.baseline.material if r.strategy == "baseline" else _resolve(spec, r.material)
        design = NondimDesign(r.L_star, r.D_star, r.t_star)
        perf = evaluate(design, spec.fluid, material, ctx.scales, consts)
        q_eq5 = power_density_nondim(design, perf.effectiveness, ctx.scales, consts)
        label = f"{r.strategy}/{r.material}/eps_d={r.eps_d}"
        if abs(perf.effectiveness - r.eps_d) > eps_tol:
            problems.append(f"{label}: effectiveness {perf.effectiveness!r} != target {r.eps_d!r}")
        if abs(perf.q_nondim - r.q_nondim) > 1e-12 * abs(r.q_nondim) or q_eq5 != perf.q_nondim:
            problems.append(f"{label}: power density {perf.q_nondim!r} != reported {r.q_nondim!r}")
        m = axial_conduction_parameter(design, spec.fluid, material, ctx.scales, consts)
        if r.eps_limit is not None and abs(effectiveness_limit(m) - r.eps_limit) > 1e-12:
            problems.append(f"{label}: effectiveness limit mismatch")
    return problems
