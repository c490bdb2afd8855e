"""Power-density maximization at fixed effectiveness and pressure drop.

The effectiveness equality is eliminated by solving for the channel length
that meets it (effectiveness is monotone in NTU, and NTU is monotone in L*).
What remains is a one-dimensional maximization over the plate spacing,
bounded below by the spacing at which axial conduction caps the attainable
effectiveness at the target.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .thermal import (
    DesignPerformance,
    DomainError,
    FlowConstants,
    FluidProperties,
    MaterialSpec,
    NondimDesign,
    ReferenceScales,
    axial_conduction_parameter,
    effectiveness_kroeger,
    effectiveness_limit,
    evaluate,
    power_density_nondim,
)

__all__ = [
    "Infeasible",
    "GammaLinkedProblem",
    "ThicknessConstrainedProblem",
    "OptimizationResult",
    "required_ntu",
    "solve_length_for_effectiveness",
    "feasibility_threshold",
    "maximize_gamma_linked",
    "maximize_thickness_constrained",
    "maximize",
    "grid_oracle",
    "improvement_factor",
]

D_STAR_UPPER = 1e6
THRESHOLD_MARGIN = 1.0001
ACTIVE_SET_RTOL = 1e-6
_NTU_CEILING = 1e18
_SCAN_POINTS = 64


class Infeasible(ValueError):
    """No channel length reaches the target effectiveness.

    ``eps_limit`` is the asymptotic effectiveness that blocked the design.
    """

    def __init__(self, eps_limit: float, message: str | None = None):
        self.eps_limit = eps_limit
        super().__init__(message or f"target effectiveness unreachable; asymptotic limit is {eps_limit:.6g}")


def _check_target(eps_d: float) -> None:
    if not (0.5 < eps_d < 1.0):
        raise DomainError(f"design effectiveness must lie in (0.5, 1), got {eps_d!r}")


@dataclass(frozen=True)
class GammaLinkedProblem:
    """Maximize power density with the wall thickness tied to the spacing, ``t* = gamma D*``."""

    eps_d: float
    gamma: float
    material: MaterialSpec
    fluid: FluidProperties
    scales: ReferenceScales
    consts: FlowConstants = FlowConstants()

    def __post_init__(self) -> None:
        _check_target(self.eps_d)
        if not (self.gamma > 0 and math.isfinite(self.gamma)):
            raise DomainError(f"gamma must be positive, got {self.gamma!r}")

    def thickness(self, D_star: float) -> float:
        return self.gamma * D_star


@dataclass(frozen=True)
class ThicknessConstrainedProblem:
    """Maximize power density at fixed wall thickness and a minimum spacing."""

    eps_d: float
    t_star: float
    material: MaterialSpec
    fluid: FluidProperties
    scales: ReferenceScales
    D_min_star: float = 0.0
    consts: FlowConstants = FlowConstants()

    def __post_init__(self) -> None:
        _check_target(self.eps_d)
        if not (self.t_star > 0 and math.isfinite(self.t_star)):
            raise DomainError(f"t_star must be positive, got {self.t_star!r}")
        if not (self.D_min_star >= 0 and math.isfinite(self.D_min_star)):
            raise DomainError(f"D_min_star must be non-negative, got {self.D_min_star!r}")

    def thickness(self, D_star: float) -> float:
        return self.t_star


Problem = GammaLinkedProblem | ThicknessConstrainedProblem


@dataclass(frozen=True)
class OptimizationResult:
    design: NondimDesign
    performance: DesignPerformance
    fouling_active: bool = False
    improvement_factor: float | None = None

    def with_baseline(self, q_baseline: float) -> "OptimizationResult":
        return replace(self, improvement_factor=improvement_factor(self.performance.q_nondim, q_baseline))


def improvement_factor(q: float, q_baseline: float) -> float:
    """Ratio of optimized to baseline nondimensional power density."""
    if not q_baseline > 0:
        raise DomainError(f"baseline power density must be positive, got {q_baseline!r}")
    return q / q_baseline


def required_ntu(m_axial: float, eps_d: float) -> float:
    """NTU at which the Kroeger effectiveness equals ``eps_d`` for fixed ``M``.

    Raises
    ------
    Infeasible
        If ``eps_d`` is not strictly below the asymptotic limit for ``m_axial``.
    """
    if not (0.0 < eps_d < 1.0):
        raise DomainError(f"target effectiveness must lie in (0, 1), got {eps_d!r}")
    limit = effectiveness_limit(m_axial)
    if eps_d >= limit:
        raise Infeasible(limit)
    # axial conduction only degrades effectiveness, so the classic NTU is a lower bound
    lo = eps_d / (1.0 - eps_d)
    if m_axial == 0.0:
        return lo
    f_lo = effectiveness_kroeger(lo, m_axial) - eps_d
    if f_lo >= 0.0:
        return lo
    hi = 2.0 * lo
    while effectiveness_kroeger(hi, m_axial) - eps_d < 0.0:
        hi *= 4.0
        if hi > _NTU_CEILING:
            raise Infeasible(limit, f"target {eps_d} within round-off of the asymptotic limit {limit:.12g}")

    def residual(log_n: float) -> float:
        return effectiveness_kroeger(math.exp(log_n), m_axial) - eps_d

    log_n = brentq(residual, math.log(lo), math.log(hi), xtol=1e-15, rtol=1e-15, maxiter=500)
    return math.exp(log_n)


def _length_for_ntu(n: float, D_star: float, t_star: float, material, fluid, scales, consts) -> float:
    quarter_nu = consts.Nu / 4.0
    wall = 1.0 + quarter_nu * (fluid.thermal_conductivity / material.wall_conductivity) * (t_star / D_star)
    return D_star**2 * math.sqrt(n * scales.psi_pi * wall / (consts.fRe * quarter_nu))


def solve_length_for_effectiveness(
    D_star: float,
    t_star: float,
    eps_d: float,
    material: MaterialSpec,
    fluid: FluidProperties,
    scales: ReferenceScales,
    consts: FlowConstants = FlowConstants(),
) -> float:
    """Channel length ``L*`` at which the design reaches ``eps_d``.

    ``M`` does not depend on the length, so the target is first converted to
    a required NTU by a bracketed root solve on ``log NTU`` and then mapped
    back through the closed-form NTU(L*) relation.
    """
    probe = NondimDesign(1.0, D_star, t_star)
    m = axial_conduction_parameter(probe, fluid, material, scales, consts)
    n = required_ntu(m, eps_d)
    return _length_for_ntu(n, D_star, t_star, material, fluid, scales, consts)


def feasibility_threshold(
    t_star: float | None,
    eps_d: float,
    material: MaterialSpec,
    fluid: FluidProperties,
    scales: ReferenceScales,
    consts: FlowConstants = FlowConstants(),
    *,
    gamma: float | None = None,
) -> float:
    """Plate spacing below which ``eps_d`` is unreachable at any length.

    With a fixed thickness ``M ~ t*/D*^3``; with ``gamma`` given instead,
    ``t* = gamma D*`` and ``M ~ gamma/D*^2``.
    """
    _check_target(eps_d)
    inv_m_crit = (2.0 * eps_d - 1.0) / (1.0 - eps_d)  # 1/M where the limit equals eps_d
    c = consts.fRe * (material.wall_conductivity / fluid.thermal_conductivity) / scales.psi_pi
    if gamma is not None:
        return math.sqrt(c * gamma * inv_m_crit)
    if t_star is None:
        raise DomainError("either t_star or gamma is required")
    return (c * t_star * inv_m_crit) ** (1.0 / 3.0)


def _threshold(problem: Problem) -> float:
    if isinstance(problem, GammaLinkedProblem):
        return feasibility_threshold(
            None, problem.eps_d, problem.material, problem.fluid, problem.scales, problem.consts, gamma=problem.gamma
        )
    return feasibility_threshold(
        problem.t_star, problem.eps_d, problem.material, problem.fluid, problem.scales, problem.consts
    )


def _reduced_objective(problem: Problem, D_star: float) -> float:
    """Power density along the effectiveness constraint; zero where infeasible."""
    t = problem.thickness(D_star)
    try:
        L = solve_length_for_effectiveness(
            D_star, t, problem.eps_d, problem.material, problem.fluid, problem.scales, problem.consts
        )
    except Infeasible:
        return 0.0
    return power_density_nondim(NondimDesign(L, D_star, t), problem.eps_d, problem.scales, problem.consts)


def _result_at(problem: Problem, D_star: float) -> OptimizationResult:
    t = problem.thickness(D_star)
    L = solve_length_for_effectiveness(
        D_star, t, problem.eps_d, problem.material, problem.fluid, problem.scales, problem.consts
    )
    design = NondimDesign(L, D_star, t)
    perf = evaluate(design, problem.fluid, problem.material, problem.scales, problem.consts)
    d_min = getattr(problem, "D_min_star", 0.0)
    active = d_min > 0 and (D_star - d_min) <= ACTIVE_SET_RTOL * d_min
    return OptimizationResult(design=design, performance=perf, fouling_active=active)


def _search_interval(problem: Problem) -> tuple[float, float]:
    lo = _threshold(problem) * THRESHOLD_MARGIN
    if not lo < D_STAR_UPPER:
        raise Infeasible(
            effectiveness_limit(_m_at(problem, D_STAR_UPPER)),
            f"no feasible spacing below D* = {D_STAR_UPPER:g}",
        )
    return lo, D_STAR_UPPER


def _m_at(problem: Problem, D_star: float) -> float:
    design = NondimDesign(1.0, D_star, problem.thickness(D_star))
    return axial_conduction_parameter(design, problem.fluid, problem.material, problem.scales, problem.consts)


def _count_peaks(q: np.ndarray) -> int:
    rise = np.diff(q)
    tol = 1e-12 * q.max()
    signs = np.sign(np.where(np.abs(rise) <= tol, 0.0, rise))
    signs = signs[signs != 0]
    return int(np.sum((signs[:-1] > 0) & (signs[1:] < 0))) if signs.size > 1 else 0


def _unconstrained_spacing(problem: Problem) -> float | None:
    """Spacing of the interior power-density maximum, or ``None`` if the scan is not unimodal."""
    lo, hi = _search_interval(problem)
    x = np.linspace(math.log(lo), math.log(hi), _SCAN_POINTS)
    q = np.array([_reduced_objective(problem, math.exp(v)) for v in x])
    if _count_peaks(q) > 1:
        return None
    i = int(np.argmax(q))
    a, b = x[max(i - 1, 0)], x[min(i + 1, x.size - 1)]
    res = minimize_scalar(
        lambda v: -_reduced_objective(problem, math.exp(v)),
        bounds=(a, b),
        method="bounded",
        options={"xatol": 1e-11, "maxiter": 500},
    )
    best = res.x if -res.fun >= q[i] else x[i]
    return math.exp(best)


def maximize_gamma_linked(problem: GammaLinkedProblem) -> OptimizationResult:
    """Optimal ``(L*, D*, gamma D*)`` at the target effectiveness."""
    D = _unconstrained_spacing(problem)
    if D is None:
        return grid_oracle(problem)
    return _result_at(problem, D)


def maximize_thickness_constrained(problem: ThicknessConstrainedProblem) -> OptimizationResult:
    """Optimal design at fixed ``t*`` with ``D* >= D_min_star``.

    The unconstrained optimum is found first; if it violates the fouling
    bound the spacing is clamped to ``D_min_star``, which is optimal when the
    reduced objective is unimodal.
    """
    if problem.D_min_star >= D_STAR_UPPER:
        raise DomainError("D_min_star exceeds the spacing search bound")
    D = _unconstrained_spacing(problem)
    if D is None:
        return grid_oracle(problem)
    # the unconstrained optimum lies above the feasibility threshold, so a clamped D_min is feasible too
    D = max(D, problem.D_min_star)
    return _result_at(problem, D)


def maximize(problem: Problem) -> OptimizationResult:
    if isinstance(problem, GammaLinkedProblem):
        return maximize_gamma_linked(problem)
    return maximize_thickness_constrained(problem)


def grid_oracle(problem: Problem, grid_resolution: int = 256, refinements: int = 3) -> OptimizationResult:
    """Brute-force reference optimum on a refined logarithmic spacing grid.

    Slow; intended for verifying :func:`maximize` rather than production use.
    Ties within 1e-12 relative resolve to the smaller spacing.
    """
    if grid_resolution < 64:
        raise DomainError("grid_resolution must be at least 64")
    lo, _ = _search_interval(problem)  # same feasibility bound as the fast path
    threshold = _threshold(problem)
    hi = threshold * 1e4
    d_min = getattr(problem, "D_min_star", 0.0)
    if d_min > lo:
        lo = d_min
        hi = max(hi, 10.0 * lo)

    grid = np.geomspace(lo, hi, grid_resolution)
    for round_ in range(refinements + 1):
        q = np.array([_reduced_objective(problem, d) for d in grid])
        if not np.any(q > 0):
            raise Infeasible(effectiveness_limit(_m_at(problem, hi)))
        i = int(np.flatnonzero(q >= q.max() * (1.0 - 1e-12))[0])
        if round_ == refinements:
            break
        a, b = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
        grid = np.geomspace(a, b, grid_resolution)
    return _result_at(problem, float(grid[i]))
