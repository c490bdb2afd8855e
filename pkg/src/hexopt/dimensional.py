"""Physical realization of nondimensional designs at fixed total thermal power.

The total mass flow per side, ``n W m'_single``, is held at its baseline
value. The width is fixed by the baseline width-to-spacing ratio and the
channel count absorbs the remainder (rounded to an integer).
"""

from __future__ import annotations

from dataclasses import dataclass

from .thermal import (
    DomainError,
    FlowConstants,
    FluidProperties,
    NondimDesign,
    ReferenceScales,
    _require_positive,
    power_density_nondim,
)

__all__ = [
    "BaselineOperating",
    "DimensionalDesign",
    "mass_flow_per_width",
    "dimensionalize",
    "nondimensionalize",
    "power_density_direct",
]


def mass_flow_per_width(
    D: float, L: float, dp: float, fluid: FluidProperties, consts: FlowConstants = FlowConstants()
) -> float:
    """Mass flow per unit width of one channel, ``2 rho D^3 dP / (fRe mu L)`` [kg/(s m)]."""
    _require_positive(D=D, L=L, dp=dp)
    return 2.0 * fluid.density / (consts.fRe * fluid.dynamic_viscosity) * D**3 * dp / L


@dataclass(frozen=True)
class BaselineOperating:
    """Operating point that every dimensional design must match.

    Attributes
    ----------
    delta_T : float
        Hot-to-cold inlet temperature difference [K].
    total_flow_product : float
        ``n W m'_single`` of the baseline, i.e. the mass flow per side [kg/s].
    width_to_spacing : float
        Baseline ``W / D``.
    t_ref, dp_ref : float
        Reference thickness [m] and pressure drop [Pa].
    """

    delta_T: float
    total_flow_product: float
    width_to_spacing: float
    t_ref: float
    dp_ref: float

    def __post_init__(self) -> None:
        _require_positive(
            delta_T=self.delta_T,
            total_flow_product=self.total_flow_product,
            width_to_spacing=self.width_to_spacing,
            t_ref=self.t_ref,
            dp_ref=self.dp_ref,
        )

    @classmethod
    def from_geometry(
        cls,
        fluid: FluidProperties,
        *,
        L: float,
        D: float,
        W: float,
        n: int,
        delta_T: float,
        t_ref: float,
        dp_ref: float,
        dp: float | None = None,
        consts: FlowConstants = FlowConstants(),
    ) -> "BaselineOperating":
        dp = dp_ref if dp is None else dp
        flow = n * W * mass_flow_per_width(D, L, dp, fluid, consts)
        return cls(delta_T=delta_T, total_flow_product=flow, width_to_spacing=W / D, t_ref=t_ref, dp_ref=dp_ref)


@dataclass(frozen=True)
class DimensionalDesign:
    L: float
    D: float
    t: float
    W: float
    n: int
    mdot_per_width: float
    power_density: float
    # (n W m') / baseline - 1, left uncompensated
    flow_mismatch: float = 0.0


def power_density_direct(
    eps: float, L: float, D: float, t: float, W: float, n: int, mdot_per_width: float, fluid: FluidProperties, delta_T: float
) -> float:
    """Heat rate over ``H L W`` with ``H = 2 n D (1 + t/D)``, from dimensional quantities."""
    mdot = n * W * mdot_per_width
    return eps * mdot * fluid.specific_heat * delta_T / (2.0 * n * D * (1.0 + t / D) * L * W)


def dimensionalize(
    design: NondimDesign,
    eps: float,
    baseline: BaselineOperating,
    fluid: FluidProperties,
    consts: FlowConstants = FlowConstants(),
    psi: float = 1.0,
) -> DimensionalDesign:
    """Scale a nondimensional design up to a physical one delivering the baseline power."""
    t_ref = baseline.t_ref
    L, D, t = design.L_star * t_ref, design.D_star * t_ref, design.t_star * t_ref
    W = baseline.width_to_spacing * D
    dp = psi * baseline.dp_ref
    mdot = mass_flow_per_width(D, L, dp, fluid, consts)
    n = max(1, round(baseline.total_flow_product / (W * mdot)))
    scales = ReferenceScales.from_fluid(fluid, t_ref, baseline.dp_ref, dp)
    q = power_density_nondim(design, eps, scales, consts)
    density = q * fluid.specific_heat * baseline.delta_T * fluid.density * baseline.dp_ref / fluid.dynamic_viscosity
    return DimensionalDesign(
        L=L,
        D=D,
        t=t,
        W=W,
        n=n,
        mdot_per_width=mdot,
        power_density=density,
        flow_mismatch=n * W * mdot / baseline.total_flow_product - 1.0,
    )


def nondimensionalize(dim: DimensionalDesign, t_ref: float) -> NondimDesign:
    if not t_ref > 0:
        raise DomainError(f"t_ref must be positive, got {t_ref!r}")
    return NondimDesign(dim.L / t_ref, dim.D / t_ref, dim.t / t_ref)
