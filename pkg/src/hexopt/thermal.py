"""Closed-form thermal model of a balanced counterflow parallel flat plate
heat exchanger with axial wall conduction.

All geometry is expressed relative to a reference plate thickness, so a
design point is the triple ``(L*, D*, t*)``. The effectiveness follows
Kroeger's solution for a balanced counterflow exchanger; NTU and the axial
conduction parameter ``M`` are evaluated for fully developed laminar flow
between parallel plates.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "DomainError",
    "FluidProperties",
    "MaterialSpec",
    "ReferenceScales",
    "FlowConstants",
    "NondimDesign",
    "DesignPerformance",
    "scaling_group_pi",
    "ntu",
    "axial_conduction_parameter",
    "effectiveness_kroeger",
    "effectiveness_limit",
    "power_density_nondim",
    "evaluate",
]

# tanh(x) == 1.0 in double precision well below this
_TANH_SATURATION = 350.0


class DomainError(ValueError):
    """Raised when an input lies outside the domain of the model."""


def _require_positive(**values: float) -> None:
    for name, value in values.items():
        if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
            raise DomainError(f"{name} must be a finite positive number, got {value!r}")


@dataclass(frozen=True)
class FluidProperties:
    """Constant thermophysical properties of the working fluid (SI units)."""

    density: float
    specific_heat: float
    dynamic_viscosity: float
    thermal_conductivity: float

    def __post_init__(self) -> None:
        _require_positive(
            density=self.density,
            specific_heat=self.specific_heat,
            dynamic_viscosity=self.dynamic_viscosity,
            thermal_conductivity=self.thermal_conductivity,
        )

    @property
    def diffusivity(self) -> float:
        """Thermal diffusivity ``k / (rho c_p)`` in m^2/s."""
        return self.thermal_conductivity / (self.density * self.specific_heat)


@dataclass(frozen=True)
class MaterialSpec:
    """Plate material: wall conductivity and optional minimum printable thickness.

    ``min_thickness`` is in metres; ``None`` means no manufacturing limit.
    """

    name: str
    wall_conductivity: float
    min_thickness: float | None = None
    note: str = ""

    def __post_init__(self) -> None:
        _require_positive(wall_conductivity=self.wall_conductivity)
        if self.min_thickness is not None:
            _require_positive(min_thickness=self.min_thickness)


def scaling_group_pi(fluid: FluidProperties, t_ref: float, dp_ref: float) -> float:
    """Dimensionless group ``dP_ref t_ref^2 / (alpha mu)``.

    Parameters
    ----------
    fluid : FluidProperties
    t_ref : float
        Reference plate thickness [m].
    dp_ref : float
        Reference pressure drop [Pa].
    """
    _require_positive(t_ref=t_ref, dp_ref=dp_ref)
    return dp_ref * t_ref**2 / (fluid.diffusivity * fluid.dynamic_viscosity)


@dataclass(frozen=True)
class ReferenceScales:
    """Reference thickness and pressure drop with the derived groups ``psi`` and ``Pi``."""

    t_ref: float
    dp_ref: float
    psi: float
    pi: float

    def __post_init__(self) -> None:
        _require_positive(t_ref=self.t_ref, dp_ref=self.dp_ref, psi=self.psi, pi=self.pi)

    @classmethod
    def from_fluid(
        cls, fluid: FluidProperties, t_ref: float, dp_ref: float, dp: float | None = None
    ) -> "ReferenceScales":
        """Build scales for ``fluid``; ``dp`` defaults to ``dp_ref`` (``psi = 1``)."""
        dp = dp_ref if dp is None else dp
        _require_positive(dp=dp)
        return cls(t_ref=t_ref, dp_ref=dp_ref, psi=dp / dp_ref, pi=scaling_group_pi(fluid, t_ref, dp_ref))

    @property
    def psi_pi(self) -> float:
        return self.psi * self.pi


@dataclass(frozen=True)
class FlowConstants:
    """Fully developed laminar parallel-plate constants."""

    fRe: float = 24.0
    Nu: float = 8.235

    def __post_init__(self) -> None:
        _require_positive(fRe=self.fRe, Nu=self.Nu)


@dataclass(frozen=True)
class NondimDesign:
    """Design point scaled by the reference thickness."""

    L_star: float
    D_star: float
    t_star: float

    def __post_init__(self) -> None:
        _require_positive(L_star=self.L_star, D_star=self.D_star)
        # t* = 0 is the degenerate no-wall limit; allowed so M -> 0 can be probed
        if not (math.isfinite(self.t_star) and self.t_star >= 0):
            raise DomainError(f"t_star must be finite and non-negative, got {self.t_star!r}")


@dataclass(frozen=True)
class DesignPerformance:
    ntu: float
    m_axial: float
    effectiveness: float
    q_nondim: float


def ntu(
    design: NondimDesign,
    fluid: FluidProperties,
    material: MaterialSpec,
    scales: ReferenceScales,
    consts: FlowConstants = FlowConstants(),
) -> float:
    """Number of transfer units, including lateral wall resistance."""
    quarter_nu = consts.Nu / 4.0
    wall = 1.0 + quarter_nu * (fluid.thermal_conductivity / material.wall_conductivity) * (
        design.t_star / design.D_star
    )
    return consts.fRe * quarter_nu / wall / scales.psi_pi * design.L_star**2 / design.D_star**4


def axial_conduction_parameter(
    design: NondimDesign,
    fluid: FluidProperties,
    material: MaterialSpec,
    scales: ReferenceScales,
    consts: FlowConstants = FlowConstants(),
) -> float:
    """Axial conduction parameter ``M``; independent of the channel length."""
    ratio = material.wall_conductivity / fluid.thermal_conductivity
    return consts.fRe * ratio / scales.psi_pi * design.t_star / design.D_star**3


def effectiveness_kroeger(ntu: float, m_axial: float) -> float:
    """Balanced counterflow effectiveness with axial wall conduction.

    Reduces to ``NTU / (1 + NTU)`` when ``m_axial`` is zero.
    """
    if not (ntu > 0 and math.isfinite(ntu)):
        raise DomainError(f"NTU must be finite and positive, got {ntu!r}")
    if not (m_axial >= 0 and math.isfinite(m_axial)):
        raise DomainError(f"M must be finite and non-negative, got {m_axial!r}")
    if m_axial == 0.0:
        phi = 0.0
    else:
        mn = m_axial * ntu
        root = math.sqrt(mn / (1.0 + mn))
        arg = ntu / root
        phi = root * (1.0 if arg > _TANH_SATURATION else math.tanh(arg))
    return 1.0 - 1.0 / (1.0 + ntu * (1.0 + m_axial * phi) / (1.0 + m_axial * ntu))


def effectiveness_limit(m_axial: float) -> float:
    """Effectiveness reached as NTU -> infinity: ``(M + 1) / (2M + 1)``."""
    if not (m_axial >= 0 and not math.isnan(m_axial)):
        raise DomainError(f"M must be non-negative, got {m_axial!r}")
    if math.isinf(m_axial):
        return 0.5
    return (m_axial + 1.0) / (2.0 * m_axial + 1.0)


def power_density_nondim(
    design: NondimDesign,
    eps: float,
    scales: ReferenceScales,
    consts: FlowConstants = FlowConstants(),
) -> float:
    """Nondimensional power density ``D mu / (c_p dT rho dP_ref)``."""
    if not (0.0 <= eps < 1.0):
        raise DomainError(f"effectiveness must lie in [0, 1), got {eps!r}")
    return (
        scales.psi
        / consts.fRe
        / (1.0 + design.t_star / design.D_star)
        * eps
        * (design.D_star / design.L_star) ** 2
    )


def evaluate(
    design: NondimDesign,
    fluid: FluidProperties,
    material: MaterialSpec,
    scales: ReferenceScales,
    consts: FlowConstants = FlowConstants(),
) -> DesignPerformance:
    """Evaluate NTU, M, effectiveness and power density for one design."""
    n = ntu(design, fluid, material, scales, consts)
    m = axial_conduction_parameter(design, fluid, material, scales, consts)
    eps = effectiveness_kroeger(n, m)
    return DesignPerformance(
        ntu=n,
        m_axial=m,
        effectiveness=eps,
        q_nondim=power_density_nondim(design, eps, scales, consts),
    )
