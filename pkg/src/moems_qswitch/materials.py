"""Thin-film material constants and the residual-stress / temperature model.

Stress convention: tensile positive, uniaxial.  The film stress at
temperature T follows the affine law

    sigma(T) = sigma0 - E * (alpha_film - alpha_substrate) * (T - T_ref)

so cooling a film whose expansion coefficient exceeds the substrate's
increases the tensile stress (the usual metal-on-silicon behaviour).
"""

from __future__ import annotations

import math
from dataclasses import dataclass


class BucklingError(ValueError):
    """Raised when a bridge is past its compressive buckling limit."""


@dataclass(frozen=True)
class MaterialProps:
    """Elastic and thermal constants of a structural film.

    Attributes:
        name: Label for reports.
        youngs_modulus: Young's modulus E (Pa).
        cte: Linear thermal expansion coefficient (1/K).
        poisson: Poisson ratio (-).
        density: Mass density (kg/m^3).
        builtin_stress: Residual in-plane stress at ref_temperature (Pa,
            tensile positive).
        ref_temperature: Temperature at which builtin_stress applies (K).
    """

    name: str
    youngs_modulus: float
    cte: float
    poisson: float
    density: float
    builtin_stress: float = 0.0
    ref_temperature: float = 293.0

    def __post_init__(self):
        if self.youngs_modulus <= 0:
            raise ValueError("youngs_modulus must be > 0")
        if self.density <= 0:
            raise ValueError("density must be > 0")
        if not 0 < self.poisson < 0.5:
            raise ValueError("poisson must be in (0, 0.5)")
        if not math.isfinite(self.builtin_stress):
            raise ValueError("builtin_stress must be finite")
        if self.ref_temperature <= 0:
            raise ValueError("ref_temperature must be > 0")

    @property
    def biaxial_modulus(self) -> float:
        """E / (1 - nu), used for plate-like bending of the film."""
        return self.youngs_modulus / (1.0 - self.poisson)


@dataclass(frozen=True)
class SubstrateProps:
    """Substrate thermal properties (only the CTE matters here)."""

    name: str
    cte: float

    def __post_init__(self):
        if not math.isfinite(self.cte):
            raise ValueError("cte must be finite")


# Presets: electroplated gold and evaporated aluminum films on silicon.
GOLD = MaterialProps(
    name="gold",
    youngs_modulus=78e9,
    cte=14.2e-6,
    poisson=0.42,
    density=19300.0,
    builtin_stress=30e6,
    ref_temperature=293.0,
)

ALUMINUM = MaterialProps(
    name="aluminum",
    youngs_modulus=70e9,
    cte=23.5e-6,
    poisson=0.345,
    density=2700.0,
    builtin_stress=30e6,
    ref_temperature=293.0,
)

SILICON_SUBSTRATE = SubstrateProps(name="silicon", cte=2.6e-6)

MATERIAL_PRESETS = {"gold": GOLD, "aluminum": ALUMINUM}
SUBSTRATE_PRESETS = {"silicon": SILICON_SUBSTRATE}


def stress_at_temperature(
    props: MaterialProps, substrate: SubstrateProps, temperature: float
) -> float:
    """Film stress (Pa, tensile positive) at the given temperature (K)."""
    if temperature <= 0:
        raise ValueError("temperature must be > 0 K")
    d_alpha = props.cte - substrate.cte
    d_t = temperature - props.ref_temperature
    return props.builtin_stress - props.youngs_modulus * d_alpha * d_t


def euler_critical_stress(youngs_modulus: float, thickness: float, length: float) -> float:
    """Clamped-clamped Euler buckling stress (Pa, compressive, hence < 0)."""
    return -4.0 * math.pi**2 * youngs_modulus * thickness**2 / (12.0 * length**2)


def buckling_onset(
    props: MaterialProps, substrate: SubstrateProps, length: float, thickness: float
) -> dict:
    """Critical compressive stress and the temperature at which it is reached.

    Returns a dict with 'critical_stress' (Pa) and 'onset_temperature' (K).
    When the film CTE does not exceed the substrate's, heating never turns
    the stress compressive and onset_temperature is +inf.
    """
    if length <= 0 or thickness <= 0:
        raise ValueError("length and thickness must be > 0")
    sigma_cr = euler_critical_stress(props.youngs_modulus, thickness, length)
    d_alpha = props.cte - substrate.cte
    slope = -props.youngs_modulus * d_alpha  # d sigma / d T
    if slope >= 0:
        return {"critical_stress": sigma_cr, "onset_temperature": math.inf}
    onset = props.ref_temperature + (sigma_cr - props.builtin_stress) / slope
    return {"critical_stress": sigma_cr, "onset_temperature": onset}
