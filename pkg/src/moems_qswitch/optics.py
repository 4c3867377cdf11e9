"""Mirror state to cavity reflectivity.

The back mirror of the fiber cavity is the moving membrane; its motion
tilts the reflected beam away from the fiber mode and modulates how much
light is re-injected.  A Gaussian far-field overlap model converts tilt
and lateral offset into an injection efficiency, and a trajectory into a
time-varying back-reflectivity schedule for the laser rate equations.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .actuation import MembraneTrajectory


@dataclass(frozen=True)
class CouplingModel:
    """Mirror-to-fiber coupling parameters.

    tilt_per_displacement maps membrane center deflection to effective
    beam tilt; by default it is calibrated so that full-gap travel equals
    the measured ~9 degree deflection.  `inverted` swaps which membrane
    state is the high-coupling one (rest-is-coupled by default).
    """

    wavelength: float = 1.55e-6
    mode_field_radius: float = 5.2e-6
    magnification: float = 1.0
    base_reflectivity: float = 0.5
    tilt_per_displacement: float = math.radians(9.0) / 2.2e-6
    displacement_direct_loss_scale: float = math.inf
    inverted: bool = False

    def __post_init__(self):
        if not 0.0 < self.base_reflectivity <= 1.0:
            raise ValueError("base_reflectivity must be in (0, 1]")
        if self.wavelength <= 0 or self.mode_field_radius <= 0:
            raise ValueError("wavelength and mode_field_radius must be > 0")
        if self.magnification <= 0:
            raise ValueError("magnification must be > 0")

    @property
    def tilt_scale(self) -> float:
        """1/e tilt half-angle of the overlap model (rad)."""
        return self.wavelength / (math.pi * self.mode_field_radius * self.magnification)


@dataclass(frozen=True)
class LossSchedule:
    """Time series of cavity back-mirror reflectivity in [0, 1]."""

    dt: float
    back_reflectivity: np.ndarray

    def __post_init__(self):
        r = self.back_reflectivity
        if len(r) < 2:
            raise ValueError("schedule needs at least 2 samples")
        if np.any(r < 0.0) or np.any(r > 1.0):
            raise ValueError("reflectivity values must lie in [0, 1]")

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.back_reflectivity)) * self.dt

    @property
    def duration(self) -> float:
        return (len(self.back_reflectivity) - 1) * self.dt

    def at(self, t: np.ndarray | float) -> np.ndarray | float:
        """Linearly interpolated reflectivity, clamped at the ends."""
        return np.interp(t, self.times, self.back_reflectivity)


def injection_efficiency(model: CouplingModel, tilt: float, lateral_offset: float = 0.0) -> float:
    """Fraction of reflected power re-coupled into the fiber mode.

    Gaussian overlap in tilt and lateral offset:
    eta = eta0 * exp(-(tilt/theta_c)^2) * exp(-(offset/d_c)^2).
    """
    if not (math.isfinite(tilt) and math.isfinite(lateral_offset)):
        raise ValueError("tilt and offset must be finite")
    theta_c = model.tilt_scale
    arg = (tilt / theta_c) ** 2
    d_c = model.displacement_direct_loss_scale
    if math.isfinite(d_c):
        arg += (lateral_offset / d_c) ** 2
    return model.base_reflectivity * math.exp(-arg)


def loss_schedule(traj: MembraneTrajectory, model: CouplingModel) -> LossSchedule:
    """Back-reflectivity schedule from a membrane trajectory.

    Rest is the high-coupling state unless the model is inverted, in which
    case the mapping runs from full-gap displacement instead.
    """
    x = traj.displacement
    if model.inverted:
        x = traj.gap - x
    tilt = model.tilt_per_displacement * np.abs(x)
    theta_c = model.tilt_scale
    r = model.base_reflectivity * np.exp(-((tilt / theta_c) ** 2))
    return LossSchedule(dt=traj.dt, back_reflectivity=r)


def no_imaging_variant(model: CouplingModel, base_reflectivity: float) -> CouplingModel:
    """Model for the lens-free configuration: unit magnification and the
    (lower) direct re-injection efficiency."""
    return replace(model, magnification=1.0, base_reflectivity=base_reflectivity)
