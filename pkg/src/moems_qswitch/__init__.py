"""Simulation toolkit for electrostatically actuated micro-mirror
Q-switched fiber lasers: tensioned-bridge modal analysis, pull-in and
contact transients, stress-curled cantilever mirrors, fiber-coupling
modulation, and rate-equation cavity dynamics.
"""

from .actuation import (
    DriveWaveform,
    MembraneTrajectory,
    NoActuationEventError,
    pull_in_voltage,
    simulate_transient,
    trajectory_metrics,
)
from .cantilever import (
    CantileverGeometry,
    NoSnapDownError,
    OverCurledError,
    cantilever_frequency,
    curvature_from_stress,
    profile_and_tip,
    pulldown_voltage,
    stress_for_radius,
)
from .config import ConfigError, Scenario, load_scenario
from .laser import (
    LaserInstabilityError,
    LaserParams,
    NoPulsesError,
    PowerTrace,
    extract_pulses,
    simulate_dual,
    simulate_qswitch,
    steady_state,
)
from .materials import (
    ALUMINUM,
    GOLD,
    BucklingError,
    MaterialProps,
    SubstrateProps,
    buckling_onset,
    stress_at_temperature,
)
from .modal import (
    BridgeGeometry,
    effective_spring_and_mass,
    frequency_sweep,
    fundamental_frequency,
)
from .optics import CouplingModel, LossSchedule, injection_efficiency, loss_schedule

__version__ = "1.0.0"

__all__ = [name for name in dir() if not name.startswith("_")]
