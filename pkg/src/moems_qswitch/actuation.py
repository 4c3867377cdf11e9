"""Lumped electrostatic dynamics of the bridge mirror.

The bridge is reduced to a single-degree-of-freedom oscillator (effective
spring and modal mass from the fundamental mode) driven by the parallel
plate electrostatic force through the dielectric-corrected gap.  The
transient integrator is fixed-step RK4 with an inelastic contact clamp;
the resulting center-deflection trajectory is what the optics module turns
into cavity loss.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .materials import MaterialProps
from .modal import BridgeGeometry, effective_spring_and_mass

EPS0 = 8.8541878128e-12


class NoActuationEventError(ValueError):
    """Trajectory never moved far enough to measure switching metrics."""


@dataclass(frozen=True)
class DriveWaveform:
    """Voltage drive applied between bridge and electrode.

    kind 'square' pulses between v_off and v_on at `frequency` with the
    given duty cycle and linear ramps of `rise_time`; 'constant' holds
    v_on; 'sampled' linearly interpolates the (t, V) pairs in `samples`.
    """

    kind: str = "square"
    frequency: float = 60e3
    duty: float = 0.5
    v_on: float = 40.0
    v_off: float = 0.0
    rise_time: float = 0.0
    samples: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        if self.kind not in ("square", "constant", "sampled"):
            raise ValueError(f"unknown waveform kind {self.kind!r}")
        if self.kind == "square":
            if self.frequency <= 0:
                raise ValueError("frequency must be > 0")
            if not 0 < self.duty < 1:
                raise ValueError("duty must be in (0, 1)")
        if self.v_on < self.v_off or self.v_off < 0:
            raise ValueError("require v_on >= v_off >= 0")
        if self.kind == "sampled":
            if not self.samples or len(self.samples) < 2:
                raise ValueError("sampled waveform needs >= 2 samples")
            times = [t for t, _ in self.samples]
            if any(b <= a for a, b in zip(times, times[1:])):
                raise ValueError("sampled times must be strictly increasing")

    def voltage(self, t: float) -> float:
        """Instantaneous drive voltage at time t (s)."""
        if self.kind == "constant":
            return self.v_on
        if self.kind == "sampled":
            ts = [p[0] for p in self.samples]
            vs = [p[1] for p in self.samples]
            return float(np.interp(t, ts, vs))
        period = 1.0 / self.frequency
        tau = t % period
        t_on = self.duty * period
        rr = min(self.rise_time, 0.5 * t_on, 0.5 * (period - t_on))
        if tau < t_on:
            if rr > 0 and tau < rr:
                return self.v_off + (self.v_on - self.v_off) * tau / rr
            return self.v_on
        if rr > 0 and tau < t_on + rr:
            return self.v_on - (self.v_on - self.v_off) * (tau - t_on) / rr
        return self.v_off


@dataclass(frozen=True)
class MembraneTrajectory:
    """Time series of the bridge center deflection toward the substrate."""

    dt: float
    gap: float
    displacement: np.ndarray
    velocity: np.ndarray
    contact: np.ndarray
    voltage: np.ndarray

    def __post_init__(self):
        n = len(self.displacement)
        if not (len(self.velocity) == len(self.contact) == len(self.voltage) == n):
            raise ValueError("trajectory series lengths differ")

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.displacement)) * self.dt


def capacitance(geom: BridgeGeometry, x: float) -> float:
    """Parallel-plate capacitance (F) at center deflection x (m).

    The dielectric layer on the electrode adds t_d/eps_r of equivalent air
    gap, so contact (x = gap) leaves a finite dielectric capacitance.
    """
    if not 0.0 <= x <= geom.gap * (1.0 + 1e-12):
        raise ValueError(f"x = {x} outside [0, gap]")
    return EPS0 * geom.area / (geom.effective_gap - min(x, geom.gap))


def electrostatic_force(geom: BridgeGeometry, v: float, x: float) -> float:
    """Attractive electrostatic force (N) at voltage v and deflection x."""
    d = geom.effective_gap - min(x, geom.gap)
    return 0.5 * EPS0 * geom.area * v * v / (d * d)


def pull_in_voltage(geom: BridgeGeometry, k: float) -> dict:
    """Electrostatic pull-in threshold of the lumped bridge.

    Returns {'voltage': V_PI, 'displacement': g_eff/3}; beyond V_PI the
    quasi-static force balance loses its stable root and the bridge snaps
    to the substrate.
    """
    if k <= 0:
        raise ValueError("k must be > 0")
    g = geom.effective_gap
    v_pi = math.sqrt(8.0 * k * g**3 / (27.0 * EPS0 * geom.area))
    return {"voltage": v_pi, "displacement": g / 3.0}


def simulate_transient(
    geom: BridgeGeometry,
    props: MaterialProps,
    sigma: float,
    drive: DriveWaveform,
    q_factor: float = 2.0,
    duration: float | None = None,
    dt: float | None = None,
    basis_size: int = 8,
    x0: float = 0.0,
    v0: float = 0.0,
) -> MembraneTrajectory:
    """Integrate the damped lumped oscillator under the voltage drive.

    Fixed-step RK4 on m x'' + (m w1/Q) x' + k x = F_es(V(t), x).  Contact
    is perfectly inelastic: when x reaches the gap the state is clamped and
    velocity zeroed; the membrane releases once the net force pulls away.
    dt defaults to 1/(200 f1) and must satisfy dt <= 1/(50 f1).
    """
    if q_factor <= 0:
        raise ValueError("q_factor must be > 0")
    lumped = effective_spring_and_mass(geom, props, sigma, basis_size)
    k, m_eff, f1 = lumped["k"], lumped["m_eff"], lumped["frequency_hz"]
    omega1 = 2.0 * math.pi * f1
    if dt is None:
        dt = 1.0 / (200.0 * f1)
    if dt > 1.0 / (50.0 * f1):
        raise ValueError(f"dt = {dt:.3e} s too coarse; need dt <= 1/(50 f1) = {1/(50*f1):.3e} s")
    if duration is None:
        if drive.kind == "square":
            duration = 5.0 / drive.frequency
        else:
            duration = 20.0 / f1
    c = m_eff * omega1 / q_factor
    gap = geom.gap

    def accel(t, x, v):
        f_es = electrostatic_force(geom, drive.voltage(t), x)
        return (f_es - k * x - c * v) / m_eff

    n = int(round(duration / dt)) + 1
    xs = np.empty(n)
    vs = np.empty(n)
    cts = np.zeros(n, dtype=bool)
    vus = np.empty(n)
    x, v = float(x0), float(v0)
    in_contact = x >= gap
    for i in range(n):
        t = i * dt
        vu = drive.voltage(t)
        xs[i], vs[i], cts[i], vus[i] = x, v, in_contact, vu
        if in_contact:
            # Hold until the spring overcomes the electrostatic attraction.
            f_net = electrostatic_force(geom, vu, gap) - k * gap
            if f_net < 0.0:
                x, v = _rk4_step(accel, t, gap, 0.0, dt, gap)
                if x >= gap:
                    x, v = gap, 0.0
                else:
                    in_contact = False
            continue
        x, v = _rk4_step(accel, t, x, v, dt, gap)
        if not (math.isfinite(x) and math.isfinite(v)):
            raise FloatingPointError(f"non-finite state at t = {t:.6e} s")
        if x >= gap:
            x, v = gap, 0.0
            in_contact = True
    return MembraneTrajectory(
        dt=dt, gap=gap, displacement=xs, velocity=vs, contact=cts, voltage=vus
    )


def _rk4_step(accel, t, x, v, dt, gap):
    def f(ti, state):
        xi, vi = state
        xi = min(xi, gap)
        return np.array([vi, accel(ti, xi, vi)])

    y = np.array([x, v])
    k1 = f(t, y)
    k2 = f(t + 0.5 * dt, y + 0.5 * dt * k1)
    k3 = f(t + 0.5 * dt, y + 0.5 * dt * k2)
    k4 = f(t + dt, y + dt * k3)
    y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return float(y[0]), float(y[1])


def trajectory_metrics(traj: MembraneTrajectory) -> dict:
    """Switching metrics of one or more actuation cycles.

    Times are measured between 10% and 90% of the gap travel.  Raises
    NoActuationEventError when the membrane never exceeds 10% of the gap.
    """
    x = traj.displacement
    gap = traj.gap
    lo, hi = 0.1 * gap, 0.9 * gap
    if x.max() < lo:
        raise NoActuationEventError("no actuation event: displacement stayed below 10% of gap")

    down_times, up_times = [], []
    t_lo = None
    rising = True
    for i in range(1, len(x)):
        if rising:
            if x[i - 1] < lo <= x[i]:
                t_lo = _cross_time(traj.dt, i, x, lo)
            if t_lo is not None and x[i - 1] < hi <= x[i]:
                down_times.append(_cross_time(traj.dt, i, x, hi) - t_lo)
                t_lo = None
                rising = False
        else:
            if x[i - 1] > hi >= x[i]:
                t_lo = _cross_time(traj.dt, i, x, hi)
            if t_lo is not None and x[i - 1] > lo >= x[i]:
                up_times.append(_cross_time(traj.dt, i, x, lo) - t_lo)
                t_lo = None
                rising = True
    return {
        "switch_down_time": float(np.mean(down_times)) if down_times else math.nan,
        "release_time": float(np.mean(up_times)) if up_times else math.nan,
        "contact_duty": float(np.mean(traj.contact)),
    }


def _cross_time(dt, i, x, level):
    frac = (level - x[i - 1]) / (x[i] - x[i - 1])
    return (i - 1 + frac) * dt
