"""Point-model rate equations for the Q-switched fiber cavity.

Two normalized state variables: photon number phi and inversion fraction
n in [0, 1].  The moving mirror enters through the time-varying back
reflectivity R_b(t), which sets the round-trip loss

    Lambda(t) = delta - ln(R_oc * R_b(t))

and the dynamics

    dphi/dt = phi * (G*n - Lambda(t)) / t_r + S * n
    dn/dt   = R_p * (1 - n) - n / tau - B * n * phi

integrated with fixed-step RK4.  The spontaneous seed S is deterministic,
so every run is bit-reproducible.  Output power is defined as
P = phi * (h c / lambda) * (1 - R_oc) / t_r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

from .actuation import MembraneTrajectory
from .optics import CouplingModel, LossSchedule, loss_schedule

PLANCK_C = 6.62607015e-34 * 2.99792458e8  # h*c (J m)
R_B_FLOOR = 1e-12
PHOTON_OVERFLOW = 1e30


class LaserInstabilityError(FloatingPointError):
    """Integration produced a non-finite or runaway state."""

    def __init__(self, t: float, detail: str):
        super().__init__(f"rate-equation instability at t = {t:.6e} s: {detail}")
        self.time = t


class NoPulsesError(ValueError):
    """Power trace contains no excursion that qualifies as a pulse."""


@dataclass(frozen=True)
class LaserParams:
    """Calibrated point-model constants for one amplifier arm.

    G (round_trip_gain_coeff) is the log round-trip gain at full
    inversion; B (saturation_scale) couples photon number back into
    inversion depletion; the 4% Fresnel reflection of the cleaved output
    fiber is the default output coupler.
    """

    upper_state_lifetime: float
    round_trip_time: float
    round_trip_gain_coeff: float
    pump_rate: float
    output_coupler_reflectivity: float = 0.04
    intrinsic_loss: float = 0.1
    spontaneous_seed: float = 1.0
    saturation_scale: float = 1e-7
    label_wavelength: float = 1.55e-6

    def __post_init__(self):
        if self.upper_state_lifetime <= 0 or self.round_trip_time <= 0:
            raise ValueError("lifetimes must be > 0")
        if not 0.0 < self.output_coupler_reflectivity < 1.0:
            raise ValueError("output_coupler_reflectivity must be in (0, 1)")
        if self.round_trip_gain_coeff <= 0:
            raise ValueError("round_trip_gain_coeff must be > 0")
        for name in ("pump_rate", "intrinsic_loss", "spontaneous_seed", "saturation_scale"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")

    @property
    def photon_energy(self) -> float:
        return PLANCK_C / self.label_wavelength

    @property
    def power_per_photon(self) -> float:
        """Output power per intracavity photon (W)."""
        return (
            self.photon_energy
            * (1.0 - self.output_coupler_reflectivity)
            / self.round_trip_time
        )

    def round_trip_loss(self, r_back: float) -> float:
        """Total log loss per round trip at back reflectivity r_back."""
        r = max(r_back, R_B_FLOOR)
        return self.intrinsic_loss - math.log(self.output_coupler_reflectivity * r)


@dataclass(frozen=True)
class PowerTrace:
    """Photon / inversion / output-power time series of one arm."""

    dt: float
    photon_number: np.ndarray
    inversion: np.ndarray
    output_power: np.ndarray

    @property
    def times(self) -> np.ndarray:
        return np.arange(len(self.photon_number)) * self.dt

    @property
    def mean_power(self) -> float:
        return float(np.mean(self.output_power))


def steady_state(params: LaserParams, r_back: float) -> dict:
    """CW fixed point at constant back reflectivity.

    Below threshold the photon number sits at the (tiny) spontaneous
    level; above threshold the gain clamps at the round-trip loss.
    """
    lam = params.round_trip_loss(r_back)
    g = params.round_trip_gain_coeff
    pump_ss = params.pump_rate / (params.pump_rate + 1.0 / params.upper_state_lifetime)
    n_th = lam / g
    if pump_ss <= n_th:
        n = pump_ss
        phi = params.spontaneous_seed * n * params.round_trip_time / max(lam - g * n, 1e-30)
    else:
        n = n_th
        phi = (params.pump_rate * (1.0 - n) - n / params.upper_state_lifetime) / (
            params.saturation_scale * n
        )
    return {
        "inversion": n,
        "photon_number": phi,
        "power_w": phi * params.power_per_photon,
        "threshold_inversion": n_th,
    }


def simulate_qswitch(
    params: LaserParams,
    schedule: LossSchedule,
    duration: float | None = None,
    dt: float | None = None,
    phi0: float = 0.0,
    n0: float = 0.0,
) -> PowerTrace:
    """Integrate the rate equations against a loss schedule.

    dt defaults to t_r/2 and must not exceed it, nor the schedule step.
    The schedule is linearly interpolated and held at its last value if
    the run is longer than the schedule.
    """
    if dt is None:
        dt = 0.5 * params.round_trip_time
    if dt > 0.5 * params.round_trip_time * (1.0 + 1e-12):
        raise ValueError("dt must be <= t_r / 2")
    if dt > schedule.dt * (1.0 + 1e-12):
        raise ValueError("dt must be <= the schedule dt")
    if duration is None:
        duration = schedule.duration

    n_steps = int(round(duration / dt))
    t_r = params.round_trip_time
    g = params.round_trip_gain_coeff
    tau = params.upper_state_lifetime
    r_p = params.pump_rate
    seed = params.spontaneous_seed
    b = params.saturation_scale

    # Loss at step / half-step times, precomputed in one interpolation pass.
    t_half = np.arange(2 * n_steps + 1) * (0.5 * dt)
    lam_half = params.intrinsic_loss - np.log(
        params.output_coupler_reflectivity * np.maximum(schedule.at(t_half), R_B_FLOOR)
    )

    phi_out = np.empty(n_steps + 1)
    n_out = np.empty(n_steps + 1)
    phi, n = float(phi0), float(n0)
    phi_out[0], n_out[0] = phi, n

    def deriv(phi_, n_, lam):
        dphi = phi_ * (g * n_ - lam) / t_r + seed * n_
        dn = r_p * (1.0 - n_) - n_ / tau - b * n_ * phi_
        return dphi, dn

    for i in range(n_steps):
        l0 = lam_half[2 * i]
        lh = lam_half[2 * i + 1]
        l1 = lam_half[2 * i + 2]
        k1p, k1n = deriv(phi, n, l0)
        k2p, k2n = deriv(phi + 0.5 * dt * k1p, n + 0.5 * dt * k1n, lh)
        k3p, k3n = deriv(phi + 0.5 * dt * k2p, n + 0.5 * dt * k2n, lh)
        k4p, k4n = deriv(phi + dt * k3p, n + dt * k3n, l1)
        phi += (dt / 6.0) * (k1p + 2 * k2p + 2 * k3p + k4p)
        n += (dt / 6.0) * (k1n + 2 * k2n + 2 * k3n + k4n)
        if not (math.isfinite(phi) and math.isfinite(n)):
            raise LaserInstabilityError((i + 1) * dt, "non-finite state")
        if phi > PHOTON_OVERFLOW:
            raise LaserInstabilityError((i + 1) * dt, f"photon number {phi:.3e} overflow")
        phi = max(phi, 0.0)
        n = min(max(n, 0.0), 1.0)
        phi_out[i + 1], n_out[i + 1] = phi, n

    return PowerTrace(
        dt=dt,
        photon_number=phi_out,
        inversion=n_out,
        output_power=phi_out * params.power_per_photon,
    )


def extract_pulses(trace: PowerTrace, cw_reference: float | None = None) -> dict:
    """Per-pulse and train statistics of a power trace.

    Pulses are excursions above 10x the baseline (median) power; FWHM is
    measured at half of each pulse's own peak with linear interpolation.
    """
    p = trace.output_power
    if len(p) == 0:
        raise NoPulsesError("empty trace")
    baseline = float(np.median(p))
    threshold = 10.0 * baseline
    above = p > threshold
    if baseline <= 0.0:
        above = p > 0.0
    if not above.any() or above.all():
        raise NoPulsesError("no pulses detected")

    # Contiguous above-threshold regions, one pulse each.
    edges = np.diff(above.astype(int))
    starts = list(np.where(edges == 1)[0] + 1)
    ends = list(np.where(edges == -1)[0] + 1)
    if above[0]:
        starts.insert(0, 0)
    if above[-1]:
        ends.append(len(p))

    pulses = []
    for s, e in zip(starts, ends):
        seg = p[s:e]
        ipk = int(np.argmax(seg))
        peak = float(seg[ipk])
        half = 0.5 * peak
        t_left = _cross_left(p, s + ipk, half, trace.dt)
        t_right = _cross_right(p, s + ipk, half, trace.dt)
        if t_left is None or t_right is None:
            continue  # clipped at the trace edge; not a measurable pulse
        fwhm = t_right - t_left
        energy = float(_trapezoid(p[max(s - 1, 0) : min(e + 1, len(p))], dx=trace.dt))
        pulses.append(
            {
                "peak_power": peak,
                "fwhm": fwhm,
                "energy": energy,
                "peak_time": (s + ipk) * trace.dt,
            }
        )
    if not pulses:
        raise NoPulsesError("no pulses detected")

    # Baseline bumps barely above the detection threshold are noise, not
    # pulses; keep only excursions within two decades of the tallest peak.
    tallest = max(q["peak_power"] for q in pulses)
    pulses = [q for q in pulses if q["peak_power"] >= 0.01 * tallest]

    peaks = np.array([q["peak_time"] for q in pulses])
    mean_power = trace.mean_power
    max_peak = max(q["peak_power"] for q in pulses)
    train = {
        "repetition_rate": float(1.0 / np.mean(np.diff(peaks))) if len(peaks) >= 2 else math.nan,
        "mean_power": mean_power,
        "peak_to_mean_ratio": max_peak / mean_power if mean_power > 0 else math.inf,
        "n_pulses": len(pulses),
    }
    if cw_reference is not None and cw_reference > 0:
        train["peak_to_cw_ratio"] = max_peak / cw_reference
    return {"pulses": pulses, "train": train}


def _cross_left(p, ipk, level, dt):
    for i in range(ipk, 0, -1):
        if p[i - 1] <= level < p[i]:
            frac = (level - p[i - 1]) / (p[i] - p[i - 1])
            return (i - 1 + frac) * dt
    return None


def _cross_right(p, ipk, level, dt):
    for i in range(ipk, len(p) - 1):
        if p[i] > level >= p[i + 1]:
            frac = (p[i] - level) / (p[i] - p[i + 1])
            return (i + frac) * dt
    return None


def simulate_dual(
    params_a: LaserParams,
    params_b: LaserParams,
    shared_trajectory: MembraneTrajectory,
    model_a: CouplingModel,
    model_b: CouplingModel,
    duration: float | None = None,
    dt: float | None = None,
) -> dict:
    """Two independent arms modulated by one shared membrane trajectory.

    Returns both power traces and the per-pulse peak-time offset between
    the arms (paired in order; nan with fewer than one pulse per arm).
    """
    sched_a = loss_schedule(shared_trajectory, model_a)
    sched_b = loss_schedule(shared_trajectory, model_b)
    if dt is None:
        dt = min(0.5 * min(params_a.round_trip_time, params_b.round_trip_time),
                 sched_a.dt, sched_b.dt)
    trace_a = simulate_qswitch(params_a, sched_a, duration, dt)
    trace_b = simulate_qswitch(params_b, sched_b, duration, dt)

    offset = math.nan
    try:
        pa = extract_pulses(settled_half(trace_a))["pulses"]
        pb = extract_pulses(settled_half(trace_b))["pulses"]
        k = min(len(pa), len(pb))
        if k:
            offs = [abs(pa[i]["peak_time"] - pb[i]["peak_time"]) for i in range(k)]
            offset = float(np.mean(offs))
    except NoPulsesError:
        pass
    return {"trace_a": trace_a, "trace_b": trace_b, "peak_time_offset": offset}


def settled_half(trace: PowerTrace) -> PowerTrace:
    """Trailing half of a trace, past the turn-on transient."""
    half = len(trace.output_power) // 2
    return PowerTrace(
        dt=trace.dt,
        photon_number=trace.photon_number[half:],
        inversion=trace.inversion[half:],
        output_power=trace.output_power[half:],
    )
