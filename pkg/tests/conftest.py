"""Shared fixtures: reusable membrane trajectories and laser runs.

The Q-switch acceptance checks all consume the same drive trajectories and
laser traces, which are the slowest objects to build, so they are produced
once per session here.
"""

import math

import pytest

from moems_qswitch import actuation, laser, materials, modal, optics, presets


@pytest.fixture(scope="session")
def gold():
    return materials.GOLD


@pytest.fixture(scope="session")
def silicon():
    return materials.SILICON_SUBSTRATE


@pytest.fixture(scope="session")
def membrane():
    return presets.MEMBRANE_BRIDGE


def _membrane_trajectory(frequency, periods=12):
    drive = presets.membrane_drive(frequency)
    return actuation.simulate_transient(
        presets.MEMBRANE_BRIDGE, materials.GOLD, presets.RESIDUAL_STRESS,
        drive, q_factor=presets.MEMBRANE_Q, duration=periods / frequency)


@pytest.fixture(scope="session")
def membrane_trajectories():
    """Membrane motion at the four Q-switch drive frequencies (12 periods)."""
    return {f: _membrane_trajectory(f) for f in (20e3, 39e3, 60e3, 120e3)}


@pytest.fixture(scope="session")
def er_runs():
    """Er-arm runs at the four drive frequencies: (trace, wall seconds).

    Timed end to end (membrane transient, loss schedule, rate equations) so
    the per-frequency runtime budget can be checked.
    """
    import time

    out = {}
    for freq in (20e3, 39e3, 60e3, 120e3):
        t0 = time.perf_counter()
        traj = _membrane_trajectory(freq)
        sched = optics.loss_schedule(traj, presets.ER_COUPLING)
        dt = min(0.5 * presets.ER_LASER.round_trip_time, sched.dt)
        trace = laser.simulate_qswitch(presets.ER_LASER, sched, dt=dt)
        out[freq] = (trace, time.perf_counter() - t0)
    return out


@pytest.fixture(scope="session")
def er_traces(er_runs):
    """Er-arm power traces at the four drive frequencies."""
    return {freq: trace for freq, (trace, _) in er_runs.items()}


@pytest.fixture(scope="session")
def dual_run():
    """Er + Yb arms sharing one membrane at 30 kHz."""
    traj = _membrane_trajectory(30e3)
    return laser.simulate_dual(
        presets.ER_LASER, presets.YB_LASER, traj,
        presets.ER_COUPLING, presets.YB_COUPLING)
