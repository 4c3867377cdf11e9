"""Electrostatic pull-in and membrane transient dynamics."""

import math

import numpy as np
import pytest

from moems_qswitch import actuation, materials, modal, presets

EPS0 = 8.8541878128e-12


def brute_force_pull_in(geom, k):
    """Independent oracle: tallest equilibrium-sustaining voltage.

    At displacement x the balance k x = eps0 A V^2 / (2 (g_eff - x)^2)
    gives V(x); pull-in is the maximum of V over x on a fine grid.
    """
    g = geom.effective_gap
    area = geom.length * geom.width
    x = np.linspace(1e-9, g * 0.999, 20000)
    v = np.sqrt(2.0 * k * x * (g - x) ** 2 / (EPS0 * area))
    return float(v.max()), float(x[v.argmax()])


@pytest.mark.parametrize("length,width,k", [
    (140e-6, 80e-6, 49.0),
    (140e-6, 80e-6, 10.0),
    (140e-6, 80e-6, 200.0),
    (120e-6, 60e-6, 49.0),
    (240e-6, 160e-6, 49.0),
    (100e-6, 100e-6, 25.0),
    (200e-6, 50e-6, 75.0),
    (140e-6, 80e-6, 1.0),
    (300e-6, 300e-6, 150.0),
    (80e-6, 40e-6, 33.0),
])
def test_pull_in_matches_force_balance_oracle(length, width, k):
    geom = modal.BridgeGeometry(length=length, width=width, thickness=0.5e-6)
    res = actuation.pull_in_voltage(geom, k)
    v_ref, x_ref = brute_force_pull_in(geom, k)
    assert res["voltage"] == pytest.approx(v_ref, rel=0.01)
    assert res["displacement"] == pytest.approx(geom.effective_gap / 3.0,
                                                rel=0.01)
    assert res["displacement"] == pytest.approx(x_ref, rel=0.01)


def test_pull_in_closed_form_value():
    geom = presets.MEMBRANE_BRIDGE
    lump = modal.effective_spring_and_mass(
        geom, materials.GOLD, presets.RESIDUAL_STRESS)
    k = lump["k"]
    g = geom.effective_gap
    area = geom.length * geom.width
    v_pi = math.sqrt(8.0 * k * g ** 3 / (27.0 * EPS0 * area))
    assert actuation.pull_in_voltage(geom, k)["voltage"] == pytest.approx(
        v_pi, rel=1e-9)


def _free_drive(frequency):
    return actuation.DriveWaveform(kind="square", frequency=frequency,
                                   duty=0.5, v_on=0.0)


def test_vacuum_energy_conservation():
    geom = presets.MEMBRANE_BRIDGE
    lump = modal.effective_spring_and_mass(
        geom, materials.GOLD, presets.RESIDUAL_STRESS)
    f1 = lump["frequency_hz"]
    x0 = 0.2 * geom.gap
    traj = actuation.simulate_transient(
        geom, materials.GOLD, presets.RESIDUAL_STRESS, _free_drive(f1),
        q_factor=math.inf, duration=100.0 / f1, x0=x0)
    k, m = lump["k"], lump["m_eff"]
    energy = 0.5 * k * traj.displacement ** 2 + 0.5 * m * traj.velocity ** 2
    e0 = 0.5 * k * x0 ** 2
    assert abs(energy[-1] - e0) / e0 < 1e-3
    assert np.max(np.abs(energy - e0)) / e0 < 1e-3


def test_free_oscillation_frequency():
    geom = presets.MEMBRANE_BRIDGE
    lump = modal.effective_spring_and_mass(
        geom, materials.GOLD, presets.RESIDUAL_STRESS)
    f1 = lump["frequency_hz"]
    traj = actuation.simulate_transient(
        geom, materials.GOLD, presets.RESIDUAL_STRESS, _free_drive(f1),
        q_factor=math.inf, duration=20.0 / f1, x0=0.1 * geom.gap)
    x = traj.displacement
    crossings = np.where((x[:-1] > 0) & (x[1:] <= 0))[0]
    period = (crossings[-1] - crossings[0]) * traj.dt / (len(crossings) - 1)
    assert 1.0 / period == pytest.approx(f1, rel=0.01)


def test_metrics_stable_under_dt_halving():
    drive = presets.membrane_drive(60e3)
    args = (presets.MEMBRANE_BRIDGE, materials.GOLD, presets.RESIDUAL_STRESS,
            drive)
    t1 = actuation.simulate_transient(*args, q_factor=presets.MEMBRANE_Q,
                                      duration=6 / 60e3)
    t2 = actuation.simulate_transient(*args, q_factor=presets.MEMBRANE_Q,
                                      duration=6 / 60e3, dt=t1.dt / 2.0)
    m1 = actuation.trajectory_metrics(t1)
    m2 = actuation.trajectory_metrics(t2)
    for key in ("switch_down_time", "release_time", "contact_duty"):
        assert m1[key] == pytest.approx(m2[key], rel=0.01)


def test_subcritical_drive_never_contacts():
    geom = presets.MEMBRANE_BRIDGE
    lump = modal.effective_spring_and_mass(
        geom, materials.GOLD, presets.RESIDUAL_STRESS)
    v_pi = actuation.pull_in_voltage(geom, lump["k"])["voltage"]
    drive = actuation.DriveWaveform(kind="square", frequency=2e3, duty=0.5,
                                    v_on=0.85 * v_pi)
    traj = actuation.simulate_transient(
        geom, materials.GOLD, presets.RESIDUAL_STRESS, drive,
        q_factor=presets.MEMBRANE_Q, duration=3 / 2e3)
    assert not traj.contact.any()
    assert traj.displacement.max() < geom.gap


def test_overdrive_reaches_contact_and_releases():
    drive = presets.membrane_drive(60e3)
    traj = actuation.simulate_transient(
        presets.MEMBRANE_BRIDGE, materials.GOLD, presets.RESIDUAL_STRESS,
        drive, q_factor=presets.MEMBRANE_Q, duration=6 / 60e3)
    assert traj.contact.any()
    assert not traj.contact.all()
    # displacement never exceeds the physical travel
    assert traj.displacement.max() <= presets.MEMBRANE_BRIDGE.gap * (1 + 1e-12)
    metrics = actuation.trajectory_metrics(traj)
    assert 0.0 < metrics["contact_duty"] < 1.0
    assert metrics["switch_down_time"] > 0.0


def test_capacitance_increases_with_displacement():
    geom = presets.MEMBRANE_BRIDGE
    c0 = actuation.capacitance(geom, 0.0)
    c1 = actuation.capacitance(geom, 0.5 * geom.gap)
    c2 = actuation.capacitance(geom, geom.gap)
    assert c0 < c1 < c2
    assert np.isfinite(c2)  # dielectric keeps the closed-gap value finite


def test_electrostatic_force_quadratic_in_voltage():
    geom = presets.MEMBRANE_BRIDGE
    f1 = actuation.electrostatic_force(geom, 10.0, 0.3 * geom.gap)
    f2 = actuation.electrostatic_force(geom, 20.0, 0.3 * geom.gap)
    assert f2 == pytest.approx(4.0 * f1, rel=1e-9)
