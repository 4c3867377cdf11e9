"""Tilt-dependent fiber injection efficiency and loss schedules."""

import math

import numpy as np
import pytest

from moems_qswitch import actuation, materials, optics, presets


def test_perfect_alignment_gives_base_efficiency():
    m = presets.ER_COUPLING
    assert optics.injection_efficiency(m, 0.0) == pytest.approx(
        m.base_reflectivity, rel=1e-12)


def test_efficiency_drops_by_e_at_critical_tilt():
    m = presets.ER_COUPLING
    theta_c = m.wavelength / (math.pi * m.mode_field_radius * m.magnification)
    eta = optics.injection_efficiency(m, theta_c)
    assert eta == pytest.approx(m.base_reflectivity / math.e, rel=1e-9)


def test_efficiency_monotone_and_even_in_tilt():
    m = presets.ER_COUPLING
    tilts = np.radians(np.linspace(0.0, 9.0, 40))
    eta = np.array([optics.injection_efficiency(m, t) for t in tilts])
    assert np.all(np.diff(eta) < 0.0)
    assert optics.injection_efficiency(m, -tilts[7]) == pytest.approx(
        float(eta[7]), rel=1e-12)


def test_full_tilt_extinction_ratio():
    # hand evaluation: theta_c = 1.55 um / (pi * 5.2 um) = 5.435 deg, so a
    # 9 degree tilt leaves exp(-(9 / 5.435)^2) = 0.0645 of the injection
    m = presets.ER_COUPLING
    eta = optics.injection_efficiency(m, math.radians(9.0))
    assert eta / m.base_reflectivity == pytest.approx(0.0645, rel=0.01)


def test_no_imaging_variant_only_scales_base():
    m = presets.ER_COUPLING
    v = optics.no_imaging_variant(m, 0.36)
    assert v.base_reflectivity == 0.36
    assert v.wavelength == m.wavelength
    ratio = (optics.injection_efficiency(v, 0.01)
             / optics.injection_efficiency(m, 0.01))
    assert ratio == pytest.approx(0.36 / m.base_reflectivity, rel=1e-9)


def test_loss_schedule_tracks_trajectory():
    drive = presets.membrane_drive(60e3)
    traj = actuation.simulate_transient(
        presets.MEMBRANE_BRIDGE, materials.GOLD, presets.RESIDUAL_STRESS,
        drive, q_factor=presets.MEMBRANE_Q, duration=4 / 60e3)
    sched = optics.loss_schedule(traj, presets.ER_COUPLING)
    assert sched.dt == traj.dt
    assert len(sched.back_reflectivity) == len(traj.displacement)
    r = sched.back_reflectivity
    assert np.all(r >= 0.0)
    assert np.all(r <= presets.ER_COUPLING.base_reflectivity * (1 + 1e-12))
    # at rest the cavity is aligned; in contact it is fully spoiled
    assert r[0] == pytest.approx(presets.ER_COUPLING.base_reflectivity,
                                 rel=1e-9)
    assert (r[traj.contact].max()
            < 0.1 * presets.ER_COUPLING.base_reflectivity)


def test_yb_arm_sees_different_critical_angle():
    # shorter wavelength -> tighter angular tolerance -> deeper modulation
    tilt = math.radians(1.0)
    er = optics.injection_efficiency(presets.ER_COUPLING, tilt)
    yb = optics.injection_efficiency(presets.YB_COUPLING, tilt)
    assert yb < er
