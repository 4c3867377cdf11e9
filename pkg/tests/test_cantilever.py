"""Stress-curled cantilever statics, pull-down and frequencies."""

import math

import numpy as np
import pytest

from moems_qswitch import cantilever, materials, presets


def test_stress_curvature_round_trip():
    cant = presets.CURLED_CANTILEVER
    kappa = 1.0 / presets.CURLED_RADIUS
    stress = cantilever.stress_for_radius(
        cant, materials.GOLD, presets.CURLED_RADIUS)
    import dataclasses
    loaded = dataclasses.replace(cant, stress_layer_stress=stress)
    assert cantilever.curvature_from_stress(loaded, materials.GOLD) == (
        pytest.approx(kappa, rel=1e-9))


def test_flat_profile_at_zero_curvature():
    res = cantilever.profile_and_tip(presets.CURLED_CANTILEVER, 0.0)
    assert res["tip_deflection"] == 0.0
    assert res["tip_slope"] == 0.0
    assert np.all(res["profile"][:, 1] == 0.0)


def test_circular_arc_profile_against_segment_oracle():
    """Independent oracle: chain of short rigid segments following the arc."""
    cant = presets.CURLED_CANTILEVER
    kappa = 1.0 / presets.CURLED_RADIUS
    n = 20000
    ds = cant.length / n
    psi = (np.arange(n) + 0.5) * kappa * ds
    z = np.sum(ds * np.sin(psi))
    res = cantilever.profile_and_tip(cant, kappa)
    assert res["tip_deflection"] == pytest.approx(z, rel=1e-4)
    assert res["tip_slope"] == pytest.approx(kappa * cant.length, rel=1e-9)


def test_tip_deflection_monotone_in_curvature():
    cant = presets.CURLED_CANTILEVER
    kappas = np.linspace(0.0, 2.0 / presets.CURLED_RADIUS, 15)
    tips = [cantilever.profile_and_tip(cant, k)["tip_deflection"]
            for k in kappas]
    assert all(a < b for a, b in zip(tips, tips[1:]))


def test_small_curvature_matches_parabola():
    cant = presets.CURLED_CANTILEVER
    kappa = 1e-2 / cant.length  # tip angle of 0.01 rad: parabolic regime
    res = cantilever.profile_and_tip(cant, kappa)
    assert res["tip_deflection"] == pytest.approx(
        0.5 * kappa * cant.length ** 2, rel=1e-3)


def test_beam_deviation_is_twice_tip_slope():
    res = cantilever.profile_and_tip(presets.CURLED_CANTILEVER,
                                     1.0 / presets.CURLED_RADIUS)
    assert res["beam_deviation"] == pytest.approx(2.0 * res["tip_slope"],
                                                  rel=1e-12)


def test_corrugation_stiffening():
    assert cantilever.corrugation_stiffening(0.0, 1.5e-6) == 1.0
    # depth equal to thickness: sqrt(1 + 6) = sqrt(7)
    assert cantilever.corrugation_stiffening(1.5e-6, 1.5e-6) == (
        pytest.approx(math.sqrt(7.0), rel=1e-12))
    assert (cantilever.corrugation_stiffening(3e-6, 1.5e-6)
            > cantilever.corrugation_stiffening(1.5e-6, 1.5e-6))


def test_rectangular_frequency_scaling():
    # f ~ t / L^2 for a uniform cantilever
    f1 = cantilever.rectangular_frequency(100e-6, 1.5e-6, materials.GOLD)
    f2 = cantilever.rectangular_frequency(200e-6, 1.5e-6, materials.GOLD)
    assert f1 / f2 == pytest.approx(4.0, rel=1e-6)
    f3 = cantilever.rectangular_frequency(100e-6, 3e-6, materials.GOLD)
    assert f3 / f1 == pytest.approx(2.0, rel=1e-6)


def test_taper_limits():
    import dataclasses
    rect = presets.CURLED_CANTILEVER
    f_rect = cantilever.cantilever_frequency(rect, materials.GOLD)
    # equal widths must agree with the closed-form uniform result times the
    # preset stiffening factor
    f_uniform = (cantilever.rectangular_frequency(
        rect.length, rect.structural_thickness, materials.GOLD)
        * rect.stiffening_factor)
    assert f_rect == pytest.approx(f_uniform, rel=0.02)
    # narrowing the tip sheds modal mass faster than stiffness: higher f1
    tapered = dataclasses.replace(rect, tip_width=rect.root_width / 10.0)
    assert cantilever.cantilever_frequency(tapered, materials.GOLD) > f_rect


def test_measured_anchor_brackets_after_calibration():
    scale = presets.rectangular_stiffening_calibration()
    import dataclasses
    for cant in presets.RECT_CANTILEVERS.values():
        stiff = dataclasses.replace(cant, stiffening_factor=scale)
        f = cantilever.cantilever_frequency(stiff, materials.GOLD)
        anchor = presets.MEASURED_CANTILEVER_ANCHORS.get(cant.length)
        if anchor is not None:
            assert f == pytest.approx(anchor, rel=0.20)


def test_pulldown_voltage_positive_and_monotone_in_curl():
    cant = presets.CURLED_CANTILEVER
    kappa = 1.0 / presets.CURLED_RADIUS
    res = cantilever.pulldown_voltage(cant, materials.GOLD, kappa)
    assert res["voltage"] > 0.0
    assert 0.0 <= res["contact_angle"] < res["free_tip_angle"]
    shallower = cantilever.pulldown_voltage(cant, materials.GOLD, 0.5 * kappa)
    assert shallower["voltage"] < res["voltage"]


def test_pulldown_reports_unreachable_snapdown():
    cant = presets.CURLED_CANTILEVER
    kappa = 1.0 / presets.CURLED_RADIUS
    with pytest.raises(cantilever.NoSnapDownError):
        cantilever.pulldown_voltage(cant, materials.GOLD, kappa, v_max=0.1)
