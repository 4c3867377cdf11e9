"""Stress-curled cantilever mirrors.

A thin stressed film on top of the structural gold layer curls the
released cantilever upward into a circular arc.  This module maps film
stress to curvature (thin-film bilayer limit), gives the arc profile and
tip kinematics, the fundamental bending frequency (with a taper solve for
triangular plan forms), and a simplified quasi-static snap-down voltage
for electrostatic pull-down toward the substrate electrode.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh

from .actuation import EPS0
from .materials import MaterialProps

CANTILEVER_BETA1 = 1.8751040687119611
CANTILEVER_BETA2 = 4.6940911329741746


class OverCurledError(ValueError):
    """Arc curls past a quarter circle; single-valued profile assumption fails."""


class NoSnapDownError(RuntimeError):
    """Continuation exhausted its voltage range without losing stability."""

    def __init__(self, v_max: float):
        super().__init__(f"no snap-down below {v_max:.3g} V")
        self.v_max = v_max


@dataclass(frozen=True)
class CantileverGeometry:
    """Plan form, layer stack and electrode gap of one cantilever mirror.

    Equal root and tip widths give a rectangular mirror; tip_width <
    root_width a (truncated) triangular one.  stiffening_factor is a
    lumped multiplier on the bending frequency that stands in for the
    corrugation stiffening of the real devices.
    """

    length: float
    root_width: float
    tip_width: float
    structural_thickness: float = 1.5e-6
    stress_layer_thickness: float = 10e-9
    stress_layer_stress: float = 0.0
    air_gap: float = 0.6e-6
    dielectric_thickness: float = 1.0e-6
    dielectric_rel_permittivity: float = 3.9
    stiffening_factor: float = 1.0

    def __post_init__(self):
        for name in (
            "length",
            "root_width",
            "tip_width",
            "structural_thickness",
            "stress_layer_thickness",
            "air_gap",
            "dielectric_thickness",
        ):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.tip_width > self.root_width:
            raise ValueError("tip_width must be <= root_width")
        if self.stiffening_factor < 1.0:
            raise ValueError("stiffening_factor must be >= 1")

    def width_at(self, x) -> np.ndarray:
        """Plan-form width at distance x from the root (m)."""
        xi = np.asarray(x, dtype=float) / self.length
        return self.root_width + (self.tip_width - self.root_width) * xi


def curvature_from_stress(cant: CantileverGeometry, props: MaterialProps) -> float:
    """Upward curvature (1/m) induced by the tensile stress layer.

    Thin-film bilayer limit: kappa = 6 sigma_f t_f / (E' t_s^2) with E' the
    biaxial modulus of the structural layer.  Warns when the stress layer
    is not thin compared to the structural layer.
    """
    t_s = cant.structural_thickness
    t_f = cant.stress_layer_thickness
    if t_f > t_s / 10.0:
        warnings.warn("stress layer not thin vs structural layer; bilayer limit degrades",
                      stacklevel=2)
    return 6.0 * cant.stress_layer_stress * t_f / (props.biaxial_modulus * t_s**2)


def corrugation_stiffening(depth: float, thickness: float) -> float:
    """Frequency multiplier for a plate corrugated through its thickness.

    Transverse corrugations of amplitude ``depth`` raise the section's
    second moment from w t^3/12 to roughly w t (t^2/12 + depth^2/2), so the
    bending frequency scales by sqrt(1 + 6 (depth/t)^2).  Flat plate
    (depth = 0) returns exactly 1.
    """
    if depth < 0 or thickness <= 0:
        raise ValueError("depth must be >= 0 and thickness > 0")
    return math.sqrt(1.0 + 6.0 * (depth / thickness) ** 2)


def stress_for_radius(cant: CantileverGeometry, props: MaterialProps, radius: float) -> float:
    """Stress-layer stress (Pa) needed for the given radius of curvature (m)."""
    if radius <= 0:
        raise ValueError("radius must be > 0")
    t_s = cant.structural_thickness
    return props.biaxial_modulus * t_s**2 / (6.0 * cant.stress_layer_thickness * radius)


def profile_and_tip(cant: CantileverGeometry, kappa: float, n_points: int = 101) -> dict:
    """Circular-arc out-of-plane profile and tip kinematics.

    z(x) = (1 - cos(kappa x)) / kappa; returns the sampled profile, the tip
    deflection and tip slope, plus the doubled (specular reflection) beam
    deviation for optics bookkeeping.
    """
    L = cant.length
    if kappa * L >= math.pi / 2.0:
        raise OverCurledError(f"kappa*L = {kappa * L:.3f} >= pi/2; arc over-curled")
    x = np.linspace(0.0, L, n_points)
    if abs(kappa) < 1e-9:
        # Series limit, kappa -> 0: z -> kappa x^2 / 2.
        z = 0.5 * kappa * x**2
    else:
        z = (1.0 - np.cos(kappa * x)) / kappa
    return {
        "profile": np.column_stack([x, z]),
        "tip_deflection": float(z[-1]),
        "tip_slope": kappa * L,
        "beam_deviation": 2.0 * kappa * L,
    }


def _cantilever_mode(beta: float, xi: np.ndarray, deriv: int = 0) -> np.ndarray:
    s = (math.sinh(beta) - math.sin(beta)) / (math.cosh(beta) + math.cos(beta))
    u = beta * xi
    if deriv == 0:
        return np.cosh(u) - np.cos(u) - s * (np.sinh(u) - np.sin(u))
    if deriv == 2:
        return beta * beta * (np.cosh(u) + np.cos(u) - s * (np.sinh(u) + np.sin(u)))
    raise ValueError("deriv must be 0 or 2")


def rectangular_frequency(length: float, thickness: float, props: MaterialProps) -> float:
    """Closed-form fundamental frequency (Hz) of a uniform cantilever."""
    return (
        CANTILEVER_BETA1**2
        / (2.0 * math.pi)
        * (thickness / length**2)
        * math.sqrt(props.youngs_modulus / (12.0 * props.density))
    )


def cantilever_frequency(cant: CantileverGeometry, props: MaterialProps) -> float:
    """Fundamental bending frequency (Hz), including the stiffening factor.

    Rectangular plan forms use the closed form; tapered ones a two-term
    assumed-modes solve over the linear width profile (width cancels for
    the rectangular case, so the closed form is its exact limit).
    """
    if cant.tip_width == cant.root_width:
        f = rectangular_frequency(cant.length, cant.structural_thickness, props)
        return cant.stiffening_factor * f

    nodes, wts = leggauss(24)
    xi = 0.5 * (nodes + 1.0)
    w_q = 0.5 * wts
    width = cant.root_width + (cant.tip_width - cant.root_width) * xi
    L = cant.length
    t = cant.structural_thickness

    betas = (CANTILEVER_BETA1, CANTILEVER_BETA2)
    phi = np.stack([_cantilever_mode(b, xi, 0) for b in betas])
    ddphi = np.stack([_cantilever_mode(b, xi, 2) for b in betas])
    mass = props.density * t * L * (phi * (width * w_q)) @ phi.T
    stiff = props.youngs_modulus * t**3 / (12.0 * L**3) * (ddphi * (width * w_q)) @ ddphi.T
    vals = eigh(0.5 * (stiff + stiff.T), 0.5 * (mass + mass.T), eigvals_only=True)
    return cant.stiffening_factor * math.sqrt(float(vals[0])) / (2.0 * math.pi)


def _arc_capacitance(cant: CantileverGeometry, kappa: float, psi: float, n: int = 200):
    """Capacitance (F) and its psi-derivative for the rigid-arc pull-down model.

    psi is the rigid rotation of the arc about its root, toward the
    substrate.  Heights below zero are invalid (contact) and flagged by a
    returned None.
    """
    x = (np.arange(n) + 0.5) * (cant.length / n)
    dx = cant.length / n
    z = 0.5 * kappa * x**2 if abs(kappa) < 1e-9 else (1.0 - np.cos(kappa * x)) / kappa
    h = cant.air_gap + z - psi * x
    if np.any(h <= 0.0):
        return None, None
    h_e = h + cant.dielectric_thickness / cant.dielectric_rel_permittivity
    w = cant.width_at(x)
    c = EPS0 * np.sum(w / h_e) * dx
    dc = EPS0 * np.sum(w * x / h_e**2) * dx  # dC/dpsi
    return float(c), float(dc)


def pulldown_voltage(
    cant: CantileverGeometry,
    props: MaterialProps,
    kappa: float,
    v_max: float | None = None,
    steps: int = 200,
) -> dict:
    """Quasi-static snap-down voltage of the curled cantilever.

    The cantilever is modeled as a rigid arc hinged at the root with a
    rotational stiffness matched to the tip-load compliance; the snap-down
    is the smallest
    voltage at which the total energy loses its local minimum, located by
    marching the voltage upward and tracking the stable equilibrium angle.
    """
    L = cant.length
    if kappa * L >= math.pi / 2.0:
        raise OverCurledError("over-curled; pull-down model invalid")
    w_mean = 0.5 * (cant.root_width + cant.tip_width)
    inertia = w_mean * cant.structural_thickness**3 / 12.0
    # Rotational stiffness matched to the tip-load compliance of the real
    # beam (tip force F: delta = F L^3 / 3 E' I  ->  k_theta = 3 E' I / L).
    k_theta = 3.0 * props.biaxial_modulus * inertia / L

    # Angle at which the tip touches the substrate.
    z_tip = (1.0 - math.cos(kappa * L)) / kappa if abs(kappa) > 1e-9 else 0.0
    psi_contact = (cant.air_gap + z_tip) / L

    if v_max is None:
        # Parallel-plate-like scale from the root-hinge stiffness; generous.
        g = cant.air_gap + cant.dielectric_thickness / cant.dielectric_rel_permittivity
        v_scale = math.sqrt(k_theta * (g + z_tip) ** 2 * g / (EPS0 * w_mean * L**3))
        v_max = 6.0 * v_scale

    def stable_equilibrium(v: float) -> float | None:
        """Smallest stable root of k_theta psi = V^2/2 dC/dpsi, or None."""
        psis = np.linspace(0.0, psi_contact * 0.999, 400)
        torque = np.empty_like(psis)
        for i, p in enumerate(psis):
            _, dc = _arc_capacitance(cant, kappa, p)
            if dc is None:
                torque[i:] = -np.inf
                break
            torque[i] = k_theta * p - 0.5 * v * v * dc
        # Restoring-minus-attracting torque starts <= 0 at psi=0 (for V>0);
        # the first upward zero crossing is the stable equilibrium.
        for i in range(1, len(psis)):
            if torque[i - 1] < 0.0 <= torque[i]:
                return float(psis[i])
            if torque[i - 1] >= 0.0 and i == 1:
                return 0.0
        return None

    v_grid = np.linspace(0.0, v_max, steps + 1)
    prev_v = 0.0
    for v in v_grid[1:]:
        if stable_equilibrium(float(v)) is None:
            lo, hi = prev_v, float(v)
            for _ in range(40):
                mid = 0.5 * (lo + hi)
                if stable_equilibrium(mid) is None:
                    hi = mid
                else:
                    lo = mid
            return {
                "voltage": 0.5 * (lo + hi),
                "contact_angle": psi_contact,
                "free_tip_angle": kappa * L,
            }
        prev_v = float(v)
    raise NoSnapDownError(v_max)
