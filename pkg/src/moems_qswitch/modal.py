"""Fundamental resonance of a tensioned clamped-clamped bridge.

Rayleigh-Ritz assumed-modes model of the bridge as a 1-D Euler-Bernoulli
beam under uniaxial axial stress.  The basis is the set of clamped-clamped
beam eigenfunctions, evaluated in a numerically stable split-exponential
form so that high mode numbers do not suffer cosh/cos cancellation.

The generalized eigenproblem K q = lambda M q (K = bending + geometric
stiffness) gives the resonant frequencies; tension stiffens, compression
softens, and a non-positive lowest eigenvalue means the bridge is buckled.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy.linalg import eigh

from .materials import BucklingError, MaterialProps, SubstrateProps, stress_at_temperature

MAX_BASIS = 64


@dataclass(frozen=True)
class BridgeGeometry:
    """Clamped-clamped bridge dimensions and the electrode stack below it.

    Attributes:
        length: Span between anchors (m).
        width: Bridge width (m).
        thickness: Structural film thickness (m).
        gap: Air gap between bridge and dielectric top surface (m).
        dielectric_thickness: Isolation film thickness on the electrode (m).
        dielectric_rel_permittivity: Relative permittivity of that film (-).
    """

    length: float
    width: float
    thickness: float
    gap: float = 2.2e-6
    dielectric_thickness: float = 200e-9
    dielectric_rel_permittivity: float = 9.0

    def __post_init__(self):
        for name in ("length", "width", "thickness", "gap"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.dielectric_thickness < 0 or self.dielectric_rel_permittivity <= 0:
            raise ValueError("invalid dielectric stack")
        if self.thickness >= self.length / 20.0:
            warnings.warn(
                "thickness is not small compared to length; "
                "slender-beam model accuracy degrades",
                stacklevel=2,
            )

    @property
    def area(self) -> float:
        """Plate area length*width (m^2)."""
        return self.length * self.width

    @property
    def effective_gap(self) -> float:
        """Electrical gap at rest: air gap plus dielectric-equivalent air (m)."""
        return self.gap + self.dielectric_thickness / self.dielectric_rel_permittivity


@dataclass(frozen=True)
class ModalSystem:
    """Assembled Rayleigh-Ritz matrices for one bridge configuration."""

    mass: np.ndarray
    bending_stiffness: np.ndarray
    geometric_stiffness: np.ndarray
    basis_size: int
    length: float
    beta: np.ndarray = field(repr=False)

    @property
    def stiffness(self) -> np.ndarray:
        return self.bending_stiffness + self.geometric_stiffness


def clamped_clamped_roots(n: int) -> np.ndarray:
    """First n roots of cos(b)*cosh(b) = 1 (skipping the trivial b = 0)."""
    roots = np.empty(n)
    for i in range(1, n + 1):
        b = (i + 0.5) * math.pi
        # Newton on g(b) = cos(b) - 1/cosh(b); well-conditioned at any size.
        for _ in range(50):
            g = math.cos(b) - 1.0 / math.cosh(b)
            dg = -math.sin(b) + math.tanh(b) / math.cosh(b)
            step = g / dg
            b -= step
            if abs(step) < 1e-14 * b:
                break
        roots[i - 1] = b
    return roots


def _mode_coefficients(beta: float) -> tuple[float, float]:
    """Stable (sigma, d=1-sigma) for the clamped-clamped eigenfunction."""
    denom = math.sinh(beta) - math.sin(beta)
    sigma = (math.cosh(beta) - math.cos(beta)) / denom
    # 1 - sigma without cancellation: sinh - cosh = -exp(-beta).
    d = (math.cos(beta) - math.sin(beta) - math.exp(-beta)) / denom
    return sigma, d


def cc_mode(beta: float, xi: np.ndarray, deriv: int = 0) -> np.ndarray:
    """Clamped-clamped eigenfunction (or derivative) at xi in [0, 1].

    Returns phi, phi' or phi'' with respect to xi (derivatives carry the
    beta and beta^2 factors).  Uses split exponentials so the growing and
    decaying parts never cancel catastrophically.
    """
    xi = np.asarray(xi, dtype=float)
    sigma, d = _mode_coefficients(beta)
    # Exploit the mirror symmetry phi(1-xi) = +/- phi(xi): evaluate on the
    # half where the growing exponential stays smallest.
    mirror = xi > 0.5
    u = beta * np.where(mirror, 1.0 - xi, xi)
    grow = 0.5 * d * np.exp(u)
    decay = 0.5 * (1.0 + sigma) * np.exp(-u)
    if deriv == 0:
        val = grow + decay - np.cos(u) + sigma * np.sin(u)
        parity = 1.0 if _is_symmetric(beta) else -1.0
        return np.where(mirror, parity * val, val)
    if deriv == 1:
        val = beta * (grow - decay + np.sin(u) + sigma * np.cos(u))
        parity = -1.0 if _is_symmetric(beta) else 1.0
        return np.where(mirror, parity * val, val)
    if deriv == 2:
        val = beta * beta * (grow + decay + np.cos(u) - sigma * np.sin(u))
        parity = 1.0 if _is_symmetric(beta) else -1.0
        return np.where(mirror, parity * val, val)
    raise ValueError("deriv must be 0, 1 or 2")


def _is_symmetric(beta: float) -> bool:
    # Mode ordering alternates symmetric / antisymmetric starting symmetric.
    k = round(beta / math.pi - 0.5)
    return k % 2 == 1


def clamped_poly_basis(n: int, xi: np.ndarray) -> tuple[np.ndarray, ...]:
    """Clamped polynomial trial functions and derivatives at xi in [0, 1].

    phi_k = (xi (1-xi))^2 P_k(2 xi - 1) with Legendre P_k: each function and
    its slope vanish at both ends, and the family converges spectrally for
    smooth modes (much faster than the unstressed beam eigenfunctions once
    tension bends the mode shape away from them).  Returns (phi, phi', phi'')
    arrays of shape (n, len(xi)), derivatives taken with respect to xi.
    """
    xi = np.asarray(xi, dtype=float)
    env = (xi * (1.0 - xi)) ** 2
    denv = 2.0 * xi * (1.0 - xi) * (1.0 - 2.0 * xi)
    ddenv = 2.0 - 12.0 * xi + 12.0 * xi * xi
    u = 2.0 * xi - 1.0
    phi = np.empty((n, xi.size))
    dphi = np.empty((n, xi.size))
    ddphi = np.empty((n, xi.size))
    for k in range(n):
        c = np.zeros(k + 1)
        c[k] = 1.0
        p = np.polynomial.legendre.legval(u, c)
        dp = 2.0 * np.polynomial.legendre.legval(u, np.polynomial.legendre.legder(c))
        ddp = 4.0 * np.polynomial.legendre.legval(
            u, np.polynomial.legendre.legder(c, 2)) if k >= 2 else 0.0
        phi[k] = env * p
        dphi[k] = denv * p + env * dp
        ddphi[k] = ddenv * p + 2.0 * denv * dp + env * ddp
    return phi, dphi, ddphi


def assemble_modal_system(
    geom: BridgeGeometry, props: MaterialProps, sigma: float, basis_size: int = 8
) -> ModalSystem:
    """Assemble mass and stiffness matrices for the tensioned bridge.

    sigma is the uniaxial axial stress (Pa, tensile positive).  Matrices are
    symmetrized to round-off.  Basis sizes above MAX_BASIS are rejected.
    """
    if basis_size < 1:
        raise ValueError("basis_size must be >= 1")
    if basis_size > MAX_BASIS:
        raise ValueError(f"basis_size > {MAX_BASIS} not supported")
    beta = clamped_clamped_roots(basis_size)

    # Exact quadrature: integrands are polynomials of degree <= 2N + 6.
    n_nodes = 2 * basis_size + 8
    nodes, wts = leggauss(n_nodes)
    xi = 0.5 * (nodes + 1.0)
    w_q = 0.5 * wts

    phi, dphi, ddphi = clamped_poly_basis(basis_size, xi)   # (N, nq)

    L = geom.length
    area = geom.width * geom.thickness
    inertia = geom.width * geom.thickness**3 / 12.0

    # x = L*xi, so each d/dx brings a 1/L; dx = L dxi.
    mass = props.density * area * L * (phi * w_q) @ phi.T
    k_bend = props.youngs_modulus * inertia / L**3 * (ddphi * w_q) @ ddphi.T
    k_geo = sigma * area / L * (dphi * w_q) @ dphi.T

    mass = 0.5 * (mass + mass.T)
    k_bend = 0.5 * (k_bend + k_bend.T)
    k_geo = 0.5 * (k_geo + k_geo.T)
    return ModalSystem(
        mass=mass,
        bending_stiffness=k_bend,
        geometric_stiffness=k_geo,
        basis_size=basis_size,
        length=L,
        beta=beta,
    )


def _eigensolve(system: ModalSystem) -> tuple[np.ndarray, np.ndarray]:
    return eigh(system.stiffness, system.mass)


def fundamental_mode(system: ModalSystem) -> tuple[float, np.ndarray]:
    """Lowest eigenvalue (rad^2/s^2) and its basis-coefficient vector.

    Raises BucklingError when the lowest eigenvalue is non-positive.
    """
    vals, vecs = _eigensolve(system)
    lam = float(vals[0])
    if lam <= 0.0:
        raise BucklingError(
            f"bridge buckled: lowest stiffness eigenvalue {lam:.3e} <= 0"
        )
    return lam, vecs[:, 0]


def frequency_from_sigma(
    geom: BridgeGeometry, props: MaterialProps, sigma: float, basis_size: int = 8
) -> float:
    """Fundamental frequency (Hz) at a prescribed axial stress."""
    system = assemble_modal_system(geom, props, sigma, basis_size)
    lam, _ = fundamental_mode(system)
    return math.sqrt(lam) / (2.0 * math.pi)


def fundamental_frequency(
    geom: BridgeGeometry,
    props: MaterialProps,
    substrate: SubstrateProps,
    temperature: float,
    basis_size: int = 8,
) -> float:
    """Fundamental frequency (Hz) at the given operating temperature."""
    sigma = stress_at_temperature(props, substrate, temperature)
    return frequency_from_sigma(geom, props, sigma, basis_size)


def effective_spring_and_mass(
    geom: BridgeGeometry, props: MaterialProps, sigma: float, basis_size: int = 8
) -> dict:
    """Lumped spring and mass of the fundamental mode.

    The modal mass is normalized to unit center deflection, and the spring
    follows as k = m_eff * omega1^2, so the lumped oscillator resonates at
    exactly the modal fundamental frequency.
    """
    system = assemble_modal_system(geom, props, sigma, basis_size)
    lam, q = fundamental_mode(system)
    phi_c, _, _ = clamped_poly_basis(system.basis_size, np.array([0.5]))
    center = float(q @ phi_c[:, 0])
    if abs(center) < 1e-300:
        raise ValueError("fundamental mode has no center deflection")
    m_eff = float(q @ system.mass @ q) / center**2
    k = m_eff * lam
    return {"k": k, "m_eff": m_eff, "frequency_hz": math.sqrt(lam) / (2.0 * math.pi)}


def frequency_sweep(
    axis: str,
    lo: float,
    hi: float,
    steps: int,
    geom: BridgeGeometry,
    props: MaterialProps,
    substrate: SubstrateProps,
    temperature: float = 293.0,
    basis_size: int = 8,
) -> list[dict]:
    """Sweep `length` or `temperature` and tabulate the fundamental frequency.

    Buckled points are flagged rather than aborting the sweep.  Returns rows
    of {'axis', 'value_si', 'frequency_hz', 'flag'} in axis order.
    """
    if axis not in ("length", "temperature"):
        raise ValueError("axis must be 'length' or 'temperature'")
    if steps < 1:
        raise ValueError("steps must be >= 1")
    values = np.linspace(lo, hi, steps) if steps > 1 else np.array([lo])
    rows = []
    for v in values:
        if axis == "length":
            g = BridgeGeometry(
                length=float(v),
                width=geom.width,
                thickness=geom.thickness,
                gap=geom.gap,
                dielectric_thickness=geom.dielectric_thickness,
                dielectric_rel_permittivity=geom.dielectric_rel_permittivity,
            )
            t = temperature
        else:
            g = geom
            t = float(v)
        try:
            f = fundamental_frequency(g, props, substrate, t, basis_size)
            rows.append({"axis": axis, "value_si": float(v), "frequency_hz": f, "flag": ""})
        except BucklingError:
            rows.append(
                {"axis": axis, "value_si": float(v), "frequency_hz": math.nan, "flag": "buckled"}
            )
    return rows
