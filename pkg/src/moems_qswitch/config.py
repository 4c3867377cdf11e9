"""Scenario configuration: unit-annotated TOML parsed into SI objects.

Every dimensional field carries an explicit unit suffix ("220 um",
"60 kHz"); bare numbers are rejected for dimensional fields so that a
config can never silently mix micrometres and metres.  Validation errors
name the offending field path (and the line in the file when it can be
located).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

try:
    import tomllib  # Python >= 3.11
except ModuleNotFoundError:  # pragma: no cover - exercised on 3.10
    import tomli as tomllib

from .actuation import DriveWaveform
from .cantilever import CantileverGeometry
from .laser import LaserParams
from .materials import MATERIAL_PRESETS, SUBSTRATE_PRESETS, MaterialProps, SubstrateProps
from .modal import BridgeGeometry
from .optics import CouplingModel
from .presets import COUPLING_PRESETS, LASER_PRESETS, MEMBRANE_BRIDGE

SCHEMA_VERSION = 1

KINDS = ("modal", "pullin", "transient", "cantilever", "qswitch", "dual", "sweep")


class ConfigError(ValueError):
    """Schema violation; message carries the dotted field path."""

    def __init__(self, path: str, message: str, line: int | None = None):
        at = f" (line {line})" if line else ""
        super().__init__(f"{path}: {message}{at}")
        self.path = path
        self.line = line


# Unit -> (SI scale, dimension tag).  Dimension tags keep "60 kHz" from
# being accepted where a length is expected.
_UNITS = {
    "m": (1.0, "length"), "mm": (1e-3, "length"), "um": (1e-6, "length"),
    "nm": (1e-9, "length"), "angstrom": (1e-10, "length"),
    "s": (1.0, "time"), "ms": (1e-3, "time"), "us": (1e-6, "time"), "ns": (1e-9, "time"),
    "Hz": (1.0, "frequency"), "kHz": (1e3, "frequency"), "MHz": (1e6, "frequency"),
    "V": (1.0, "voltage"), "kV": (1e3, "voltage"),
    "K": (1.0, "temperature"),
    "Pa": (1.0, "pressure"), "MPa": (1e6, "pressure"), "GPa": (1e9, "pressure"),
    "deg": (3.141592653589793 / 180.0, "angle"), "rad": (1.0, "angle"),
    "1/K": (1.0, "inv_temperature"), "1/s": (1.0, "rate"),
    "kg/m^3": (1.0, "density"),
}

_QUANTITY_RE = re.compile(r"^\s*([+-]?[0-9.eE+-]+)\s+(\S+)\s*$")


def parse_quantity(raw: Any, dimension: str, path: str, line: int | None = None) -> float:
    """Parse a '<number> <unit>' string of the expected dimension into SI."""
    if isinstance(raw, (int, float)) and not isinstance(raw, bool):
        raise ConfigError(path, f"dimensional field needs a unit suffix, e.g. \"1.0 {_example_unit(dimension)}\"; got bare number {raw}", line)
    if not isinstance(raw, str):
        raise ConfigError(path, f"expected a quantity string, got {type(raw).__name__}", line)
    m = _QUANTITY_RE.match(raw)
    if not m:
        raise ConfigError(path, f"malformed quantity {raw!r}; expected '<number> <unit>'", line)
    try:
        value = float(m.group(1))
    except ValueError:
        raise ConfigError(path, f"bad number in quantity {raw!r}", line) from None
    unit = m.group(2)
    if unit not in _UNITS:
        raise ConfigError(path, f"unknown unit {unit!r}", line)
    scale, dim = _UNITS[unit]
    if dim != dimension:
        raise ConfigError(path, f"unit {unit!r} is a {dim}, expected a {dimension}", line)
    return value * scale


def _example_unit(dimension: str) -> str:
    for unit, (_, dim) in _UNITS.items():
        if dim == dimension:
            return unit
    return "?"


@dataclass
class Scenario:
    """Fully-resolved SI inputs for one pipeline run."""

    kind: str
    device: BridgeGeometry | CantileverGeometry
    material: MaterialProps
    substrate: SubstrateProps | None = None
    residual_stress: float = 0.0
    temperature: float | None = None
    drive: DriveWaveform | None = None
    q_factor: float = 2.0
    coupling: CouplingModel | None = None
    coupling_b: CouplingModel | None = None
    laser: LaserParams | None = None
    laser_b: LaserParams | None = None
    curl_radius: float | None = None
    periods: int = 12
    duration: float | None = None
    dt: float | None = None
    basis_size: int = 8
    sweep: dict | None = None
    raw: dict = field(default_factory=dict, repr=False)


class _Loc:
    """Best-effort key -> line lookup in the raw TOML text."""

    def __init__(self, text: str):
        self.lines = text.splitlines()

    def find(self, key: str) -> int | None:
        pat = re.compile(rf"^\s*{re.escape(key)}\s*=")
        for i, ln in enumerate(self.lines, 1):
            if pat.match(ln):
                return i
        return None


def _get(table: dict, path: str, loc: _Loc, required: bool = True, default=None):
    node = table
    for part in path.split("."):
        if not isinstance(node, dict) or part not in node:
            if required:
                raise ConfigError(path, "required field missing", None)
            return default
        node = node[part]
    return node


def _quantity(table, path, dimension, loc, required=True, default=None):
    raw = _get(table, path, loc, required=required)
    if raw is None:
        return default
    return parse_quantity(raw, dimension, path, loc.find(path.rsplit(".", 1)[-1]))


def _number(table, path, loc, required=True, default=None):
    raw = _get(table, path, loc, required=required)
    if raw is None:
        return default
    if isinstance(raw, bool) or not isinstance(raw, (int, float)):
        raise ConfigError(path, f"expected a number, got {type(raw).__name__}",
                          loc.find(path.rsplit(".", 1)[-1]))
    return float(raw)


def _material(table: dict, loc: _Loc, section: str = "material") -> MaterialProps:
    sec = _get(table, section, loc, required=True)
    if "preset" in sec:
        name = sec["preset"]
        if name not in MATERIAL_PRESETS:
            raise ConfigError(f"{section}.preset", f"unknown material preset {name!r}; "
                              f"have {sorted(MATERIAL_PRESETS)}")
        return MATERIAL_PRESETS[name]
    return MaterialProps(
        name=_get(table, f"{section}.name", loc, required=False, default="custom"),
        youngs_modulus=_quantity(table, f"{section}.youngs_modulus", "pressure", loc),
        cte=_number(table, f"{section}.cte", loc),
        poisson=_number(table, f"{section}.poisson", loc),
        density=_number(table, f"{section}.density", loc),
    )


def _substrate(table: dict, loc: _Loc) -> SubstrateProps | None:
    sec = _get(table, "substrate", loc, required=False)
    if sec is None:
        return None
    if "preset" in sec:
        name = sec["preset"]
        if name not in SUBSTRATE_PRESETS:
            raise ConfigError("substrate.preset", f"unknown substrate preset {name!r}")
        return SUBSTRATE_PRESETS[name]
    return SubstrateProps(name=sec.get("name", "custom"), cte=_number(table, "substrate.cte", loc))


def _device(table: dict, loc: _Loc):
    dtype = _get(table, "device.type", loc)
    if dtype == "bridge":
        return BridgeGeometry(
            length=_quantity(table, "device.length", "length", loc),
            width=_quantity(table, "device.width", "length", loc),
            thickness=_quantity(table, "device.thickness", "length", loc),
            gap=_quantity(table, "device.gap", "length", loc, required=False,
                          default=MEMBRANE_BRIDGE.gap),
            dielectric_thickness=_quantity(table, "device.dielectric_thickness", "length",
                                           loc, required=False, default=200e-9),
            dielectric_rel_permittivity=_number(table, "device.dielectric_rel_permittivity",
                                                loc, required=False, default=9.0),
        )
    if dtype == "cantilever":
        return CantileverGeometry(
            length=_quantity(table, "device.length", "length", loc),
            root_width=_quantity(table, "device.root_width", "length", loc),
            tip_width=_quantity(table, "device.tip_width", "length", loc),
            structural_thickness=_quantity(table, "device.thickness", "length", loc,
                                           required=False, default=1.5e-6),
            stress_layer_thickness=_quantity(table, "device.stress_layer_thickness", "length",
                                             loc, required=False, default=10e-9),
            air_gap=_quantity(table, "device.air_gap", "length", loc,
                              required=False, default=0.6e-6),
            dielectric_thickness=_quantity(table, "device.dielectric_thickness", "length",
                                           loc, required=False, default=1.0e-6),
            dielectric_rel_permittivity=_number(table, "device.dielectric_rel_permittivity",
                                                loc, required=False, default=3.9),
            stiffening_factor=_number(table, "device.stiffening_factor", loc,
                                      required=False, default=1.0),
        )
    raise ConfigError("device.type", f"unknown device type {dtype!r}; expected "
                      "'bridge' or 'cantilever'", loc.find("type"))


def _drive(table: dict, loc: _Loc) -> DriveWaveform | None:
    sec = _get(table, "drive", loc, required=False)
    if sec is None:
        return None
    return DriveWaveform(
        kind=sec.get("kind", "square"),
        frequency=_quantity(table, "drive.frequency", "frequency", loc),
        duty=_number(table, "drive.duty", loc, required=False, default=0.5),
        v_on=_quantity(table, "drive.v_on", "voltage", loc),
        v_off=_quantity(table, "drive.v_off", "voltage", loc, required=False, default=0.0),
    )


def _coupling(table: dict, loc: _Loc, section: str) -> CouplingModel | None:
    sec = _get(table, section, loc, required=False)
    if sec is None:
        return None
    if "preset" in sec:
        name = sec["preset"]
        if name not in COUPLING_PRESETS:
            raise ConfigError(f"{section}.preset", f"unknown coupling preset {name!r}")
        return COUPLING_PRESETS[name]
    gap = _quantity(table, "device.gap", "length", loc, required=False,
                    default=MEMBRANE_BRIDGE.gap)
    return CouplingModel(
        wavelength=_quantity(table, f"{section}.wavelength", "length", loc),
        mode_field_radius=_quantity(table, f"{section}.mode_field_radius", "length", loc),
        base_reflectivity=_number(table, f"{section}.base_reflectivity", loc),
        tilt_per_displacement=_quantity(table, f"{section}.tilt_full_gap", "angle", loc) / gap,
    )


def _laser(table: dict, loc: _Loc, section: str) -> LaserParams | None:
    sec = _get(table, section, loc, required=False)
    if sec is None:
        return None
    if "preset" in sec:
        name = sec["preset"]
        if name not in LASER_PRESETS:
            raise ConfigError(f"{section}.preset", f"unknown laser preset {name!r}")
        return LASER_PRESETS[name]
    return LaserParams(
        upper_state_lifetime=_quantity(table, f"{section}.upper_state_lifetime", "time", loc),
        round_trip_time=_quantity(table, f"{section}.round_trip_time", "time", loc),
        round_trip_gain_coeff=_number(table, f"{section}.round_trip_gain_coeff", loc),
        pump_rate=_number(table, f"{section}.pump_rate", loc),
        output_coupler_reflectivity=_number(table, f"{section}.output_coupler_reflectivity",
                                            loc, required=False, default=0.04),
        intrinsic_loss=_number(table, f"{section}.intrinsic_loss", loc,
                               required=False, default=0.2),
        spontaneous_seed=_number(table, f"{section}.spontaneous_seed", loc,
                                 required=False, default=1e6),
        saturation_scale=_number(table, f"{section}.saturation_scale", loc,
                                 required=False, default=2e-8),
        label_wavelength=_quantity(table, f"{section}.wavelength", "length", loc,
                                   required=False, default=1.55e-6),
    )


def _sweep(table: dict, loc: _Loc) -> dict:
    sec = _get(table, "sweep", loc)
    command = sec.get("command", "modal")
    if command not in ("modal",):
        raise ConfigError("sweep.command", f"unsupported sweep command {command!r}")
    axis = _get(table, "sweep.axis", loc)
    dims = {"device.length": "length", "run.temperature": "temperature"}
    if axis not in dims:
        raise ConfigError("sweep.axis", f"unsupported axis {axis!r}; have {sorted(dims)}")
    dim = dims[axis]
    if "values" in sec:
        values = [parse_quantity(v, dim, f"sweep.values[{i}]") for i, v in enumerate(sec["values"])]
    else:
        start = _quantity(table, "sweep.start", dim, loc)
        stop = _quantity(table, "sweep.stop", dim, loc)
        count = int(_number(table, "sweep.count", loc))
        if count < 1:
            raise ConfigError("sweep.count", "must be >= 1")
        if count == 1:
            values = [start]
        else:
            step = (stop - start) / (count - 1)
            values = [start + i * step for i in range(count)]
    if not values:
        raise ConfigError("sweep.values", "must be non-empty")
    return {"command": command, "axis": axis, "values": values}


def load_scenario(path: str) -> Scenario:
    """Parse and validate a scenario file into SI objects."""
    with open(path, "rb") as fh:
        text = fh.read()
    try:
        table = tomllib.loads(text.decode("utf-8"))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError("<file>", f"invalid TOML: {exc}") from exc
    return build_scenario(table, text.decode("utf-8"))


def build_scenario(table: dict, text: str = "") -> Scenario:
    loc = _Loc(text)
    version = table.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {version!r}",
                          loc.find("schema_version"))
    kind = _get(table, "kind", loc)
    if kind not in KINDS:
        raise ConfigError("kind", f"unknown kind {kind!r}; expected one of {KINDS}",
                          loc.find("kind"))

    device = _device(table, loc)
    material = _material(table, loc)
    scenario = Scenario(
        kind=kind,
        device=device,
        material=material,
        substrate=_substrate(table, loc),
        raw=table,
    )
    stress = _get(table, "stress", loc, required=False)
    if stress is not None:
        scenario.residual_stress = _quantity(table, "stress.residual", "pressure", loc)
    run = _get(table, "run", loc, required=False) or {}
    scenario.temperature = _quantity(table, "run.temperature", "temperature", loc,
                                     required=False)
    scenario.duration = _quantity(table, "run.duration", "time", loc, required=False)
    scenario.dt = _quantity(table, "run.dt", "time", loc, required=False)
    scenario.periods = int(run.get("periods", 12))
    scenario.basis_size = int(run.get("basis_size", 8))

    scenario.drive = _drive(table, loc)
    drv = _get(table, "drive", loc, required=False)
    if drv is not None and "q_factor" in drv:
        scenario.q_factor = _number(table, "drive.q_factor", loc)
    scenario.coupling = _coupling(table, loc, "coupling") or _coupling(table, loc, "coupling_a")
    scenario.coupling_b = _coupling(table, loc, "coupling_b")
    scenario.laser = _laser(table, loc, "laser") or _laser(table, loc, "laser_a")
    scenario.laser_b = _laser(table, loc, "laser_b")
    curl = _get(table, "curl", loc, required=False)
    if curl is not None:
        scenario.curl_radius = _quantity(table, "curl.radius", "length", loc)

    if kind == "sweep":
        scenario.sweep = _sweep(table, loc)
    _check_kind_requirements(scenario)
    return scenario


def _check_kind_requirements(s: Scenario) -> None:
    def need(cond, path, what):
        if not cond:
            raise ConfigError(path, f"required for kind={s.kind!r}: {what}")

    if s.kind in ("modal", "pullin", "transient", "qswitch", "dual", "sweep"):
        need(isinstance(s.device, BridgeGeometry), "device.type", "a bridge device")
    if s.kind == "cantilever":
        need(isinstance(s.device, CantileverGeometry), "device.type", "a cantilever device")
    if s.kind in ("transient", "qswitch", "dual"):
        need(s.drive is not None, "drive", "a drive waveform")
    if s.kind in ("qswitch", "dual"):
        need(s.coupling is not None, "coupling", "a coupling model")
        need(s.laser is not None, "laser", "laser parameters")
    if s.kind == "dual":
        need(s.coupling_b is not None, "coupling_b", "a second coupling model")
        need(s.laser_b is not None, "laser_b", "second-arm laser parameters")
