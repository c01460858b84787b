"""Experiment configuration: INI-style sectioned key = value text.

Units: lengths in nm, energies in meV, wavenumbers in 1/nm, angles in rad,
mode intensities in 1/nm^2.  Exactly one of [device] / [coupling] must be
present.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, fields, replace

from .device import (
    DEFAULT_RESONANCE_FLOOR_MEV,
    CouplingConstants,
    ElectronParams,
    OpticalParams,
    WireParams,
    build_coupling,
    validate_frequency_window,
)
from .errors import ConfigurationError, QNDError
from .fock import PhotonPureState, coherent_n_max, make_coherent_state, make_number_state


@dataclass(frozen=True)
class CouplingSection:
    zeta_n: float
    zeta_w: float
    theta0: float = -math.pi / 2


@dataclass(frozen=True)
class DeviceSection:
    narrow_width_nm: float
    wide_width_nm: float
    photon_energy_mev: float
    wavenumber_per_nm: float
    narrow_mass_ratio: float = 0.067
    wide_mass_ratio: float = 0.067
    narrow_intensity_per_nm2: float = 1e-6
    wide_intensity_per_nm2: float = 1e-6
    theta0: float = -math.pi / 2
    resonance_floor_mev: float = DEFAULT_RESONANCE_FLOOR_MEV

    def wires(self) -> tuple[WireParams, WireParams]:
        narrow = WireParams(self.narrow_width_nm, self.narrow_mass_ratio, self.narrow_intensity_per_nm2)
        wide = WireParams(self.wide_width_nm, self.wide_mass_ratio, self.wide_intensity_per_nm2)
        return narrow, wide


@dataclass(frozen=True)
class LightSection:
    kind: str = "coherent"
    xi: complex = 5 + 0j
    n0: int = 0
    n_max: int | None = None


@dataclass(frozen=True)
class RunSection:
    N: int = 100
    trials: int = 2000
    master_seed: int = 0
    phase_points: int = 4096
    q_points: int = 121
    q_extent: float | None = None
    qfunc_N: tuple[int, ...] = (0, 1, 2, 3, 100)
    probe_n0: int = 10
    sweep_axis: str = "N"
    sweep_values: tuple[float, ...] = ()
    output_dir: str = "out"
    format: str = "csv"


@dataclass(frozen=True)
class ExperimentConfig:
    light: LightSection = field(default_factory=LightSection)
    run: RunSection = field(default_factory=RunSection)
    coupling_section: CouplingSection | None = None
    device: DeviceSection | None = None

    def coupling(self) -> CouplingConstants:
        if self.coupling_section is not None:
            c = self.coupling_section
            return CouplingConstants(c.zeta_n, c.zeta_w, c.theta0)
        d = self.device
        narrow, wide = d.wires()
        return build_coupling(
            narrow,
            wide,
            OpticalParams(d.photon_energy_mev),
            ElectronParams(d.wavenumber_per_nm),
            d.theta0,
            d.resonance_floor_mev,
        )

    def n_max(self) -> int:
        if self.light.n_max is not None:
            return self.light.n_max
        if self.light.kind == "coherent":
            return coherent_n_max(self.light.xi)
        return self.light.n0

    def initial_state(self) -> PhotonPureState:
        if self.light.kind == "coherent":
            return make_coherent_state(self.light.xi, self.n_max())
        return make_number_state(self.light.n0, self.n_max())

    def with_overrides(self, **run_overrides) -> ExperimentConfig:
        kept = {k: v for k, v in run_overrides.items() if v is not None}
        return replace(self, run=replace(self.run, **kept)) if kept else self

    def with_g(self, g: float) -> ExperimentConfig:
        """Replace the device/coupling by direct constants with difference g."""
        c = self.coupling().with_g(g)
        return replace(self, coupling_section=CouplingSection(c.zeta_N, c.zeta_W, c.theta0), device=None)

    def to_text(self) -> str:
        return format_config(self)


_SECTIONS = {
    "coupling": CouplingSection,
    "device": DeviceSection,
    "light": LightSection,
    "run": RunSection,
}


def _fmt(value) -> str:
    if isinstance(value, tuple):
        return ", ".join(_fmt(v) for v in value)
    if isinstance(value, complex):
        return repr(value).strip("()")
    if isinstance(value, float):
        return repr(value)
    return str(value)


def format_config(cfg: ExperimentConfig) -> str:
    lines = ["# units: nm, meV, 1/nm, rad, 1/nm^2"]
    for name, section in (
        ("coupling", cfg.coupling_section),
        ("device", cfg.device),
        ("light", cfg.light),
        ("run", cfg.run),
    ):
        if section is None:
            continue
        lines.append(f"[{name}]")
        for f in fields(section):
            value = getattr(section, f.name)
            if value is None:
                continue
            lines.append(f"{f.name} = {_fmt(value)}")
        lines.append("")
    return "\n".join(lines)


def _field_type(cls, name: str) -> str:
    return {f.name.lower(): str(f.type) for f in fields(cls)}[name]


def _convert(raw: str, type_name: str):
    raw = raw.strip()
    if "tuple[int" in type_name:
        return tuple(int(float(v)) for v in raw.replace(",", " ").split())
    if "tuple[float" in type_name:
        return tuple(float(v) for v in raw.replace(",", " ").split())
    if type_name.startswith("complex"):
        return complex(raw.replace(" ", ""))
    if type_name.startswith("int"):
        as_float = float(raw)
        if not as_float.is_integer():
            raise ValueError(f"expected an integer, got {raw!r}")
        return int(as_float)
    if type_name.startswith("float"):
        return float(raw)
    return raw


def _read_section(parser, name, cls, violations):
    names = {f.name.lower(): f.name for f in fields(cls)}
    kwargs = {}
    for key, raw in parser.items(name):
        if key not in names:
            violations.append(f"[{name}] unknown key {key!r}")
            continue
        try:
            kwargs[names[key]] = _convert(raw, _field_type(cls, key))
        except ValueError as exc:
            violations.append(f"[{name}] {key}: {exc}")
    try:
        return cls(**kwargs)
    except TypeError as exc:
        missing = [n for n in names.values() if n not in kwargs]
        violations.append(f"[{name}] missing required keys {missing}: {exc}")
        return None


def _syntax_error(exc: configparser.Error) -> ConfigurationError:
    lineno = getattr(exc, "lineno", None)
    if lineno is None and getattr(exc, "errors", None):
        lineno = exc.errors[0][0]
    where = f" at line {lineno}" if lineno is not None else ""
    msg = f"syntax error{where}: {exc.message if hasattr(exc, 'message') else exc}"
    return ConfigurationError(msg, [msg])


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate; every violation found is reported in one error."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#", ";"))
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise _syntax_error(exc) from None

    violations: list[str] = []
    for name in parser.sections():
        if name not in _SECTIONS:
            violations.append(f"unknown section [{name}]")
    sections = {}
    for name, cls in _SECTIONS.items():
        if parser.has_section(name):
            sections[name] = _read_section(parser, name, cls, violations)

    has_dev, has_cpl = parser.has_section("device"), parser.has_section("coupling")
    if has_dev and has_cpl:
        violations.append("exactly one of [device] and [coupling] may be given, found both")
    elif not (has_dev or has_cpl):
        violations.append("exactly one of [device] and [coupling] is required, found neither")

    light = sections.get("light") if parser.has_section("light") else LightSection()
    run = sections.get("run") if parser.has_section("run") else RunSection()
    if light is not None:
        violations += _check_light(light)
    if run is not None:
        violations += _check_run(run)
    if has_dev and not has_cpl and sections.get("device") is not None:
        violations += _check_device(sections["device"])

    if violations:
        raise ConfigurationError(
            "invalid configuration:\n  " + "\n  ".join(violations), violations
        )
    return ExperimentConfig(
        light=light,
        run=run,
        coupling_section=sections.get("coupling"),
        device=sections.get("device"),
    )


def _check_light(light: LightSection) -> list[str]:
    out = []
    if light.kind not in ("number", "coherent"):
        out.append(f"[light] kind must be 'number' or 'coherent', got {light.kind!r}")
    if light.kind == "number" and light.n0 < 0:
        out.append(f"[light] n0 must be >= 0, got {light.n0}")
    if light.n_max is not None:
        if light.n_max < 0:
            out.append(f"[light] n_max must be >= 0, got {light.n_max}")
        elif light.kind == "number" and light.n0 > light.n_max:
            out.append(f"[light] n0={light.n0} exceeds n_max={light.n_max}")
    if light.kind == "coherent":
        try:
            make_coherent_state(light.xi, light.n_max)
        except QNDError as exc:
            out.append(f"[light] {exc}")
    return out


def _check_run(run: RunSection) -> list[str]:
    out = []
    if run.N < 0:
        out.append(f"[run] N must be >= 0, got {run.N}")
    if run.trials < 1:
        out.append(f"[run] trials must be >= 1, got {run.trials}")
    if run.phase_points < 64:
        out.append(f"[run] phase_points must be >= 64, got {run.phase_points}")
    if run.q_points < 3:
        out.append(f"[run] q_points must be >= 3, got {run.q_points}")
    if run.q_extent is not None and run.q_extent <= 0:
        out.append(f"[run] q_extent must be > 0, got {run.q_extent}")
    if any(n < 0 for n in run.qfunc_N):
        out.append("[run] qfunc_N entries must be >= 0")
    if run.probe_n0 < 0:
        out.append(f"[run] probe_n0 must be >= 0, got {run.probe_n0}")
    if run.sweep_axis not in ("N", "g"):
        out.append(f"[run] sweep_axis must be 'N' or 'g', got {run.sweep_axis!r}")
    if run.format not in ("csv", "jsonl"):
        out.append(f"[run] format must be 'csv' or 'jsonl', got {run.format!r}")
    return out


def _check_device(dev: DeviceSection) -> list[str]:
    out = []
    try:
        narrow, wide = dev.wires()
        optical = OpticalParams(dev.photon_energy_mev)
        ElectronParams(dev.wavenumber_per_nm)
    except QNDError as exc:
        return [f"[device] {exc}"]
    check = validate_frequency_window(narrow, wide, optical)
    if not check.ok:
        out.append(f"[device] frequency window violated: {check.message}")
        return out
    try:
        ExperimentConfig(device=dev).coupling()
    except QNDError as exc:
        out.append(f"[device] {exc}")
    return out
