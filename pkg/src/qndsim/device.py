"""Device physics front end: wire geometry -> dimensionless coupling constants.

Public inputs use nm, meV, m*/m_e and 1/nm.  Internally everything is
expressed in meV and nm; the Gaussian-unit charge enters as e^2 in meV*nm.
Each wire is an infinite square well in z, so subband energies and the
intersubband dipole element have closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy import constants as _c

from .errors import ConfigurationError, DomainError, ResonanceError

# hbar^2 / m_e in meV nm^2
HBAR2_OVER_ME = _c.hbar**2 / _c.m_e / _c.e * 1e21
# e^2 (Gaussian units, e^2 / 4 pi eps0 in SI) in meV nm
E2_GAUSSIAN = _c.e / (4 * _c.pi * _c.epsilon_0) * 1e12

DEFAULT_RESONANCE_FLOOR_MEV = 0.1


@dataclass(frozen=True)
class WireParams:
    """One quantum wire.

    ``center_x_intensity`` is the mode intensity integrated along the wire axis
    at the wire centre, in 1/nm^2.
    """

    well_width: float
    effective_mass_ratio: float
    center_x_intensity: float

    def __post_init__(self):
        if not self.well_width > 0:
            raise DomainError(f"well_width must be > 0, got {self.well_width}")
        if not self.effective_mass_ratio > 0:
            raise DomainError(f"effective_mass_ratio must be > 0, got {self.effective_mass_ratio}")
        if not self.center_x_intensity >= 0:
            raise DomainError(f"center_x_intensity must be >= 0, got {self.center_x_intensity}")


@dataclass(frozen=True)
class OpticalParams:
    photon_energy: float  # meV

    def __post_init__(self):
        if not self.photon_energy > 0:
            raise DomainError(f"photon_energy must be > 0, got {self.photon_energy}")


@dataclass(frozen=True)
class ElectronParams:
    wavenumber: float  # 1/nm

    def __post_init__(self):
        if not self.wavenumber > 0:
            raise DomainError(f"wavenumber must be > 0, got {self.wavenumber}")


@dataclass(frozen=True)
class CouplingConstants:
    """Phase per photon in the narrow and wide arms, plus the converter phase."""

    zeta_N: float
    zeta_W: float
    theta0: float = -math.pi / 2

    @property
    def g(self) -> float:
        return self.zeta_N - self.zeta_W

    @classmethod
    def symmetric(cls, g: float, theta0: float = -math.pi / 2) -> CouplingConstants:
        """zeta_N = -zeta_W = g/2."""
        return cls(g / 2.0, -g / 2.0, theta0)

    def with_g(self, g: float) -> CouplingConstants:
        """Same mean arm phase, new difference g."""
        mean = 0.5 * (self.zeta_N + self.zeta_W)
        return CouplingConstants(mean + g / 2.0, mean - g / 2.0, self.theta0)


def subband_energies(wire: WireParams) -> tuple[float, float]:
    """Lowest two levels j^2 pi^2 hbar^2 / (2 m* W^2), in meV."""
    e1 = math.pi**2 * HBAR2_OVER_ME / (2.0 * wire.effective_mass_ratio * wire.well_width**2)
    return e1, 4.0 * e1


def dipole_matrix_element(wire: WireParams) -> float:
    """<phi_b| z |phi_a> in nm.

    The sign of phi_b is chosen so the element is positive: 16 W / (9 pi^2).
    """
    return 16.0 * wire.well_width / (9.0 * math.pi**2)


def detuning(eps_a: float, eps_b: float, optical: OpticalParams) -> float:
    return eps_b - eps_a - optical.photon_energy


def coupling_zeta(
    wire: WireParams,
    optical: OpticalParams,
    electron: ElectronParams,
    resonance_floor: float = DEFAULT_RESONANCE_FLOOR_MEV,
) -> float:
    """Dimensionless phase shift per photon for one wire.

    zeta = [2 pi hbar w |<b|ez|a>|^2 / Delta] / (hbar^2 k / m*) * int |u|^2 dx
    """
    eps_a, eps_b = subband_energies(wire)
    delta = detuning(eps_a, eps_b, optical)
    if abs(delta) < resonance_floor:
        raise ResonanceError(
            f"|detuning| = {abs(delta):.4g} meV is below the floor {resonance_floor} meV"
        )
    z_ba = dipole_matrix_element(wire)
    # meV * (meV nm) * nm^2 / meV -> meV nm^3
    numerator = 2.0 * math.pi * optical.photon_energy * E2_GAUSSIAN * z_ba**2 / delta
    # hbar^2 k / m*  in meV nm
    group = HBAR2_OVER_ME * electron.wavenumber / wire.effective_mass_ratio
    return numerator / group * wire.center_x_intensity


@dataclass(frozen=True)
class WindowCheck:
    ok: bool
    narrow_gap: float
    wide_gap: float
    photon_energy: float
    message: str = field(default="")

    def __bool__(self) -> bool:
        return self.ok


def validate_frequency_window(
    narrow: WireParams, wide: WireParams, optical: OpticalParams
) -> WindowCheck:
    """Check eps_b^W - eps_a^W < hbar w < eps_b^N - eps_a^N (no real absorption)."""
    a_n, b_n = subband_energies(narrow)
    a_w, b_w = subband_energies(wide)
    gap_n, gap_w = b_n - a_n, b_w - a_w
    hw = optical.photon_energy
    ok = bool(gap_w < hw < gap_n)
    msg = (
        f"eps_b^W - eps_a^W < hbar*omega < eps_b^N - eps_a^N: "
        f"{gap_w:.6g} < {hw:.6g} < {gap_n:.6g} meV is {'satisfied' if ok else 'violated'}"
    )
    return WindowCheck(ok, gap_n, gap_w, hw, msg)


def build_coupling(
    narrow: WireParams,
    wide: WireParams,
    optical: OpticalParams,
    electron: ElectronParams,
    theta0: float = -math.pi / 2,
    resonance_floor: float = DEFAULT_RESONANCE_FLOOR_MEV,
) -> CouplingConstants:
    check = validate_frequency_window(narrow, wide, optical)
    if not check.ok:
        raise ConfigurationError(f"frequency window violated: {check.message}")
    try:
        zeta_n = coupling_zeta(narrow, optical, electron, resonance_floor)
        zeta_w = coupling_zeta(wide, optical, electron, resonance_floor)
    except ResonanceError as exc:
        raise ConfigurationError(str(exc)) from exc
    coupling = CouplingConstants(zeta_n, zeta_w, theta0)
    if coupling.g == 0.0:
        raise ConfigurationError("wires give g = 0; the interferometer carries no information")
    return coupling
