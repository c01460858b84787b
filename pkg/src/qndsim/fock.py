"""Truncated Fock-space states of a single light mode.

States are immutable values: the amplitude / element arrays are made
read-only on construction so they can be shared between workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln, pdtrc

from .errors import DomainError, TruncationError

NORM_TOL = 1e-12
COHERENT_TAIL_TOL = 1e-12


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PhotonPureState:
    """Pure state sum_n a_n |n> for n = 0..n_max."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amps = _frozen(self.amplitudes)
        if amps.ndim != 1 or amps.size == 0:
            raise DomainError("amplitudes must be a non-empty 1-d vector")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise DomainError(f"state not normalized: sum |a_n|^2 = {norm!r}")
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def from_amplitudes(cls, amplitudes) -> PhotonPureState:
        """Build a state from arbitrary (nonzero) amplitudes, normalizing them."""
        amps = np.asarray(amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(amps)
        if not np.isfinite(norm) or norm == 0.0:
            raise DomainError("cannot normalize a zero or non-finite vector")
        return cls(amps / norm)

    @property
    def n_max(self) -> int:
        return self.amplitudes.size - 1

    @property
    def dim(self) -> int:
        return self.amplitudes.size

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def to_density(self) -> PhotonDensityMatrix:
        a = self.amplitudes
        return PhotonDensityMatrix(np.outer(a, a.conj()))


@dataclass(frozen=True, eq=False)
class PhotonDensityMatrix:
    """Hermitian, unit-trace density matrix rho_mn over n = 0..n_max."""

    elements: np.ndarray

    def __post_init__(self):
        rho = _frozen(self.elements)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1] or rho.shape[0] == 0:
            raise DomainError("density matrix must be square and non-empty")
        herm = np.max(np.abs(rho - rho.conj().T))
        if herm > NORM_TOL:
            raise DomainError(f"density matrix not Hermitian (residual {herm:.3g})")
        tr = np.trace(rho).real
        if abs(tr - 1.0) > NORM_TOL:
            raise DomainError(f"density matrix trace {tr!r} != 1")
        if np.min(np.diag(rho).real) < -NORM_TOL:
            raise DomainError("density matrix has negative populations")
        object.__setattr__(self, "elements", rho)

    @property
    def n_max(self) -> int:
        return self.elements.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.elements.shape[0]

    def probabilities(self) -> np.ndarray:
        return np.diag(self.elements).real.copy()

    def purity(self) -> float:
        rho = self.elements
        return float(np.vdot(rho, rho).real)


@dataclass(frozen=True)
class CoherentSpec:
    xi: complex

    @property
    def mean_number(self) -> float:
        return abs(self.xi) ** 2


def coherent_n_max(xi: complex) -> int:
    """Default truncation for a coherent amplitude: |xi|^2 + 10 sqrt(|xi|^2 + 1) + 20."""
    lam = abs(xi) ** 2
    return int(math.ceil(lam + 10.0 * math.sqrt(lam + 1.0) + 20.0))


def _poisson_tail(n_max: int, lam: float) -> float:
    # P(n > n_max) for a Poisson law of mean lam
    if lam == 0.0:
        return 0.0
    return float(pdtrc(n_max, lam))


def make_number_state(n0: int, n_max: int) -> PhotonPureState:
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    if not 0 <= n0 <= n_max:
        raise DomainError(f"number state n0={n0} outside 0..{n_max}")
    amps = np.zeros(n_max + 1, dtype=np.complex128)
    amps[n0] = 1.0
    return PhotonPureState(amps)


def coherent_amplitudes(xi: complex, n_max: int) -> np.ndarray:
    """Unnormalized amplitudes exp(-|xi|^2/2) xi^n / sqrt(n!), evaluated in log space."""
    n = np.arange(n_max + 1)
    xi = complex(xi)
    if xi == 0:
        amps = np.zeros(n_max + 1, dtype=np.complex128)
        amps[0] = 1.0
        return amps
    r, theta = abs(xi), np.angle(xi)
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * gammaln(n + 1)
    return np.exp(log_mag) * np.exp(1j * theta * n)


def make_coherent_state(spec: CoherentSpec | complex, n_max: int | None = None) -> PhotonPureState:
    """Coherent state |xi>, truncated at n_max and renormalized.

    Raises TruncationError when more than 1e-12 of the Poisson mass lies above
    n_max; the error carries the smallest admissible n_max.
    """
    xi = spec.xi if isinstance(spec, CoherentSpec) else complex(spec)
    if n_max is None:
        n_max = coherent_n_max(xi)
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    lam = abs(xi) ** 2
    tail = _poisson_tail(n_max, lam)
    if tail >= COHERENT_TAIL_TOL:
        required = n_max
        while _poisson_tail(required, lam) >= COHERENT_TAIL_TOL:
            required += 1
        raise TruncationError(
            f"coherent xi={xi} loses {tail:.3g} of its mass above n_max={n_max}; "
            f"need n_max >= {required}",
            required_n_max=required,
        )
    return PhotonPureState.from_amplitudes(coherent_amplitudes(xi, n_max))


def _populations(state) -> np.ndarray:
    if isinstance(state, (PhotonPureState, PhotonDensityMatrix)):
        return state.probabilities()
    raise DomainError(f"expected a photon state, got {type(state).__name__}")


def number_moments(state) -> tuple[float, float]:
    """Mean and variance of the photon number."""
    p = _populations(state)
    n = np.arange(p.size, dtype=float)
    mean = float(np.dot(n, p))
    var = float(np.dot((n - mean) ** 2, p))
    return mean, var


def fidelity(a, b) -> float:
    """|<a|b>|^2 for two pure states, <a|rho|a> when one side is mixed.

    Mixed-mixed pairs use the Uhlmann fidelity.
    """
    if a.dim != b.dim:
        raise DomainError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if isinstance(a, PhotonDensityMatrix) and isinstance(b, PhotonPureState):
        a, b = b, a
    if isinstance(a, PhotonPureState) and isinstance(b, PhotonPureState):
        f = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    elif isinstance(a, PhotonPureState):
        v = a.amplitudes
        f = np.vdot(v, b.elements @ v).real
    else:
        from scipy.linalg import sqrtm

        sa = sqrtm(a.elements)
        f = np.trace(sqrtm(sa @ b.elements @ sa)).real ** 2
    return float(min(max(f, 0.0), 1.0))
