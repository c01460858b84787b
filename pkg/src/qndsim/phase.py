"""Phase observables and phase-space pictures of a photon density matrix.

Phase is the canonical (number-conjugate) phase with density
P(phi) = (1/2pi) sum_mn rho_mn exp(-i (m - n) phi), so a coherent state |xi>
peaks at phi = arg(xi), the azimuth of its cloud in the a1-a2 plane.  The
spread is the circular variance about the circular mean.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .errors import DomainError
from .fock import PhotonDensityMatrix, PhotonPureState

DEFAULT_PHASE_POINTS = 4096


def _as_density(rho) -> PhotonDensityMatrix:
    if isinstance(rho, PhotonPureState):
        return rho.to_density()
    if isinstance(rho, PhotonDensityMatrix):
        return rho
    raise DomainError(f"expected a photon state, got {type(rho).__name__}")


@dataclass(frozen=True, eq=False)
class PhaseDistribution:
    grid: np.ndarray
    density: np.ndarray

    @property
    def spacing(self) -> float:
        return 2.0 * math.pi / self.grid.size

    def total(self) -> float:
        # periodic trapezoid
        return float(self.spacing * self.density.sum())


@dataclass(frozen=True, eq=False)
class QFunctionGrid:
    a1_axis: np.ndarray
    a2_axis: np.ndarray
    values: np.ndarray  # shape (len(a2_axis), len(a1_axis))

    def total(self) -> float:
        return float(np.trapezoid(np.trapezoid(self.values, self.a1_axis, axis=1), self.a2_axis))


def phase_grid(K: int) -> np.ndarray:
    return -math.pi + 2.0 * math.pi * np.arange(K) / K


def coherence_sums(rho) -> np.ndarray:
    """c_d = sum_n rho_{n+d, n} for d = 0..n_max."""
    r = _as_density(rho).elements
    return np.array([np.trace(r, offset=-d) for d in range(r.shape[0])])


def canonical_phase_distribution(rho, K: int = DEFAULT_PHASE_POINTS) -> PhaseDistribution:
    if K < 64:
        raise DomainError(f"need at least 64 phase points, got {K}")
    c = coherence_sums(rho)
    phi = phase_grid(K)
    d = np.arange(1, c.size)
    osc = np.exp(-1j * np.outer(phi, d)) @ c[1:] if d.size else np.zeros(K)
    density = (c[0].real + 2.0 * osc.real) / (2.0 * math.pi)
    return PhaseDistribution(phi, density)


def _wrap(x: np.ndarray) -> np.ndarray:
    return (x + math.pi) % (2.0 * math.pi) - math.pi


def circular_mean(dist: PhaseDistribution) -> float:
    return float(np.angle(dist.spacing * np.dot(np.exp(1j * dist.grid), dist.density)))


def phase_variance(dist: PhaseDistribution) -> float:
    """Second moment of the phase about its circular mean, with wrap to [-pi, pi).

    Not meaningful when the mean resultant length is ~0 (no mean direction).
    """
    mu = circular_mean(dist)
    dev = _wrap(dist.grid - mu)
    return float(dist.spacing * np.dot(dev**2, dist.density))


def rotate(rho, alpha: float) -> PhotonDensityMatrix:
    """rho_mn -> rho_mn exp(i alpha (m - n)): a rigid rotation of phase space."""
    r = _as_density(rho).elements
    n = np.arange(r.shape[0])
    u = np.exp(1j * alpha * n)
    return PhotonDensityMatrix(u[:, None] * r * u.conj()[None, :])


def quadrature_moments(rho) -> tuple[float, float, float, float]:
    """Means and variances of a1 = (a + a^dag)/2 and a2 = (a - a^dag)/2i.

    Uses the untruncated ladder algebra, so the result is exact whenever the
    state has no weight near n_max.
    """
    r = _as_density(rho).elements
    n = np.arange(r.shape[0], dtype=float)
    mean_a = np.dot(np.sqrt(n[1:]), np.diagonal(r, offset=-1))
    mean_a2 = np.dot(np.sqrt(n[2:] * n[1:-1]), np.diagonal(r, offset=-2))
    mean_n = np.dot(n, np.diagonal(r).real)
    m1 = mean_a.real
    m2 = mean_a.imag
    a1_sq = (2.0 * mean_a2.real + 2.0 * mean_n + 1.0) / 4.0
    a2_sq = (-2.0 * mean_a2.real + 2.0 * mean_n + 1.0) / 4.0
    return float(m1), float(m2), float(a1_sq - m1 * m1), float(a2_sq - m2 * m2)


@dataclass(frozen=True)
class GridSpec:
    extent: float = 6.0
    points: int = 121
    center: complex = 0j

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        a1 = self.center.real + np.linspace(-self.extent, self.extent, self.points)
        a2 = self.center.imag + np.linspace(-self.extent, self.extent, self.points)
        return a1, a2


def _coherent_overlaps(alpha: np.ndarray, n_max: int) -> np.ndarray:
    """<n|alpha> for each alpha (rows) and n (columns)."""
    n = np.arange(n_max + 1)
    r = np.abs(alpha)[:, None]
    with np.errstate(divide="ignore", invalid="ignore"):
        log_mag = -0.5 * r**2 + n[None, :] * np.log(r) - 0.5 * gammaln(n + 1)[None, :]
    mag = np.exp(log_mag)
    mag[:, 0] = np.exp(-0.5 * r[:, 0] ** 2)
    return mag * np.exp(1j * np.angle(alpha)[:, None] * n[None, :])


def husimi_q(rho, grid: GridSpec | None = None) -> QFunctionGrid:
    """Q(alpha) = <alpha|rho|alpha>/pi on a square grid in the a1-a2 plane."""
    grid = grid or GridSpec()
    r = _as_density(rho).elements
    a1, a2 = grid.axes()
    alpha = (a1[None, :] + 1j * a2[:, None]).ravel()
    vecs = _coherent_overlaps(alpha, r.shape[0] - 1)
    q = np.einsum("pm,mn,pn->p", vecs.conj(), r, vecs, optimize=True).real / math.pi
    return QFunctionGrid(a1, a2, q.reshape(a2.size, a1.size))


def count_clouds(q: QFunctionGrid, threshold: float = 0.5) -> int:
    """Number of strict local maxima of Q above ``threshold`` times the global peak."""
    v = q.values
    top = v.max()
    padded = np.pad(v, 1, mode="constant", constant_values=-np.inf)
    core = padded[1:-1, 1:-1]
    is_max = np.ones_like(v, dtype=bool)
    for di in (-1, 0, 1):
        for dj in (-1, 0, 1):
            if di == 0 and dj == 0:
                continue
            neighbour = padded[1 + di : padded.shape[0] - 1 + di, 1 + dj : padded.shape[1] - 1 + dj]
            is_max &= core > neighbour
    return int(np.count_nonzero(is_max & (v > threshold * top)))


def backaction_noise(rho_init, rho_final, K: int = DEFAULT_PHASE_POINTS) -> float:
    """Increase in circular phase variance from the initial to the final state."""
    v0 = phase_variance(canonical_phase_distribution(rho_init, K))
    v1 = phase_variance(canonical_phase_distribution(rho_final, K))
    return v1 - v0


def predicted_backaction(g: float, N: int) -> float:
    return N * g * g / 4.0


def no_wrap(rho, K: int = DEFAULT_PHASE_POINTS) -> bool:
    """True while 3 standard deviations of phase stay inside (-pi, pi)."""
    return 3.0 * math.sqrt(phase_variance(canonical_phase_distribution(rho, K))) < math.pi
