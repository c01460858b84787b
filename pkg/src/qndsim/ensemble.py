"""Outcome-averaged photon state after N electrons.

Averaging the conditioned states over all counts multiplies each coherence
rho_mn by (exp(i zeta_N d)/2 + exp(i zeta_W d)/2)^N with d = m - n, leaving
the populations untouched.
"""

from __future__ import annotations

import numpy as np
from scipy.special import gammaln

from .collision import KrausPair
from .device import CouplingConstants
from .errors import DomainError
from .fock import PhotonDensityMatrix, PhotonPureState

SUM_ORACLE_MAX_N = 64


def complex_power(z: np.ndarray, exponent: int) -> np.ndarray:
    """Elementwise z**exponent by repeated squaring (exponent >= 0)."""
    if exponent < 0:
        raise DomainError(f"exponent must be >= 0, got {exponent}")
    base = np.array(z, dtype=np.complex128, copy=True)
    result = np.ones_like(base)
    k = exponent
    while k:
        if k & 1:
            result *= base
        k >>= 1
        if k:
            base *= base
    return result


def decoherence_factors(coupling: CouplingConstants, n_max: int, N: int) -> np.ndarray:
    """Multiplier for coherences at offsets d = 0..n_max."""
    d = np.arange(n_max + 1, dtype=float)
    per_electron = 0.5 * np.exp(1j * coupling.zeta_N * d) + 0.5 * np.exp(1j * coupling.zeta_W * d)
    factors = complex_power(per_electron, N)
    factors[0] = 1.0
    return factors


def density_after_collisions_closed(
    initial: PhotonPureState, coupling: CouplingConstants, N: int
) -> PhotonDensityMatrix:
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    a = initial.amplitudes
    dim = a.size
    factors = decoherence_factors(coupling, dim - 1, N)
    m, n = np.indices((dim, dim))
    d = m - n
    f = np.where(d >= 0, factors[np.abs(d)], factors[np.abs(d)].conj())
    rho = np.outer(a, a.conj()) * f
    np.fill_diagonal(rho, np.abs(a) ** 2)
    return PhotonDensityMatrix(rho)


def density_after_collisions_sum(
    initial: PhotonPureState, kraus: KrausPair, N: int
) -> PhotonDensityMatrix:
    """Brute-force sum over N+ of P(N+, N-) |psi''><psi''|.

    Kept as an independent check on the closed form; limited to N <= 64.
    """
    if N < 0:
        raise DomainError(f"N must be >= 0, got {N}")
    if N > SUM_ORACLE_MAX_N:
        raise DomainError(f"outcome-sum oracle supports N <= {SUM_ORACLE_MAX_N}, got {N}")
    if initial.dim != kraus.dim:
        raise DomainError(f"state dimension {initial.dim} != Kraus dimension {kraus.dim}")
    a = initial.amplitudes
    rho = np.zeros((a.size, a.size), dtype=np.complex128)
    for k in range(N + 1):
        # sqrt(binom) * a_n C+^k C-^(N-k); P |psi''><psi''| is the outer product of this
        weight = np.exp(0.5 * (gammaln(N + 1) - gammaln(k + 1) - gammaln(N - k + 1)))
        v = weight * a * kraus.c_plus**k * kraus.c_minus ** (N - k)
        rho += np.outer(v, v.conj())
    return PhotonDensityMatrix(rho)


def ensemble_number_distribution(rho: PhotonDensityMatrix) -> np.ndarray:
    return rho.probabilities()


def mean_currents(state, kraus: KrausPair) -> tuple[float, float]:
    """Per-electron probabilities of the + and - channels, 1/2 [1 +/- <cos(g n + theta0)>]."""
    p = state.probabilities()
    if p.size != kraus.dim:
        raise DomainError(f"state dimension {p.size} != Kraus dimension {kraus.dim}")
    return float(np.dot(p, np.abs(kraus.c_plus) ** 2)), float(np.dot(p, np.abs(kraus.c_minus) ** 2))
