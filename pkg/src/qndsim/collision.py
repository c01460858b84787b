"""Per-electron back-action on the photon state.

An electron leaving the interferometer in channel +/- multiplies the photon
amplitude a_n by C_{n+/-}.  The coefficients are diagonal in n, so conditioning
on a whole record only depends on the counts (N+, N-).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammaln

from .device import CouplingConstants
from .errors import ConditioningError, DomainError
from .fock import PhotonPureState

MIN_PROBABILITY = 1e-300
_LOG_MIN_PROBABILITY = math.log(MIN_PROBABILITY)


class Outcome(enum.Enum):
    PLUS = "+"
    MINUS = "-"


@dataclass(frozen=True, eq=False)
class KrausPair:
    c_plus: np.ndarray
    c_minus: np.ndarray
    coupling: CouplingConstants

    @property
    def dim(self) -> int:
        return self.c_plus.size

    def coefficients(self, outcome: Outcome) -> np.ndarray:
        return self.c_plus if outcome is Outcome.PLUS else self.c_minus


@dataclass(frozen=True)
class CountRecord:
    n_plus: int
    n_minus: int

    def __post_init__(self):
        if self.n_plus < 0 or self.n_minus < 0:
            raise DomainError(f"negative counts: {self.n_plus}, {self.n_minus}")

    @property
    def total(self) -> int:
        return self.n_plus + self.n_minus


def kraus_coefficients(coupling: CouplingConstants, n_max: int) -> KrausPair:
    """C_{n+/-} = [exp(i(zeta_N n + theta0/2)) +/- exp(i(zeta_W n - theta0/2))] / 2.

    The converter phase is split evenly between the arms so that
    |C_{n+/-}|^2 = [1 +/- cos(g n + theta0)] / 2.
    """
    if n_max < 0:
        raise DomainError(f"n_max must be >= 0, got {n_max}")
    n = np.arange(n_max + 1, dtype=float)
    arm_n = np.exp(1j * (coupling.zeta_N * n + 0.5 * coupling.theta0))
    arm_w = np.exp(1j * (coupling.zeta_W * n - 0.5 * coupling.theta0))
    c_plus = 0.5 * (arm_n + arm_w)
    c_minus = 0.5 * (arm_n - arm_w)
    c_plus.setflags(write=False)
    c_minus.setflags(write=False)
    return KrausPair(c_plus, c_minus, coupling)


def _check_dims(state: PhotonPureState, kraus: KrausPair):
    if state.dim != kraus.dim:
        raise DomainError(f"state dimension {state.dim} != Kraus dimension {kraus.dim}")


def outcome_probabilities(state: PhotonPureState, kraus: KrausPair) -> tuple[float, float]:
    _check_dims(state, kraus)
    p = state.probabilities()
    p_plus = float(np.dot(p, np.abs(kraus.c_plus) ** 2))
    p_minus = float(np.dot(p, np.abs(kraus.c_minus) ** 2))
    return p_plus, p_minus


def apply_outcome(
    state: PhotonPureState, kraus: KrausPair, outcome: Outcome
) -> tuple[PhotonPureState, float]:
    """Condition on a single electron found in ``outcome``."""
    _check_dims(state, kraus)
    p_plus, p_minus = outcome_probabilities(state, kraus)
    prob = p_plus if outcome is Outcome.PLUS else p_minus
    if prob <= MIN_PROBABILITY:
        raise ConditioningError(f"outcome {outcome.value} has probability {prob:.3g}")
    post = state.amplitudes * kraus.coefficients(outcome)
    return PhotonPureState.from_amplitudes(post), prob


def _log_binom(n: int, k: int) -> float:
    return float(gammaln(n + 1) - gammaln(k + 1) - gammaln(n - k + 1))


def _log_power(c: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    """log|c^k| and arg(c^k); 0^0 = 1."""
    if k == 0:
        return np.zeros(c.size), np.zeros(c.size)
    with np.errstate(divide="ignore"):
        return k * np.log(np.abs(c)), k * np.angle(c)


def _log_weights(state: PhotonPureState, kraus: KrausPair, counts: CountRecord):
    """log|a_n C+^N+ C-^N-| and its phase, per n."""
    _check_dims(state, kraus)
    a = state.amplitudes
    with np.errstate(divide="ignore"):
        log_a = np.log(np.abs(a))
    lp, ap = _log_power(kraus.c_plus, counts.n_plus)
    lm, am = _log_power(kraus.c_minus, counts.n_minus)
    return log_a + lp + lm, np.angle(a) + ap + am


def _log_sum_exp(x: np.ndarray) -> float:
    top = np.max(x)
    if not np.isfinite(top):
        return -math.inf
    return float(top + math.log(np.sum(np.exp(x - top))))


def batch_log_probability(state: PhotonPureState, kraus: KrausPair, counts: CountRecord) -> float:
    log_mag, _ = _log_weights(state, kraus, counts)
    return _log_binom(counts.total, counts.n_plus) + _log_sum_exp(2.0 * log_mag)


def batch_probability(state: PhotonPureState, kraus: KrausPair, counts: CountRecord) -> float:
    """P(N+, N-) = binom(N, N+) sum_n |a_n|^2 |C_n+|^(2N+) |C_n-|^(2N-)."""
    return math.exp(batch_log_probability(state, kraus, counts))


def _check_conditionable(state, kraus, counts) -> float:
    log_p = batch_log_probability(state, kraus, counts)
    if log_p <= _LOG_MIN_PROBABILITY:
        raise ConditioningError(
            f"counts ({counts.n_plus}, {counts.n_minus}) have probability exp({log_p:.4g})"
        )
    return log_p


def batch_posterior(state: PhotonPureState, kraus: KrausPair, counts: CountRecord) -> PhotonPureState:
    """Photon state after N+ electrons in + and N- in -, in one step."""
    _check_conditionable(state, kraus, counts)
    log_mag, phase = _log_weights(state, kraus, counts)
    amps = np.exp(log_mag - np.max(log_mag)) * np.exp(1j * phase)
    return PhotonPureState.from_amplitudes(amps)


def posterior_number_distribution(
    state: PhotonPureState, kraus: KrausPair, counts: CountRecord
) -> np.ndarray:
    _check_conditionable(state, kraus, counts)
    log_mag, _ = _log_weights(state, kraus, counts)
    w = np.exp(2.0 * (log_mag - np.max(log_mag)))
    return w / w.sum()


def sequential_posterior(state: PhotonPureState, kraus: KrausPair, outcomes) -> PhotonPureState:
    """Apply a sequence of single-electron outcomes in order."""
    for outcome in outcomes:
        state, _ = apply_outcome(state, kraus, outcome)
    return state
