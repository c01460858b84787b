"""Monte Carlo electron counting and photon-number estimation.

Each trial sends N electrons one at a time through the interferometer,
drawing every outcome from the current posterior and conditioning on it.
Trial t draws its uniforms from SeedSequence(master_seed, spawn_key=(t,)),
so records do not depend on chunking or on the number of workers.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .collision import CountRecord, KrausPair
from .device import CouplingConstants
from .errors import ConfigurationError, DomainError, EstimatorUndefinedError
from .fock import PhotonPureState


class BranchWarning(UserWarning):
    """Counts fall at the edge of the estimator's principal branch."""


@dataclass(frozen=True)
class TrajectoryRecord:
    master_seed: int
    trial_index: int
    counts: CountRecord
    estimate: float | None
    posterior_number_variance: float
    branch_edge: bool = False
    outcomes: str | None = None

    def to_dict(self) -> dict:
        d = {
            "master_seed": self.master_seed,
            "trial_index": self.trial_index,
            "n_plus": self.counts.n_plus,
            "n_minus": self.counts.n_minus,
            "estimate": self.estimate,
            "posterior_number_variance": self.posterior_number_variance,
            "branch_edge": self.branch_edge,
        }
        if self.outcomes is not None:
            d["outcomes"] = self.outcomes
        return d


@dataclass(frozen=True)
class ErrorReport:
    N: int
    g: float
    empirical_error_variance: float
    predicted: float
    ratio: float
    trials: int = 0
    n0: int = 0
    mean_estimate: float = float("nan")


def trial_uniforms(master_seed: int, trial_index: int, N: int) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(master_seed, spawn_key=(trial_index,)))
    return rng.random(N)


def _clamped_fraction(counts: CountRecord, eps: float | None) -> tuple[float, bool]:
    N = counts.total
    x = 2.0 * counts.n_plus / N - 1.0
    if eps is None:
        eps = 1.0 / (2.0 * N)
    lo, hi = -1.0 + eps, 1.0 - eps
    clamped = min(max(x, lo), hi)
    return clamped, clamped != x


def estimate_n(
    counts: CountRecord, coupling: CouplingConstants, eps: float | None = None, warn: bool = True
) -> float:
    """Invert 2 N+/N - 1 = cos(g n + theta0) on the branch centred at mid-fringe.

    At theta0 = -pi/2 this is n = arcsin(2 N+/N - 1) / g.  The fraction is
    clamped into (-1 + eps, 1 - eps); eps defaults to half a count, 1/(2N).
    """
    if coupling.g == 0.0:
        raise EstimatorUndefinedError("g = 0: identical wires carry no photon-number information")
    if counts.total < 1:
        raise DomainError("need at least one electron to estimate n")
    x, edge = _clamped_fraction(counts, eps)
    if edge and warn:
        warnings.warn(
            f"counts ({counts.n_plus}, {counts.n_minus}) sit at the branch edge; estimate clamped",
            BranchWarning,
            stacklevel=2,
        )
    return (math.asin(x) - coupling.theta0 - math.pi / 2) / coupling.g


def _run_chunk(amps0, c_plus, c_minus, N, seeds, master_seed, coupling, keep_outcomes):
    trials = len(seeds)
    u = np.stack([trial_uniforms(master_seed, t, N) for t in seeds])
    amps = np.tile(amps0, (trials, 1))
    w_plus = np.abs(c_plus) ** 2
    n_plus = np.zeros(trials, dtype=np.int64)
    record = np.empty((trials, N), dtype=bool) if keep_outcomes else None
    for j in range(N):
        probs = amps.real**2 + amps.imag**2
        p_plus = (probs * w_plus).sum(axis=1)
        plus = u[:, j] < p_plus
        n_plus += plus
        if keep_outcomes:
            record[:, j] = plus
        amps = amps * np.where(plus[:, None], c_plus, c_minus)
        amps /= np.sqrt((amps.real**2 + amps.imag**2).sum(axis=1))[:, None]

    probs = amps.real**2 + amps.imag**2
    n = np.arange(amps.shape[1], dtype=float)
    means = (probs * n).sum(axis=1)
    variances = (probs * (n - means[:, None]) ** 2).sum(axis=1)

    out = []
    for i, t in enumerate(seeds):
        counts = CountRecord(int(n_plus[i]), int(N - n_plus[i]))
        if coupling.g == 0.0:
            est, edge = None, False
        else:
            _, edge = _clamped_fraction(counts, None)
            est = estimate_n(counts, coupling, warn=False)
        outcomes = "".join("+" if b else "-" for b in record[i]) if keep_outcomes else None
        out.append(
            TrajectoryRecord(master_seed, t, counts, est, float(variances[i]), edge, outcomes)
        )
    return out


def simulate_trajectories(
    state: PhotonPureState,
    kraus: KrausPair,
    N: int,
    trials: int,
    master_seed: int,
    chunk_size: int = 256,
    workers: int = 1,
    keep_outcomes: bool = False,
) -> list[TrajectoryRecord]:
    if N < 1 or trials < 1:
        raise DomainError(f"need N >= 1 and trials >= 1, got N={N}, trials={trials}")
    if state.dim != kraus.dim:
        raise DomainError(f"state dimension {state.dim} != Kraus dimension {kraus.dim}")
    chunks = [list(range(s, min(s + chunk_size, trials))) for s in range(0, trials, chunk_size)]
    args = (state.amplitudes, kraus.c_plus, kraus.c_minus, N)
    tail = (master_seed, kraus.coupling, keep_outcomes)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda seeds: _run_chunk(*args, seeds, *tail), chunks))
    else:
        parts = [_run_chunk(*args, seeds, *tail) for seeds in chunks]
    return [rec for part in parts for rec in part]


def _number_state_index(state: PhotonPureState) -> int:
    p = state.probabilities()
    n0 = int(np.argmax(p))
    if abs(p[n0] - 1.0) > 1e-12:
        raise ConfigurationError("error-law check needs a number-state input")
    return n0


def empirical_measurement_error(
    state: PhotonPureState,
    kraus: KrausPair,
    N: int,
    trials: int,
    seed: int,
    **sim_kwargs,
) -> ErrorReport:
    """Spread of the estimate over repeated measurements of a number state."""
    g = kraus.coupling.g
    n0 = _number_state_index(state)
    problems = []
    if g == 0.0:
        problems.append("g = 0: estimator undefined")
    elif abs(g * n0) >= math.pi / 4:
        problems.append(f"|g n0| = {abs(g * n0):.4g} must be < pi/4")
    if N < 100:
        problems.append(f"N = {N} too small for the linearised error law (need >= 100)")
    if trials < 2:
        problems.append("need at least 2 trials")
    if problems:
        raise ConfigurationError("; ".join(problems), problems)
    records = simulate_trajectories(state, kraus, N, trials, seed, **sim_kwargs)
    est = np.array([r.estimate for r in records])
    var = float(np.var(est, ddof=1))
    predicted = 1.0 / (g * g * N)
    return ErrorReport(N, g, var, predicted, var / predicted, trials, n0, float(est.mean()))


def predicted_error_variance(g: float, N: int) -> float:
    return 1.0 / (g * g * N)


def uncertainty_product(error: ErrorReport, backaction: float) -> float:
    return error.empirical_error_variance * backaction


def analytic_uncertainty_product(g: float, N: int) -> float:
    """(1/(g^2 N)) * (N g^2 / 4), evaluated in exact rational arithmetic."""
    G, n = Fraction(g), Fraction(N)
    if G == 0 or n == 0:
        raise DomainError("g and N must be nonzero")
    return float((1 / (G * G * n)) * (n * G * G / 4))
