import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.stats import binom

from qndsim.collision import (
    CountRecord,
    Outcome,
    apply_outcome,
    batch_posterior,
    batch_probability,
    kraus_coefficients,
    outcome_probabilities,
    posterior_number_distribution,
    sequential_posterior,
)
from qndsim.device import CouplingConstants
from qndsim.errors import ConditioningError, DomainError
from qndsim.fock import fidelity, make_coherent_state, make_number_state, number_moments

from conftest import couplings, pure_states, random_coupling, random_state

PLUS, MINUS = Outcome.PLUS, Outcome.MINUS


def test_identical_wire_limit():
    k = kraus_coefficients(CouplingConstants(0.3, 0.3, 0.0), 10)
    np.testing.assert_allclose(np.abs(k.c_plus), 1.0, atol=1e-15)
    assert np.all(k.c_minus == 0)


def test_mid_fringe_weights():
    g = 0.37
    k = kraus_coefficients(CouplingConstants.symmetric(g, -math.pi / 2), 20)
    n = np.arange(21)
    np.testing.assert_allclose(np.abs(k.c_plus) ** 2, (1 + np.sin(g * n)) / 2, atol=1e-14)


@settings(max_examples=100, deadline=None)
@given(couplings, st.integers(0, 60))
def test_completeness(coupling, n_max):
    k = kraus_coefficients(coupling, n_max)
    total = np.abs(k.c_plus) ** 2 + np.abs(k.c_minus) ** 2
    assert np.max(np.abs(total - 1)) < 1e-12


@pytest.mark.parametrize("n0", [0, 3, 17])
@pytest.mark.parametrize("theta0", [-math.pi / 2, 0.0, 1.1])
def test_number_state_current_law(n0, theta0):
    c = CouplingConstants(0.07, -0.05, theta0)
    p_plus, p_minus = outcome_probabilities(make_number_state(n0, 20), kraus_coefficients(c, 20))
    assert p_plus == pytest.approx(0.5 * (1 + math.cos(c.g * n0 + theta0)), abs=1e-14)
    assert p_plus + p_minus == pytest.approx(1.0, abs=1e-12)


def test_vacuum_theta0_zero():
    k = kraus_coefficients(CouplingConstants(0.1, -0.1, 0.0), 5)
    assert outcome_probabilities(make_number_state(0, 5), k) == pytest.approx((1.0, 0.0), abs=1e-15)


def test_coherent_probability_brute_force():
    c = CouplingConstants.symmetric(0.1, -math.pi / 2)
    s = make_coherent_state(2.0)
    k = kraus_coefficients(c, s.n_max)
    p_plus, _ = outcome_probabilities(s, k)
    brute = 0.0
    for n, a in enumerate(s.amplitudes):
        cp = (np.exp(1j * (c.zeta_N * n + c.theta0 / 2)) + np.exp(1j * (c.zeta_W * n - c.theta0 / 2))) / 2
        brute += abs(a) ** 2 * abs(cp) ** 2
    assert p_plus == pytest.approx(brute, abs=1e-12)
    mean_cos = sum(abs(a) ** 2 * math.cos(c.g * n + c.theta0) for n, a in enumerate(s.amplitudes))
    assert p_plus == pytest.approx(0.5 * (1 + mean_cos), abs=1e-12)


def test_dimension_mismatch():
    k = kraus_coefficients(CouplingConstants.symmetric(0.1), 4)
    with pytest.raises(DomainError):
        outcome_probabilities(make_number_state(0, 5), k)


@pytest.mark.parametrize("outcome", [PLUS, MINUS])
def test_number_state_is_fixed_point_single(outcome):
    s = make_number_state(6, 10)
    post, _ = apply_outcome(s, kraus_coefficients(CouplingConstants.symmetric(0.2), 10), outcome)
    assert fidelity(post, s) == pytest.approx(1.0, abs=1e-15)


def test_zero_probability_outcome_rejected():
    k = kraus_coefficients(CouplingConstants(0.1, 0.1, 0.0), 5)
    with pytest.raises(ConditioningError):
        apply_outcome(make_number_state(2, 5), k, MINUS)


def test_posterior_normalized(rng):
    for _ in range(20):
        s = random_state(rng, 15)
        k = kraus_coefficients(random_coupling(rng), 15)
        for o in (PLUS, MINUS):
            post, _ = apply_outcome(s, k, o)
            assert abs(np.linalg.norm(post.amplitudes) - 1) < 1e-12


def test_outcomes_commute(rng):
    s = random_state(rng, 12)
    k = kraus_coefficients(random_coupling(rng), 12)
    a = sequential_posterior(s, k, [PLUS, MINUS])
    b = sequential_posterior(s, k, [MINUS, PLUS])
    assert fidelity(a, b) == pytest.approx(1.0, abs=1e-14)
    np.testing.assert_allclose(a.amplitudes, b.amplitudes, atol=1e-14)


def test_batch_single_electron_matches_apply(rng):
    s = random_state(rng, 10)
    k = kraus_coefficients(random_coupling(rng), 10)
    post, p = apply_outcome(s, k, PLUS)
    assert fidelity(batch_posterior(s, k, CountRecord(1, 0)), post) == pytest.approx(1.0, abs=1e-14)
    assert batch_probability(s, k, CountRecord(1, 0)) == pytest.approx(p, abs=1e-14)
    p_plus, p_minus = outcome_probabilities(s, k)
    assert batch_probability(s, k, CountRecord(0, 1)) == pytest.approx(p_minus, abs=1e-14)


def test_batch_matches_sequential_N20(rng):
    for _ in range(5):
        s = random_state(rng, 25)
        k = kraus_coefficients(random_coupling(rng), 25)
        n_plus = int(rng.integers(0, 21))
        order = [PLUS] * n_plus + [MINUS] * (20 - n_plus)
        rng.shuffle(order)
        seq = sequential_posterior(s, k, order)
        assert fidelity(seq, batch_posterior(s, k, CountRecord(n_plus, 20 - n_plus))) > 1 - 1e-10


@settings(max_examples=40, deadline=None)
@given(pure_states(min_dim=3, max_dim=10), couplings, st.permutations([PLUS] * 4 + [MINUS] * 3))
def test_order_independence(state, coupling, order):
    k = kraus_coefficients(coupling, state.n_max)
    try:
        batch = batch_posterior(state, k, CountRecord(4, 3))
        seq = sequential_posterior(state, k, order)
    except ConditioningError:
        return
    assert fidelity(seq, batch) > 1 - 1e-10


def test_batch_probability_is_sum_over_orderings(rng):
    """Enumerate all 2^N outcome strings and multiply stepwise probabilities."""
    N = 8
    s = random_state(rng, 8)
    k = kraus_coefficients(random_coupling(rng), 8)
    by_count = np.zeros(N + 1)
    for seq in itertools.product((PLUS, MINUS), repeat=N):
        state, prob = s, 1.0
        for o in seq:
            state, p = apply_outcome(state, k, o)
            prob *= p
        by_count[seq.count(PLUS)] += prob
    for n_plus in range(N + 1):
        assert batch_probability(s, k, CountRecord(n_plus, N - n_plus)) == pytest.approx(by_count[n_plus], abs=1e-13)


def test_batch_probability_ordering_sample_N20(rng):
    N = 20
    s = random_state(rng, 12)
    k = kraus_coefficients(random_coupling(rng), 12)
    for n_plus in (0, 5, 13, 20):
        order = [PLUS] * n_plus + [MINUS] * (N - n_plus)
        rng.shuffle(order)
        state, prob = s, 1.0
        for o in order:
            state, p = apply_outcome(state, k, o)
            prob *= p
        expected = math.comb(N, n_plus) * prob
        assert batch_probability(s, k, CountRecord(n_plus, N - n_plus)) == pytest.approx(expected, rel=1e-10)


@pytest.mark.parametrize("n0", [0, 4, 9])
def test_number_state_binomial_law(n0):
    c = CouplingConstants(0.13, -0.08, 0.4)
    s = make_number_state(n0, 12)
    k = kraus_coefficients(c, 12)
    p = abs(k.c_plus[n0]) ** 2
    N = 15
    for n_plus in range(N + 1):
        counts = CountRecord(n_plus, N - n_plus)
        assert batch_probability(s, k, counts) == pytest.approx(binom.pmf(n_plus, N, p), abs=1e-12)
        assert fidelity(batch_posterior(s, k, counts), s) == pytest.approx(1.0, abs=1e-15)


def test_probability_normalization_N25(rng):
    s = random_state(rng, 20)
    k = kraus_coefficients(random_coupling(rng), 20)
    total = math.fsum(batch_probability(s, k, CountRecord(j, 25 - j)) for j in range(26))
    assert total == pytest.approx(1.0, abs=1e-10)


def test_posterior_distribution_consistency(rng):
    s = random_state(rng, 15)
    k = kraus_coefficients(random_coupling(rng), 15)
    counts = CountRecord(9, 4)
    dist = posterior_number_distribution(s, k, counts)
    assert dist.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.all(dist >= 0)
    np.testing.assert_allclose(dist, batch_posterior(s, k, counts).probabilities(), atol=1e-12)


def test_posterior_distribution_number_state():
    s = make_number_state(3, 8)
    k = kraus_coefficients(CouplingConstants.symmetric(0.2), 8)
    np.testing.assert_allclose(posterior_number_distribution(s, k, CountRecord(5, 2)), s.probabilities(), atol=1e-15)


def test_posterior_narrows_for_coherent_input():
    g = 0.05
    c = CouplingConstants.symmetric(g)
    s = make_coherent_state(4.0)
    k = kraus_coefficients(c, s.n_max)
    _, var0 = number_moments(s)
    n_true = 16
    N = 2000
    n_plus = round(N * (1 + math.sin(g * n_true)) / 2)
    dist = posterior_number_distribution(s, k, CountRecord(n_plus, N - n_plus))
    n = np.arange(dist.size)
    mean = dist @ n
    var = dist @ (n - mean) ** 2
    assert var < var0 / 4
    assert abs(mean - n_true) < 2


def test_large_counts_do_not_underflow():
    s = make_coherent_state(10.0)
    k = kraus_coefficients(CouplingConstants.symmetric(0.01), s.n_max)
    counts = CountRecord(5300, 4700)
    post = batch_posterior(s, k, counts)
    assert abs(np.linalg.norm(post.amplitudes) - 1) < 1e-12


def test_vanishing_counts_rejected():
    s = make_number_state(0, 3)
    k = kraus_coefficients(CouplingConstants(0.2, -0.2, 0.0), 3)
    with pytest.raises(ConditioningError):
        batch_posterior(s, k, CountRecord(0, 1))
    with pytest.raises(ConditioningError):
        posterior_number_distribution(s, k, CountRecord(0, 1))
    assert batch_probability(s, k, CountRecord(0, 1)) == 0.0
