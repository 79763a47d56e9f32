# tests/test_consensus.py

"""Column-wise ML consensus and its exact error rate."""

import math

import numpy as np
import pytest

from src.acquisition.channel import NoiseChannel, identity_channel, symmetric_channel
from src.acquisition.genome import BaseDistribution
from src.processing.alignment import KmerCluster
from src.processing.consensus import consensus_error_rate, ml_codes, ml_consensus
from src.processing.kmers import KmerEntry


def _column(channel, symbols):
    return np.array([[channel.output_alphabet.index(y)] for y in symbols])


def test_majority_column(channel_01):
    assert ml_codes(_column(channel_01, "AAC"), channel_01).tolist() == [0]


def test_ties_go_to_the_first_base(channel_01):
    assert ml_codes(_column(channel_01, "AC"), channel_01).tolist() == [0]
    assert ml_codes(_column(channel_01, "GC"), channel_01).tolist() == [1]
    assert ml_codes(_column(channel_01, "TGTG"), channel_01).tolist() == [2]


def test_ml_matches_brute_force_products(rng):
    """10^4 random columns under random channels agree with the product-of-likelihoods argmax."""
    for _ in range(2_000):
        matrix = rng.dirichlet(np.ones(4), size=4)
        channel = NoiseChannel(("A", "C", "G", "T"), matrix)
        for _ in range(5):
            m = int(rng.integers(1, 6))
            column = rng.integers(0, 4, size=m)
            likelihoods = [math.prod(matrix[s, y] for y in column) for s in range(4)]
            best = max(likelihoods)
            expected = next(s for s in range(4) if math.isclose(likelihoods[s], best, rel_tol=1e-9))
            assert ml_codes(column[:, None], channel).tolist() == [expected]


def test_symmetric_ml_is_plurality(rng):
    channel = symmetric_channel(0.3)
    for _ in range(500):
        column = rng.integers(0, 4, size=int(rng.integers(1, 8)))
        counts = np.bincount(column, minlength=4)
        assert ml_codes(column[:, None], channel).tolist() == [int(np.argmax(counts))]


def test_ml_consensus_of_a_cluster(channel_01):
    members = (KmerEntry(0, 0, "ACGTA"), KmerEntry(1, 2, "ACCTA"), KmerEntry(2, 1, "TCGTA"))
    cluster = KmerCluster(members, None, True, (10, 10, 11))
    cleaned = ml_consensus(cluster, channel_01, read_id=4)
    assert cleaned.symbols == "ACGTA"
    assert cleaned.claimed_start == 10
    assert cleaned.cluster_size == 3
    assert cleaned.id == 4


# --- Exact consensus error rate ---

def test_noiseless_consensus_never_errs(uniform):
    assert consensus_error_rate(identity_channel(), 3, uniform) == 0.0


def test_single_observation_errs_at_delta(uniform):
    assert consensus_error_rate(symmetric_channel(0.1), 1, uniform) == pytest.approx(0.1)


def test_two_observations_with_first_base_ties(uniform):
    """Half the one-right-one-wrong columns resolve to the true base, leaving delta."""
    assert consensus_error_rate(symmetric_channel(0.1), 2, uniform) == pytest.approx(0.1)


def test_more_observations_lower_the_error(uniform):
    rates = [consensus_error_rate(symmetric_channel(0.1), m, uniform) for m in (1, 3, 5)]
    assert rates[0] > rates[1] > rates[2]


def test_error_rate_matches_simulation(rng, uniform):
    channel = symmetric_channel(0.2)
    m, columns = 3, 20_000
    truth = rng.integers(0, 4, size=columns)
    cumulative = np.cumsum(channel.matrix, axis=1)
    observed = np.stack([(rng.random(columns)[:, None] >= cumulative[truth]).sum(axis=1) for _ in range(m)])
    observed = np.minimum(observed, 3)
    frequency = np.mean(ml_codes(observed, channel) != truth)
    exact = consensus_error_rate(channel, m, uniform)
    assert abs(frequency - exact) <= 4 * math.sqrt(exact * (1 - exact) / columns)


def test_skewed_source_weights_errors():
    channel = symmetric_channel(0.1)
    only_a = BaseDistribution((1.0, 0.0, 0.0, 0.0))
    only_t = BaseDistribution((0.0, 0.0, 0.0, 1.0))
    assert consensus_error_rate(channel, 2, only_a) < consensus_error_rate(channel, 2, only_t)
