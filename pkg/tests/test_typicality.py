# tests/test_typicality.py

"""F_P^M likelihoods and the pooled typicality test."""

import itertools
import math

import numpy as np
import pytest

from src.acquisition.channel import NoiseChannel, identity_channel, symmetric_channel
from src.acquisition.genome import BaseDistribution
from src.errors import ShapeError, TypicalityError
from src.processing.typicality import (
    TypicalityOrder,
    band_test,
    f_pm_log_prob,
    joint_groups,
    joint_table,
    pooled_groups,
    projected_tables,
    typicality_test,
)
from tests.helpers import random_sequence

BINARY = BaseDistribution((0.5, 0.5, 0.0, 0.0))


def _composition(sequence):
    counts = np.array([sequence.count(b) for b in "ACGT"], dtype=float)
    return BaseDistribution(tuple(counts / counts.sum()))


# --- F_P^M ---

def test_f_pm_examples(uniform):
    assert f_pm_log_prob("A", uniform, identity_channel()) == pytest.approx(-2.0)
    assert f_pm_log_prob("AA", BaseDistribution((1.0, 0.0, 0.0, 0.0)), identity_channel()) == pytest.approx(0.0)
    assert f_pm_log_prob("AC", uniform, identity_channel()) == -math.inf


def test_f_pm_symmetric_pair(uniform, channel_01):
    expected = 0.25 * (2 * 0.9 * (0.1 / 3) + 2 * (0.1 / 3) ** 2)
    assert f_pm_log_prob("AC", uniform, channel_01) == pytest.approx(math.log2(expected))


def test_f_pm_matches_brute_force(rng):
    for _ in range(200):
        matrix = rng.dirichlet(np.ones(3), size=4)
        channel = NoiseChannel(("A", "C", "N"), matrix)
        p = rng.dirichlet(np.ones(4))
        p[-1] = 1.0 - p[:-1].sum()
        column = random_sequence(rng, int(rng.integers(1, 5)), "ACN")
        codes = [channel.output_alphabet.index(y) for y in column]
        total = sum(p[s] * math.prod(matrix[s, y] for y in codes) for s in range(4))
        assert f_pm_log_prob(column, BaseDistribution(tuple(p)), channel) == pytest.approx(math.log2(total))


def test_joint_table_sums_to_one(uniform, channel_01):
    table = joint_table(uniform.as_array(), channel_01, 3)
    assert table.shape == (64,)
    assert table.sum() == pytest.approx(1.0)


# --- Pooling and the band ---

def test_pooled_groups():
    groups = pooled_groups(np.array([0.0, 1.0, 4.0, 10.0, 3.0]), min_cell_count=8)
    assert [g.tolist() for g in groups] == [[1, 4, 2], [3]]
    groups = pooled_groups(np.array([5.0, 5.0, 5.0]), min_cell_count=8)
    assert [g.tolist() for g in groups] == [[0, 1, 2]]
    groups = pooled_groups(np.array([1.0, 2.0]), min_cell_count=8)
    assert [g.tolist() for g in groups] == [[0, 1]]


def test_band_test():
    assert band_test([2, 2], [0.5, 0.5], eps=0.1, min_cell_count=1)
    assert not band_test([3, 0], [0.5, 0.5], eps=0.1, min_cell_count=1)
    assert not band_test([0, 2], [1.0, 0.0], eps=10.0, min_cell_count=1)


# --- Typicality test ---

def test_identical_noiseless_copies_are_typical(rng):
    kmer = random_sequence(rng, 40)
    for order in TypicalityOrder:
        for eps in (0.01, 0.35):
            assert typicality_test([kmer] * 3, _composition(kmer), identity_channel(), eps, order)


def test_independent_sequences_are_not_typical(rng, uniform):
    members = [random_sequence(rng, 60), random_sequence(rng, 60)]
    assert not typicality_test(members, uniform, identity_channel(), 0.5)


def test_unequal_lengths_rejected(uniform, channel_01):
    with pytest.raises(ShapeError):
        typicality_test(["ACGT", "ACG"], uniform, channel_01, 0.35)


def test_full_joint_refuses_oversized_tables(rng):
    kmer = random_sequence(rng, 30)
    with pytest.raises(TypicalityError):
        typicality_test([kmer] * 7, _composition(kmer), identity_channel(), 0.35, "full_joint")


def test_joint_pools_refine_marginal_and_pair_pools(channel_01):
    """Each joint pool projects into a single marginal pool and a single pair pool."""
    skewed = BaseDistribution((0.6, 0.2, 0.15, 0.05))
    for p in (BINARY, BaseDistribution.uniform(), skewed):
        probs = p.as_array()
        single, shared = projected_tables(probs, channel_01)
        for m, k, floor in itertools.product((2, 3), (5, 27, 60), (1, 8)):
            table, groups = joint_groups(probs, channel_01, m, k, floor)
            cells = np.sort(np.concatenate(groups))
            assert cells.tolist() == np.flatnonzero(table > 0).tolist()

            digits = np.array(list(itertools.product(range(4), repeat=m)))
            single_label = {int(c): i for i, g in enumerate(pooled_groups(k * single, floor)) for c in g}
            pair_label = {int(c): i for i, g in enumerate(pooled_groups(k * shared.ravel(), floor)) for c in g}
            for group in groups:
                for a in range(m):
                    assert len({single_label[int(y)] for y in digits[group, a]}) == 1
                for a, b in itertools.combinations(range(m), 2):
                    assert len({pair_label[int(y)] for y in digits[group, a] * 4 + digits[group, b]}) == 1


def test_full_joint_implies_marginals_and_pairs_exhaustively():
    """Every binary instance with small K: passing the joint test means passing marginals and pairs."""
    channel = symmetric_channel(0.1)
    for m, k in ((2, 5), (3, 3)):
        strings = ["".join(t) for t in itertools.product("AC", repeat=k)]
        for members in itertools.product(strings, repeat=m):
            for p in (BINARY, BaseDistribution.uniform()):
                if typicality_test(members, p, channel, 0.35, "full_joint", min_cell_count=1):
                    assert typicality_test(members, p, channel, 0.35, "marginals_and_pairs", min_cell_count=1)


def test_full_joint_implies_marginals_and_pairs_randomly(rng, channel_01):
    for _ in range(300):
        m = int(rng.integers(2, 5))
        base = random_sequence(rng, int(rng.integers(5, 21)), "AC")
        members = ["".join(b if rng.random() > 0.1 else "G" for b in base) for _ in range(m)]
        p = _composition(base)
        if typicality_test(members, p, channel_01, 0.5, "full_joint"):
            assert typicality_test(members, p, channel_01, 0.5, "marginals_and_pairs")


def test_acceptance_is_monotone_in_eps(rng, channel_01):
    for _ in range(200):
        base = random_sequence(rng, 40)
        members = ["".join(b if rng.random() > 0.1 else "T" for b in base) for _ in range(3)]
        p = _composition(base)
        verdicts = [typicality_test(members, p, channel_01, eps) for eps in (0.1, 0.2, 0.35, 0.6, 1.0)]
        first = verdicts.index(True) if True in verdicts else len(verdicts)
        assert all(verdicts[first:])
