# tests/test_alignment.py

"""K-mer pools, correction parameters and the search for good alignments."""

import math

import pytest

from src.acquisition.channel import corrupt_reads, identity_channel, symmetric_channel
from src.acquisition.genome import Genome, circular_substring, generate_genome, longest_repeat_length
from src.acquisition.reads import Read, ReadSet, sample_reads
from src.errors import ConfigError, RangeError
from src.processing.alignment import (
    CorrectionParams,
    KmerCluster,
    _cut_group,
    candidate_shifts,
    colocated_pairs,
    find_good_alignments,
)
from src.processing.clean_reads import correct_reads
from src.processing.kmers import KmerEntry, extract_kmers
from src.processing.quality import cluster_purity_violations, covered_fraction, quality, quality_batch
from tests.helpers import random_sequence


# --- K-mer pool ---

def test_extract_kmers_offsets():
    reads = ReadSet((Read("ACGTA", 3, 0),), 5, 20)
    pool = extract_kmers(reads, 3)
    assert [(e.offset, e.symbols) for e in pool] == [(0, "ACG"), (1, "CGT"), (2, "GTA")]
    assert [pool.true_location(e) for e in pool] == [3, 4, 5]


def test_whole_read_kmers_keep_duplicates():
    reads = ReadSet((Read("ACGT", 0, 0), Read("ACGT", 0, 1)), 4, 10)
    pool = extract_kmers(reads, 4)
    assert [(e.read_id, e.symbols) for e in pool] == [(0, "ACGT"), (1, "ACGT")]


def test_pool_size(genome_2k):
    reads = sample_reads(genome_2k, 30, 25, seed=1)
    assert len(extract_kmers(reads, 20)) == 30 * 6
    with pytest.raises(RangeError):
        extract_kmers(reads, 26)


def test_true_location_wraps():
    reads = ReadSet((Read("ACGT", 8, 0),), 4, 10)
    pool = extract_kmers(reads, 2)
    assert [pool.true_location(e) for e in pool] == [8, 9, 0]


# --- Parameters ---

def test_default_parameters():
    params = CorrectionParams.from_read_length(33, 10_000)
    assert params.k == 27
    assert params.m == 4
    assert params.tau == pytest.approx(math.log2(10_000) ** -0.25)
    assert CorrectionParams.from_read_length(33, 10_000, m_basis="log_of_L").m == 2


def test_kmer_length_fraction_approaches_one():
    for length in range(2, 300):
        k = CorrectionParams.from_read_length(length, 100_000).k
        assert 1 <= k <= length
        assert k / length >= 1 - (length ** 0.5 + 1) / length


def test_parameter_overrides():
    assert CorrectionParams.from_read_length(33, 10_000, k=20).k == 20
    assert CorrectionParams.from_read_length(33, 10_000, typicality_eps=None).typicality_eps == 0.35
    with pytest.raises(ConfigError):
        CorrectionParams.from_read_length(33, 10_000, kmer=20)
    with pytest.raises(RangeError):
        CorrectionParams.from_read_length(33, 10_000, beta=0.6)
    with pytest.raises(RangeError):
        CorrectionParams(k=10, m=1)


def test_tiny_genome_parameters():
    params = CorrectionParams.from_read_length(1, 1)
    assert (params.k, params.m, params.tau) == (1, 2, 1.0)


# --- Clusters ---

def test_claimed_start_and_majority():
    members = tuple(KmerEntry(i, 0, "ACG") for i in range(3))
    assert KmerCluster(members, None, True, (5, 5, 9)).majority_location == 5
    split = KmerCluster(members, None, True, (9, 5, 12))
    assert split.claimed_start == 5
    assert split.majority_location is None
    assert KmerCluster(members, None, True, (None, None, None)).claimed_start is None


def test_candidate_shifts():
    reads = {0: "AAACGTCC", 1: "CGTCCTTT"}
    assert (0, 1, -3) in candidate_shifts(reads, 4)


def test_colocated_pairs_compose_through_a_shared_read():
    """Two reads anchored only to a common third read are paired at the composed shift."""
    triples = [(0, 1, 5), (0, 2, -3)]
    assert colocated_pairs(triples, 10) == [(0, 1, 5), (0, 2, -3), (1, 2, -8)]
    assert colocated_pairs(triples, 6) == [(0, 1, 5), (0, 2, -3)]
    assert colocated_pairs([(3, 7, 2), (3, 7, 2)], 2) == [(3, 7, 2)]


def _mutate(symbols, *positions):
    flip = {"A": "C", "C": "G", "G": "T", "T": "A"}
    chars = list(symbols)
    for pos in positions:
        chars[pos] = flip[chars[pos]]
    return "".join(chars)


def test_composed_pair_links_reads_without_a_common_anchor(rng):
    """Two reads sharing no anchor are clustered through a third read they both anchor to."""
    genome = Genome.from_sequence(random_sequence(rng, 44))
    first = _mutate(circular_substring(genome, 0, 34), 5, 22)
    second = _mutate(circular_substring(genome, 0, 34), 16)
    hub = circular_substring(genome, 10, 34)
    reads = ReadSet((Read(hub, 10, 0), Read(first, 0, 1), Read(second, 0, 2)), 34, 44)
    assert [t[:2] for t in candidate_shifts({1: first, 2: second}, 12)] == []

    params = CorrectionParams.from_read_length(34, 44, k=30, m=2, radius_factor=40.0, typicality_eps=10.0)
    clusters = find_good_alignments(extract_kmers(reads, params.k), params, symmetric_channel(0.05))
    assert len(clusters) == 5
    for cluster in clusters:
        assert [m.read_id for m in cluster.members] == [1, 2]
        assert cluster.members[0].offset == cluster.members[1].offset


def test_group_remainder_forms_an_overlapping_chunk():
    """A group that is not a multiple of M keeps its tail as one more chunk."""
    group = [(read_id, 0) for read_id in range(5)]
    assert _cut_group(group, 3, 12) == [[(0, 0), (1, 0), (2, 0)], [(2, 0), (3, 0), (4, 0)]]
    assert _cut_group(group[:3], 3, 12) == [[(0, 0), (1, 0), (2, 0)]]
    assert _cut_group(group[:2], 3, 12) == []
    assert _cut_group([(0, 0), (0, 1), (1, 0), (2, 0)], 3, 12) == [[(0, 0), (1, 0), (2, 0)]]


# --- Alignment search ---

def test_single_read_yields_no_cluster():
    reads = ReadSet((Read("ACGTACGTAACCGGTT", 0, 0),), 16, 100)
    params = CorrectionParams.from_read_length(16, 100, k=16, m=2)
    assert find_good_alignments(extract_kmers(reads, 16), params, identity_channel()) == []


def test_pool_and_params_must_agree():
    reads = ReadSet((Read("ACGTACGTAACCGGTT", 0, 0),), 16, 100)
    params = CorrectionParams.from_read_length(16, 100, k=12, m=2)
    with pytest.raises(RangeError):
        find_good_alignments(extract_kmers(reads, 10), params, identity_channel())


def test_noiseless_clusters_are_pure(genome_2k):
    assert longest_repeat_length(genome_2k) < 33
    reads = sample_reads(genome_2k, 600, 40, seed=5)
    params = CorrectionParams.from_read_length(40, 2_000)
    assert (params.k, params.m) == (33, 3)

    result = correct_reads(reads, params, identity_channel())
    assert result.clusters
    for cluster in result.clusters:
        assert cluster.accepted
        assert len(cluster.members) == 3
        assert len({m.read_id for m in cluster.members}) == 3
        assert len(set(cluster.locations)) == 1
    assert cluster_purity_violations(result.clusters) == 0.0
    for read in result.cleaned:
        assert quality(read, genome_2k).d == 0.0
        assert quality(read, genome_2k).best_location == read.claimed_start


def test_planted_noisy_location_is_found(uniform):
    """Three noisy copies of one stretch yield an accepted cluster there."""
    genome = generate_genome(500, uniform, seed=17)
    start = 200
    symbols = circular_substring(genome, start, 40)
    reads = ReadSet(tuple(Read(symbols, start, i) for i in range(3)), 40, 500)
    noisy = corrupt_reads(reads, symmetric_channel(0.05), seed=4)
    params = CorrectionParams.from_read_length(40, 500)
    assert params.k >= 30

    clusters = find_good_alignments(extract_kmers(noisy, params.k), params, symmetric_channel(0.05))
    assert any(start <= c.majority_location < start + 8 for c in clusters if c.majority_location is not None)


def test_noisy_cleaned_reads_cover_the_genome(genome_2k):
    """At deep coverage and low noise the good cleaned reads cover at least 99% of the genome."""
    channel = symmetric_channel(0.05)
    reads = corrupt_reads(sample_reads(genome_2k, 1_500, 40, seed=11), channel, seed=12)
    params = CorrectionParams.from_read_length(40, 2_000)

    result = correct_reads(reads, params, channel)
    reports = quality_batch(result.cleaned, genome_2k)
    assert covered_fraction(reports, params.k, 2_000, params.tau) >= 0.99
    assert cluster_purity_violations(result.clusters) <= 0.05
    assert max(report.d for report in reports) <= params.tau


def test_purity_violations_fraction():
    members = tuple(KmerEntry(i, 0, "ACG") for i in range(3))
    clusters = [
        KmerCluster(members, None, True, (1, 1, 1)),
        KmerCluster(members, None, True, (1, 2, 3)),
        KmerCluster(members, None, False, (4, 5, 6)),
    ]
    assert cluster_purity_violations(clusters) == 0.5
    assert cluster_purity_violations([]) == 0.0
