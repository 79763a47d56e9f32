# src/processing/alignment.py

"""
Search for good alignments in a K-mer pool.

Candidates come from positional anchors: every window of length `anchor_len`
at every read position is indexed, and two reads sharing a window yield a
candidate (read, read, shift) triple. Reads anchored to a common neighbour are
paired too, through the composed shift. For each pair the co-located K-mer
pairs within Hamming radius rho*K are linked, linked K-mers are grouped by
single linkage, and each group is cut into clusters of M K-mers from distinct
reads. A cluster is accepted when it passes the typicality test for one of the
candidate compositions P (the composition of its provisional ML consensus,
then the source distribution Q).
"""
import math
from collections import Counter
from dataclasses import dataclass, fields, replace

import numpy as np
from scipy.cluster.hierarchy import DisjointSet

from src.acquisition.genome import BaseDistribution
from src.config import (
    ALPHA,
    ANCHOR_LENGTH,
    BETA,
    GROUP_CAP_FACTOR,
    M_BASIS,
    MAX_ANCHOR_BUCKET,
    MIN_CELL_COUNT,
    RADIUS_FACTOR,
    TYPICALITY_EPS,
    TYPICALITY_ORDER,
)
from src.errors import ConfigError, RangeError
from src.processing.consensus import ml_codes
from src.processing.typicality import TypicalityOrder, typicality_test


@dataclass(frozen=True)
class CorrectionParams:
    """
    Parameters of the error-correction stage.

    Attributes:
        k (int): K-mer length.
        m (int): Cluster size M (>= 2).
        alpha (float): Exponent of the K rule, in (0, 1).
        beta (float): Factor of the M rule, in (0, 0.5).
        typicality_eps (float): Multiplicative band of the typicality test.
        tau (float): Quality tolerance in [0, 1].
        m_basis (str): "log_of_G" or "log_of_L".
        order (TypicalityOrder): Which typicality test to run.
        anchor_len (int): Length of the exact-match anchor windows.
        radius_factor (float): rho = radius_factor * channel error rate.
        min_cell_count (float): Pooling floor of the typicality test.
        source_distribution (BaseDistribution): Fallback candidate composition Q.
    """

    k: int
    m: int
    alpha: float = ALPHA
    beta: float = BETA
    typicality_eps: float = TYPICALITY_EPS
    tau: float = 0.5
    m_basis: str = M_BASIS
    order: TypicalityOrder = TypicalityOrder(TYPICALITY_ORDER)
    anchor_len: int = ANCHOR_LENGTH
    radius_factor: float = RADIUS_FACTOR
    min_cell_count: float = MIN_CELL_COUNT
    source_distribution: BaseDistribution = BaseDistribution.uniform()

    def __post_init__(self):
        object.__setattr__(self, "order", TypicalityOrder(self.order))
        if self.k < 1:
            raise RangeError(f"K must be at least 1, got {self.k}")
        if self.m < 2:
            raise RangeError(f"M must be at least 2, got {self.m}")
        if not 0.0 < self.alpha < 1.0:
            raise RangeError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 0.5:
            raise RangeError(f"beta must lie in (0, 0.5), got {self.beta}")
        if self.typicality_eps <= 0:
            raise RangeError(f"typicality eps must be positive, got {self.typicality_eps}")
        if not 0.0 <= self.tau <= 1.0:
            raise RangeError(f"tau must lie in [0, 1], got {self.tau}")
        if self.m_basis not in ("log_of_G", "log_of_L"):
            raise ConfigError(f"unknown m_basis '{self.m_basis}'")
        if self.anchor_len < 1:
            raise RangeError(f"anchor length must be positive, got {self.anchor_len}")

    @classmethod
    def from_read_length(cls, read_length, genome_length, **overrides):
        """
        Derives the default parameters for reads of length L from a genome of length G.

        K = L - ceil(L**alpha), M = max(2, round(beta * log2 X)) with X = G or L
        per m_basis, tau = (log2 G)**(-1/4). Explicit overrides win; alpha, beta
        and m_basis overrides feed the derivation.
        """
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(overrides) - known)
        if unknown:
            raise ConfigError(f"unknown correction parameters: {', '.join(unknown)}")
        overrides = {key: value for key, value in overrides.items() if value is not None}

        alpha = overrides.get("alpha", ALPHA)
        beta = overrides.get("beta", BETA)
        m_basis = overrides.get("m_basis", M_BASIS)
        basis = genome_length if m_basis == "log_of_G" else read_length

        k = max(1, read_length - math.ceil(read_length ** alpha))
        m = max(2, round(beta * math.log2(max(basis, 1))))
        log_g = math.log2(genome_length) if genome_length > 1 else 0.0
        tau = min(1.0, log_g ** -0.25) if log_g > 0 else 1.0

        values = {"k": k, "m": m, "tau": tau, "alpha": alpha, "beta": beta, "m_basis": m_basis}
        values.update(overrides)
        return cls(**values)

    def with_overrides(self, **changes):
        return replace(self, **{key: value for key, value in changes.items() if value is not None})


@dataclass(frozen=True)
class KmerCluster:
    """
    A candidate good alignment.

    Attributes:
        members (tuple[KmerEntry]): M K-mers from distinct reads.
        type_P (BaseDistribution | None): Composition the typicality test passed for.
        accepted (bool): Whether the typicality test passed.
        locations (tuple[int | None]): True genome location of each member (evaluation only).
    """

    members: tuple
    type_P: BaseDistribution | None
    accepted: bool
    locations: tuple = ()

    @property
    def claimed_start(self):
        """Most common true location of the members, smallest on ties."""
        known = [loc for loc in self.locations if loc is not None]
        if not known:
            return None
        counts = Counter(known)
        top = max(counts.values())
        return min(loc for loc, count in counts.items() if count == top)

    @property
    def majority_location(self):
        """The location shared by a strict majority of members, else None."""
        claimed = self.claimed_start
        if claimed is None:
            return None
        share = sum(1 for loc in self.locations if loc == claimed)
        return claimed if 2 * share > len(self.members) else None


def _read_strings(pool):
    reads = {}
    for read_id, entries in pool.by_read().items():
        entries.sort(key=lambda entry: entry.offset)
        reads[read_id] = entries[0].symbols + "".join(entry.symbols[-1] for entry in entries[1:])
    return reads


def candidate_shifts(reads, anchor_len, max_bucket=MAX_ANCHOR_BUCKET):
    """
    Pairs of reads sharing an exact anchor window, with their relative shift.

    Args:
        reads (dict[int, str]): Read strings keyed by id.
        anchor_len (int): Window length.
        max_bucket (int): Windows occurring more often than this are skipped.

    Returns:
        list[tuple[int, int, int]]: Sorted (read_a, read_b, shift) with read_a < read_b;
        position p of read_a faces position p + shift of read_b.
    """
    buckets = {}
    for read_id in sorted(reads):
        symbols = reads[read_id]
        for pos in range(len(symbols) - anchor_len + 1):
            buckets.setdefault(symbols[pos : pos + anchor_len], []).append((read_id, pos))

    triples = set()
    for hits in buckets.values():
        if len(hits) < 2 or len(hits) > max_bucket:
            continue
        for i, (ra, pa) in enumerate(hits):
            for rb, pb in hits[i + 1 :]:
                if ra != rb:
                    triples.add((ra, rb, pb - pa))
    return sorted(triples)


def colocated_pairs(triples, max_shift):
    """
    Read pairs whose K-mers may share genome locations.

    Anchored pairs are kept as they are. Two reads anchored to a common third
    read are paired as well, with the shift composed through it, so pairs whose
    own overlap holds no exact anchor are still compared.

    Args:
        triples (Iterable[tuple[int, int, int]]): Anchored (read_a, read_b, shift) triples.
        max_shift (int): Largest |shift| at which two reads still share a K-mer location.

    Returns:
        list[tuple[int, int, int]]: Sorted (read_a, read_b, shift) with read_a < read_b.
    """
    neighbours = {}
    for ra, rb, shift in triples:
        neighbours.setdefault(ra, set()).add((rb, shift))
        neighbours.setdefault(rb, set()).add((ra, -shift))

    pairs = set()

    def add(ra, rb, shift):
        if ra == rb or abs(shift) > max_shift:
            return
        pairs.add((ra, rb, shift) if ra < rb else (rb, ra, -shift))

    for ra, rb, shift in triples:
        add(ra, rb, shift)
    for hub in sorted(neighbours):
        links = sorted(neighbours[hub])
        for i, (ra, sa) in enumerate(links):
            for rb, sb in links[i + 1 :]:
                # position p of the hub faces p + sa of ra and p + sb of rb
                add(ra, rb, sb - sa)
    return sorted(pairs)


def _link_colocated(matrix, rows, pairs, k, radius, sets):
    span = matrix.shape[1] - k + 1
    by_shift = {}
    for ra, rb, shift in pairs:
        by_shift.setdefault(shift, []).append((ra, rb))
    for shift, members in sorted(by_shift.items()):
        first, last = max(0, -shift), min(span, span - shift)
        if first >= last:
            continue
        left = matrix[[rows[ra] for ra, _ in members], first : last - 1 + k]
        right = matrix[[rows[rb] for _, rb in members], first + shift : last - 1 + k + shift]
        mismatches = np.cumsum(left != right, axis=1)
        mismatches = np.concatenate([np.zeros((len(members), 1), dtype=mismatches.dtype), mismatches], axis=1)
        per_kmer = mismatches[:, k:] - mismatches[:, :-k]
        for row, column in zip(*np.nonzero(per_kmer <= radius)):
            ra, rb = members[row]
            offset = first + int(column)
            sets.merge((ra, offset), (rb, offset + shift))


def _cut_group(group, m, cap):
    seen, members = set(), []
    for read_id, offset in sorted(group):
        if read_id not in seen:
            seen.add(read_id)
            members.append((read_id, offset))
    members = members[:cap]
    chunks = [members[i : i + m] for i in range(0, len(members) - m + 1, m)]
    if len(members) > m and len(members) % m:
        # the remainder joins the last members in one overlapping chunk
        chunks.append(members[-m:])
    return chunks


def _composition(codes):
    counts = np.bincount(codes, minlength=4)
    return BaseDistribution(tuple(counts / counts.sum()))


def find_good_alignments(pool, params, channel):
    """
    Finds accepted clusters of M co-located K-mers.

    Args:
        pool (KmerPool): The K-mer pool.
        params (CorrectionParams): Correction parameters.
        channel (NoiseChannel): Read channel.

    Returns:
        list[KmerCluster]: Accepted clusters, ordered by their first member.
    """
    if pool.k != params.k:
        raise RangeError(f"pool holds {pool.k}-mers but params ask for K={params.k}")
    if len(pool) == 0:
        return []

    reads = _read_strings(pool)
    anchor_len = min(params.anchor_len, pool.k)
    radius = params.radius_factor * channel.error_rate * pool.k
    entries = {(entry.read_id, entry.offset): entry for entry in pool}

    ids = sorted(reads)
    rows = {read_id: row for row, read_id in enumerate(ids)}
    matrix = np.stack([channel.encode(reads[read_id]) for read_id in ids])
    pairs = colocated_pairs(candidate_shifts(reads, anchor_len), pool.kmers_per_read - 1)

    sets = DisjointSet(sorted(entries))
    _link_colocated(matrix, rows, pairs, pool.k, radius, sets)

    groups = sorted((sorted(subset) for subset in sets.subsets() if len(subset) >= params.m), key=lambda g: g[0])
    fallback = params.source_distribution
    clusters, seen = [], set()
    for group in groups:
        for chunk in _cut_group(group, params.m, GROUP_CAP_FACTOR * params.m):
            key = frozenset(chunk)
            if key in seen:
                continue
            seen.add(key)
            members = tuple(entries[item] for item in chunk)
            symbols = [member.symbols for member in members]
            provisional = ml_codes(np.stack([channel.encode(s) for s in symbols]), channel)
            candidates = [_composition(provisional)]
            if candidates[0] != fallback:
                candidates.append(fallback)
            for candidate in candidates:
                if typicality_test(symbols, candidate, channel, params.typicality_eps, params.order,
                                   params.min_cell_count):
                    locations = tuple(pool.true_location(member) for member in members)
                    clusters.append(KmerCluster(members, candidate, True, locations))
                    break
    return clusters
