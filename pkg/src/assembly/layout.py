# src/assembly/layout.py

"""Layout and reconstruction checks against the true genome."""
from collections import Counter
from dataclasses import dataclass

import numpy as np

from src.acquisition.genome import encode_bases
from src.config import BASES, GAP_SYMBOL
from src.errors import EvaluationUnavailableError, ShapeError
from src.processing.quality import quality_batch


@dataclass(frozen=True)
class LayoutEvaluation:
    """
    Attributes:
        perfect_layout (bool): Every read is mapped to its true location.
        misplaced_count (int): Reads that are not.
        perfect_reconstruction (bool): The assembled sequence is a rotation of the genome.
        misplaced_ids (tuple[int]): Ids of the misplaced reads.
    """

    perfect_layout: bool
    misplaced_count: int
    perfect_reconstruction: bool
    misplaced_ids: tuple = ()


def is_rotation(a, b):
    """Whether `a` equals `b` read from some other starting point."""
    return len(a) == len(b) and a in b + b


def _majority_ok(read):
    cluster = read.source_cluster
    if cluster is None or not cluster.locations:
        return True
    return cluster.majority_location == read.claimed_start


def evaluate_layout(cleaned, genome, tau, assembled=None, reports=None):
    """
    Checks that every cleaned read maps to the location its cluster claims.

    A read is correctly mapped when d <= tau, its best location equals its
    claimed start, and a strict majority of its cluster's members come from
    that location.

    Args:
        cleaned (Sequence[CleanedRead]): Reads with claimed starts.
        genome (Genome): The true genome.
        tau (float): Quality tolerance.
        assembled (str | None): Assembled sequence for the reconstruction check.
        reports (Sequence[QualityReport] | None): Precomputed quality reports.

    Returns:
        LayoutEvaluation: The verdicts.
    """
    if any(read.claimed_start is None for read in cleaned):
        raise EvaluationUnavailableError("layout evaluation needs a claimed start for every read")
    if reports is None:
        reports = quality_batch(cleaned, genome)

    misplaced = tuple(
        read.id
        for read, report in zip(cleaned, reports)
        if report.d > tau or report.best_location != read.claimed_start or not _majority_ok(read)
    )
    reconstructed = assembled is not None and is_rotation(assembled, genome.sequence)
    return LayoutEvaluation(
        perfect_layout=bool(cleaned) and not misplaced,
        misplaced_count=len(misplaced),
        perfect_reconstruction=reconstructed,
        misplaced_ids=misplaced,
    )


def consensus_from_layout(cleaned, positions, length):
    """
    Per-position plurality over the reads laid out at `positions`.

    Args:
        cleaned (Sequence[CleanedRead | str]): Nucleotide reads.
        positions (Sequence[int]): Start of each read; indices wrap modulo `length`.
        length (int): Length of the laid-out sequence.

    Returns:
        tuple[str, list[int]]: The consensus, with GAP_SYMBOL at uncovered
        positions, and the list of those positions. Ties go to the first base
        in A<C<G<T order.
    """
    if len(cleaned) != len(positions):
        raise ShapeError(f"{len(cleaned)} reads but {len(positions)} positions")
    counts = np.zeros((length, len(BASES)), dtype=np.int64)
    for read, start in zip(cleaned, positions):
        codes = encode_bases(getattr(read, "symbols", read))
        np.add.at(counts, ((start + np.arange(len(codes))) % length, codes), 1)

    covered = counts.sum(axis=1) > 0
    best = np.argmax(counts, axis=1)
    symbols = np.array(list(BASES))[best]
    symbols[~covered] = GAP_SYMBOL
    gaps = np.flatnonzero(~covered).tolist()
    return "".join(symbols), gaps


def placement_errors(assembly, claimed_starts, genome_length):
    """
    Reads whose contig offset contradicts their claimed genome position.

    Each contig is anchored at the most common value of (claimed start - offset)
    mod G among its reads (smallest on ties); every read that disagrees with
    the anchor is counted.

    Args:
        assembly (AssemblyResult): The assembly.
        claimed_starts (Mapping[int, int]): Claimed start of each assembled read.
        genome_length (int): G.

    Returns:
        int: Number of inconsistently placed reads.
    """
    per_contig = {}
    for read_id, (contig, offset) in assembly.placements.items():
        claimed = claimed_starts.get(read_id)
        if claimed is None:
            raise EvaluationUnavailableError(f"read {read_id} has no claimed start")
        per_contig.setdefault(contig, []).append((claimed - offset) % genome_length)

    errors = 0
    for anchors in per_contig.values():
        counts = Counter(anchors)
        top = max(counts.values())
        anchor = min(value for value, count in counts.items() if count == top)
        errors += sum(1 for value in anchors if value != anchor)
    return errors
