# src/analysis/coverage.py

"""Lander-Waterman coverage statistics."""
import math
from dataclasses import dataclass

from src.errors import RangeError


@dataclass(frozen=True)
class CoverageEstimate:
    """
    Reads needed to cover a genome with probability 1 - epsilon.

    Attributes:
        ncov (int): ceil((G/L) * ln(G / (L * epsilon))).
        coverage_depth (float): c = ln(G / (L * epsilon)).
        arrival_rate (float): ncov * L / G.
    """

    ncov: int
    coverage_depth: float
    arrival_rate: float


def lander_waterman(genome_length, read_length, epsilon):
    """
    Lander-Waterman approximation of the number of reads needed for coverage.

    Args:
        genome_length (int): G.
        read_length (int): L, with 1 <= L <= G.
        epsilon (float): Allowed probability of leaving a base uncovered, 0 < epsilon < 1.

    Returns:
        CoverageEstimate: ncov, the coverage depth c and the arrival rate.
    """
    if not 0.0 < epsilon < 1.0:
        raise RangeError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 1 <= read_length <= genome_length:
        raise RangeError(f"read length {read_length} outside [1, {genome_length}]")

    depth = math.log(genome_length / (read_length * epsilon))
    ncov = math.ceil(genome_length / read_length * depth)
    return CoverageEstimate(ncov=ncov, coverage_depth=depth, arrival_rate=ncov * read_length / genome_length)


def expected_gaps(genome_length, read_length, count):
    """Expected number of uncovered stretches, N * exp(-N * L / G)."""
    if count < 0 or not 1 <= read_length <= genome_length:
        raise RangeError("expected_gaps needs N >= 0 and 1 <= L <= G")
    return count * math.exp(-count * read_length / genome_length)
