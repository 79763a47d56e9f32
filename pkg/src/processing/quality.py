# src/processing/quality.py

"""
Quality of cleaned reads against the true genome.

d(r) is the smallest normalised Hamming distance between r and any length-K
circular substring of the genome; the argmin (smallest position on ties) is
the read's best location.
"""
from dataclasses import dataclass

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from src.acquisition.genome import encode_bases
from src.config import QUALITY_BLOCK_LENGTH
from src.errors import RangeError


@dataclass(frozen=True)
class QualityReport:
    d: float
    best_location: int
    mismatches: int


def _windows(genome, k):
    if not 1 <= k <= genome.length:
        raise RangeError(f"cleaned read length {k} outside [1, {genome.length}]")
    codes = genome.codes
    extended = np.concatenate([codes, codes[: k - 1]])
    return sliding_window_view(extended, k)


def _report(mismatches, location, k):
    return QualityReport(d=mismatches / k, best_location=int(location), mismatches=int(mismatches))


def quality(cleaned, genome):
    """
    Exact full scan over all G circular start positions.

    Args:
        cleaned (CleanedRead | str): The cleaned read (or its symbols).
        genome (Genome): The true genome.

    Returns:
        QualityReport: d, best location and the Hamming count.
    """
    symbols = getattr(cleaned, "symbols", cleaned)
    k = len(symbols)
    distances = (_windows(genome, k) != encode_bases(symbols)).sum(axis=1)
    location = int(np.argmin(distances))
    return _report(distances[location], location, k)


class GenomeIndex:
    """
    Exact q-gram indexes of a circular genome for batched quality scans.

    A read is cut into floor(K / q) disjoint blocks. Any location with fewer
    mismatches than blocks matches at least one block exactly, so when the best
    location among exact block hits has fewer mismatches than there are blocks,
    it is the global optimum. Reads that miss at q are retried at q // 2 and
    finally fall back to a full scan. q never exceeds K.
    """

    def __init__(self, genome, block_length=QUALITY_BLOCK_LENGTH):
        self.genome = genome
        self.block_length = block_length
        self._positions = {}
        self._windows = {}

    def windows(self, k):
        if k not in self._windows:
            self._windows[k] = _windows(self.genome, k)
        return self._windows[k]

    def positions(self, q):
        if q not in self._positions:
            sequence = self.genome.sequence
            extended = sequence + sequence[: q - 1]
            table = {}
            for pos in range(self.genome.length):
                table.setdefault(extended[pos : pos + q], []).append(pos)
            self._positions[q] = table
        return self._positions[q]

    def block_lengths(self, k):
        lengths = []
        for q in (min(self.block_length, k), min(self.block_length // 2, k)):
            if 1 <= q <= self.genome.length and q not in lengths:
                lengths.append(q)
        return lengths

    def quality(self, symbols):
        k = len(symbols)
        windows = self.windows(k)
        read = encode_bases(symbols)
        size = self.genome.length
        for q in self.block_lengths(k):
            blocks = k // q
            table = self.positions(q)
            candidates = set()
            for j in range(blocks):
                offset = j * q
                for pos in table.get(symbols[offset : offset + q], ()):
                    candidates.add((pos - offset) % size)
            if not candidates:
                continue
            locations = np.array(sorted(candidates))
            distances = (windows[locations] != read).sum(axis=1)
            best = int(np.argmin(distances))
            if distances[best] < blocks:
                return _report(distances[best], locations[best], k)
        return self._full_scan(windows, read, k)

    @staticmethod
    def _full_scan(windows, read, k):
        distances = (windows != read).sum(axis=1)
        location = int(np.argmin(distances))
        return _report(distances[location], location, k)


def quality_batch(cleaned, genome, index=None):
    """quality() for many reads at once; results are identical to the full scan."""
    index = index or GenomeIndex(genome)
    return [index.quality(getattr(read, "symbols", read)) for read in cleaned]


def covered_fraction(reports, k, genome_length, tau):
    """
    Fraction of genome positions inside the best-location window of some read with d <= tau.

    Args:
        reports (Iterable[QualityReport]): Quality reports of length-K reads.
        k (int): Read length.
        genome_length (int): G.
        tau (float): Quality tolerance.

    Returns:
        float: Covered fraction in [0, 1].
    """
    delta = np.zeros(genome_length + 1, dtype=np.int64)
    for report in reports:
        if report.d > tau:
            continue
        start = report.best_location
        end = start + k
        if end <= genome_length:
            delta[start] += 1
            delta[end] -= 1
        else:
            delta[start] += 1
            delta[genome_length] -= 1
            delta[0] += 1
            delta[end - genome_length] -= 1
    covered = np.cumsum(delta[:genome_length]) > 0
    return float(covered.mean())


def cluster_purity_violations(clusters):
    """Fraction of accepted clusters whose members share no strict-majority true location."""
    accepted = [cluster for cluster in clusters if cluster.accepted]
    if not accepted:
        return 0.0
    impure = sum(1 for cluster in accepted if cluster.majority_location is None)
    return impure / len(accepted)
