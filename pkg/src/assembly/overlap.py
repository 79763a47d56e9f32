# src/assembly/overlap.py

"""
Suffix-prefix overlap scoring.

Exact candidates at a width come from a prefix dictionary. Approximate
candidates are scored in bulk: suffixes and prefixes are one-hot encoded and
the agreement counts of every (left, right) pair are one matrix product,
computed in row blocks.
"""
from dataclasses import dataclass
import math

import numpy as np

from src.acquisition.reads import hamming_distance
from src.config import OVERLAP_BLOCK_ROWS
from src.errors import RangeError


@dataclass(frozen=True)
class OverlapCandidate:
    left_id: int
    right_id: int
    width: int
    mismatches: int

    @property
    def mismatch_fraction(self):
        return self.mismatches / self.width


def overlap_mismatch(a, b, w):
    """Hamming(suffix_w(a), prefix_w(b)) / w."""
    if not 1 <= w <= min(len(a), len(b)):
        raise RangeError(f"overlap width {w} outside [1, {min(len(a), len(b))}]")
    return hamming_distance(a[len(a) - w :], b[:w]) / w


def allowed_mismatches(width, threshold):
    """Largest mismatch count with count / width <= threshold."""
    return math.floor(threshold * width + 1e-12)


class OverlapScorer:
    """Holds integer-coded reads and finds admissible overlaps at a given width."""

    def __init__(self, reads, block_rows=OVERLAP_BLOCK_ROWS):
        self.reads = list(reads)
        self.block_rows = block_rows
        alphabet = sorted(set("".join(self.reads)))
        lookup = np.zeros(256, dtype=np.int64)
        lookup[[ord(symbol) for symbol in alphabet]] = np.arange(len(alphabet))
        self.alphabet_size = max(1, len(alphabet))
        self.codes = [lookup[np.frombuffer(read.encode("ascii"), dtype=np.uint8)] for read in self.reads]

    def exact_buckets(self, rights, width):
        """Maps prefix_w -> ascending ids among `rights` that carry it."""
        buckets = {}
        for j in rights:
            buckets.setdefault(self.reads[j][:width], []).append(j)
        return buckets

    def _one_hot(self, ids, width, suffix):
        size = self.alphabet_size
        rows = np.stack([self.codes[i][-width:] if suffix else self.codes[i][:width] for i in ids])
        encoded = np.zeros((len(ids), width * size), dtype=np.float32)
        cols = np.arange(width) * size
        encoded[np.arange(len(ids))[:, None], cols[None, :] + rows] = 1.0
        return encoded

    def approximate(self, lefts, rights, width, max_mismatches):
        """
        Admissible pairs at one width, in ascending (left, right) order.

        Args:
            lefts (list[int]): Ascending ids offering their suffix.
            rights (list[int]): Ascending ids offering their prefix.
            width (int): Overlap width.
            max_mismatches (int): Largest admissible Hamming count.

        Returns:
            list[OverlapCandidate]: Pairs with left != right.
        """
        if not lefts or not rights:
            return []
        left_ids = np.asarray(lefts)
        right_ids = np.asarray(rights)
        prefixes = self._one_hot(rights, width, suffix=False).T
        found = []
        for begin in range(0, len(lefts), self.block_rows):
            block = left_ids[begin : begin + self.block_rows]
            agreement = self._one_hot(block, width, suffix=True) @ prefixes
            mismatches = width - np.rint(agreement).astype(np.int64)
            rows, cols = np.nonzero(mismatches <= max_mismatches)
            for r, c in zip(rows, cols):
                i, j = int(block[r]), int(right_ids[c])
                if i != j:
                    found.append(OverlapCandidate(i, j, width, int(mismatches[r, c])))
        return found
