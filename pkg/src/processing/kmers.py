# src/processing/kmers.py

"""K-mer pool: every length-K substring of every read, with its provenance."""
from dataclasses import dataclass, field

from src.errors import RangeError


@dataclass(frozen=True, order=True)
class KmerEntry:
    read_id: int
    offset: int
    symbols: str


@dataclass(frozen=True)
class KmerPool:
    """
    Attributes:
        entries (tuple[KmerEntry]): Ordered by (read_id, offset).
        k (int): K-mer length.
        read_length (int): Length L of the reads the pool was cut from.
        genome_length (int): G of the source genome.
        true_starts (dict[int, int | None]): Ground-truth read starts, evaluation only.
    """

    entries: tuple
    k: int
    read_length: int
    genome_length: int
    true_starts: dict = field(default_factory=dict, compare=False)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    @property
    def kmers_per_read(self):
        return self.read_length - self.k + 1

    def by_read(self):
        """Groups the entries of each read, keyed by read id."""
        groups = {}
        for entry in self.entries:
            groups.setdefault(entry.read_id, []).append(entry)
        return groups

    def true_location(self, entry):
        """Genome position the K-mer was cut from, or None without ground truth."""
        start = self.true_starts.get(entry.read_id)
        if start is None:
            return None
        return (start + entry.offset) % self.genome_length


def extract_kmers(reads, k):
    """
    Cuts every read into its L - K + 1 overlapping K-mers.

    Args:
        reads (ReadSet): Reads of common length L.
        k (int): K-mer length, 1 <= K <= L.

    Returns:
        KmerPool: N * (L - K + 1) entries.
    """
    if not 1 <= k <= reads.read_length:
        raise RangeError(f"K={k} outside [1, {reads.read_length}]")
    span = reads.read_length - k + 1
    entries = tuple(
        KmerEntry(read.id, offset, read.symbols[offset : offset + k])
        for read in reads
        for offset in range(span)
    )
    starts = {read.id: read.true_start for read in reads}
    return KmerPool(entries, k, reads.read_length, reads.genome_length, starts)
