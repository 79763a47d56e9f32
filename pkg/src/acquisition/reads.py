# src/acquisition/reads.py

"""
Shotgun read sampling: N reads of length L with i.i.d. uniform starts.

Read starts are drawn from per-read substreams, so the first N reads of a
run with N' > N reads are the same reads. Starts are kept in draw order, not
sorted.
"""
from dataclasses import dataclass, field
from operator import ne

from src.acquisition.seeding import START_STREAM, derive_seed
from src.errors import RangeError, ShapeError


@dataclass(frozen=True)
class Read:
    """A read; true_start is ground truth used only for evaluation."""

    symbols: str
    true_start: int | None
    id: int


@dataclass(frozen=True)
class ReadSet:
    reads: tuple
    read_length: int
    genome_length: int
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "reads", tuple(self.reads))
        if self.read_length < 1 or self.genome_length < 1:
            raise RangeError("read and genome lengths must be positive")
        for read in self.reads:
            if len(read.symbols) != self.read_length:
                raise ShapeError(
                    f"read {read.id} has length {len(read.symbols)}, expected {self.read_length}"
                )
            if read.true_start is not None and not 0 <= read.true_start < self.genome_length:
                raise RangeError(f"read {read.id} starts at {read.true_start}, outside the genome")

    def __len__(self):
        return len(self.reads)

    def __iter__(self):
        return iter(self.reads)

    @property
    def has_ground_truth(self):
        return all(read.true_start is not None for read in self.reads)


def sample_reads(genome, count, length, seed):
    """
    Samples reads with uniformly located starts from a circular genome.

    Args:
        genome (Genome): Source genome.
        count (int): Number of reads N (>= 1).
        length (int): Read length L, 1 <= L <= G.
        seed (int): Seed of the start-position substreams.

    Returns:
        ReadSet: The reads in draw order, each carrying its true start.
    """
    if count < 1:
        raise RangeError(f"number of reads must be at least 1, got {count}")
    if not 1 <= length <= genome.length:
        raise RangeError(f"read length {length} outside [1, {genome.length}]")

    sequence = genome.sequence
    extended = sequence + sequence[: length - 1]
    reads = []
    for read_id in range(count):
        start = derive_seed(seed, START_STREAM, read_id) % genome.length
        reads.append(Read(extended[start : start + length], start, read_id))
    return ReadSet(tuple(reads), length, genome.length)


def hamming_distance(a, b):
    """Number of positions at which two equal-length strings differ."""
    if len(a) != len(b):
        raise ShapeError(f"cannot compare strings of lengths {len(a)} and {len(b)}")
    return sum(map(ne, a, b))
