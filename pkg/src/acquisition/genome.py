# src/acquisition/genome.py

"""
Circular i.i.d. genome model.

Genomes are stored 2-bit packed (four bases per byte) and expose the unpacked
codes and the nucleotide string as cached accessors. Positions are 0-based
and every index is taken modulo the genome length.
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from src.acquisition.seeding import GENOME_STREAM, derive_rng
from src.config import BASES
from src.errors import DistributionError, RangeError

_BASE_BYTES = np.frombuffer(BASES.encode("ascii"), dtype=np.uint8)
_BASE_LOOKUP = np.full(256, 255, dtype=np.uint8)
_BASE_LOOKUP[_BASE_BYTES] = np.arange(len(BASES), dtype=np.uint8)


def encode_bases(sequence):
    """Maps a nucleotide string to uint8 codes A=0, C=1, G=2, T=3."""
    raw = np.frombuffer(sequence.encode("ascii"), dtype=np.uint8)
    codes = _BASE_LOOKUP[raw]
    if codes.size and codes.max() == 255:
        bad = sorted({chr(b) for b in raw[codes == 255]})
        raise RangeError(f"non-nucleotide symbols in sequence: {''.join(bad)}")
    return codes


def decode_bases(codes):
    """Inverse of encode_bases."""
    return _BASE_BYTES[np.asarray(codes, dtype=np.uint8)].tobytes().decode("ascii")


# --- Base Distribution ---

@dataclass(frozen=True)
class BaseDistribution:
    """Probabilities of A, C, G, T (the Q of the genome model)."""

    probabilities: tuple

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probabilities)
        if len(probs) != len(BASES):
            raise DistributionError(f"expected {len(BASES)} probabilities, got {len(probs)}")
        if any(p < 0 or not np.isfinite(p) for p in probs):
            raise DistributionError(f"probabilities must be finite and non-negative: {probs}")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise DistributionError(f"probabilities sum to {sum(probs)!r}, not 1")
        object.__setattr__(self, "probabilities", probs)

    @classmethod
    def uniform(cls):
        return cls((0.25, 0.25, 0.25, 0.25))

    @classmethod
    def parse(cls, text):
        """Parses 'uniform' or four comma/space separated reals."""
        text = text.strip()
        if text.lower() == "uniform":
            return cls.uniform()
        try:
            values = [float(tok) for tok in text.replace(",", " ").split()]
        except ValueError as exc:
            raise DistributionError(f"cannot parse base distribution '{text}'") from exc
        return cls(tuple(values))

    def as_array(self):
        return np.array(self.probabilities, dtype=float)

    def __getitem__(self, base):
        return self.probabilities[BASES.index(base)]

    def to_token(self):
        return ",".join(repr(p) for p in self.probabilities)


# --- Genome ---

@dataclass(frozen=True, eq=False)
class Genome:
    """A circular nucleotide sequence with the distribution it was drawn from."""

    packed: np.ndarray
    length: int
    source_distribution: BaseDistribution

    def __post_init__(self):
        if self.length < 1:
            raise RangeError("genome length must be at least 1")
        self.packed.flags.writeable = False

    @classmethod
    def from_codes(cls, codes, source_distribution):
        codes = np.asarray(codes, dtype=np.uint8)
        padded = np.zeros(-(-codes.size // 4) * 4, dtype=np.uint8)
        padded[: codes.size] = codes
        quads = padded.reshape(-1, 4)
        packed = (quads[:, 0] << 6) | (quads[:, 1] << 4) | (quads[:, 2] << 2) | quads[:, 3]
        return cls(packed.astype(np.uint8), int(codes.size), source_distribution)

    @classmethod
    def from_sequence(cls, sequence, source_distribution=None):
        if source_distribution is None:
            source_distribution = BaseDistribution.uniform()
        return cls.from_codes(encode_bases(sequence), source_distribution)

    @cached_property
    def codes(self):
        """Unpacked uint8 codes, one per position."""
        p = self.packed
        quads = np.stack([(p >> 6) & 3, (p >> 4) & 3, (p >> 2) & 3, p & 3], axis=1)
        codes = quads.ravel()[: self.length].astype(np.uint8)
        codes.flags.writeable = False
        return codes

    @cached_property
    def sequence(self):
        return decode_bases(self.codes)

    def __len__(self):
        return self.length

    def __eq__(self, other):
        if not isinstance(other, Genome):
            return NotImplemented
        return self.length == other.length and np.array_equal(self.packed, other.packed)

    def __hash__(self):
        return hash((self.length, self.packed.tobytes()))


def generate_genome(length, distribution, seed):
    """
    Draws a circular genome with i.i.d. bases.

    Args:
        length (int): Genome length G (>= 1).
        distribution (BaseDistribution): Base distribution Q.
        seed (int): 64-bit seed; identical (G, Q, seed) give identical genomes.

    Returns:
        Genome: The generated genome.
    """
    if length < 1:
        raise RangeError(f"genome length must be at least 1, got {length}")
    if not isinstance(distribution, BaseDistribution):
        distribution = BaseDistribution(tuple(distribution))
    rng = derive_rng(seed, GENOME_STREAM)
    codes = rng.choice(len(BASES), size=length, p=distribution.as_array()).astype(np.uint8)
    return Genome.from_codes(codes, distribution)


def circular_substring(genome, start, length):
    """Returns genome[start : start + length], wrapping past the last position."""
    if length < 1 or length > genome.length:
        raise RangeError(f"substring length {length} outside [1, {genome.length}]")
    seq = genome.sequence
    i = start % genome.length
    end = i + length
    if end <= genome.length:
        return seq[i:end]
    return seq[i:] + seq[: end - genome.length]


def _has_repeat(sequence, k):
    extended = sequence + sequence[: k - 1]
    seen = set()
    for i in range(len(sequence)):
        window = extended[i : i + k]
        if window in seen:
            return True
        seen.add(window)
    return False


def longest_repeat_length(genome):
    """
    Length of the longest string that occurs at two distinct circular positions.

    Periodic genomes repeat at every length; the result is capped at G.
    """
    seq = genome.sequence
    lo, hi = 0, genome.length
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if _has_repeat(seq, mid):
            lo = mid
        else:
            hi = mid - 1
    return lo
