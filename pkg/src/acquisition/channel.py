# src/acquisition/channel.py

"""
Memoryless substitution channel pi(y|s) from {A,C,G,T} to an output alphabet Y.

Each base of each read is passed through the channel independently; read i
uses its own noise substream derived from (seed, i).
"""
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from src.acquisition.genome import encode_bases
from src.acquisition.reads import Read, ReadSet
from src.acquisition.seeding import NOISE_STREAM, derive_rng
from src.config import BASES
from src.errors import DistributionError, RangeError, ShapeError


@dataclass(frozen=True, eq=False)
class NoiseChannel:
    """Row s of `matrix` is the output distribution pi(.|s) for base BASES[s]."""

    output_alphabet: tuple
    matrix: np.ndarray

    def __post_init__(self):
        alphabet = tuple(str(y) for y in self.output_alphabet)
        if not alphabet or any(len(y) != 1 for y in alphabet) or len(set(alphabet)) != len(alphabet):
            raise ShapeError(f"output alphabet must be distinct single symbols: {alphabet}")
        matrix = np.array(self.matrix, dtype=float)
        if matrix.shape != (len(BASES), len(alphabet)):
            raise ShapeError(f"channel matrix must be {len(BASES)}x{len(alphabet)}, got {matrix.shape}")
        if (matrix < 0).any() or not np.isfinite(matrix).all():
            raise DistributionError("channel probabilities must be finite and non-negative")
        row_sums = matrix.sum(axis=1)
        if np.abs(row_sums - 1.0).max() > 1e-12:
            raise DistributionError(f"channel rows sum to {row_sums.tolist()}, not 1")
        matrix.flags.writeable = False
        object.__setattr__(self, "output_alphabet", alphabet)
        object.__setattr__(self, "matrix", matrix)

    def __eq__(self, other):
        if not isinstance(other, NoiseChannel):
            return NotImplemented
        return self.output_alphabet == other.output_alphabet and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash((self.output_alphabet, self.matrix.tobytes()))

    @cached_property
    def log_matrix(self):
        """Natural log of pi(y|s); impossible outputs are -inf."""
        with np.errstate(divide="ignore"):
            return np.log(self.matrix)

    @cached_property
    def _lookup(self):
        table = np.full(256, 255, dtype=np.uint8)
        for i, symbol in enumerate(self.output_alphabet):
            table[ord(symbol)] = i
        return table

    def encode(self, symbols):
        """Maps a string over Y to column indices of the matrix."""
        codes = self._lookup[np.frombuffer(symbols.encode("ascii"), dtype=np.uint8)]
        if codes.size and codes.max() == 255:
            raise RangeError(f"symbols outside the output alphabet {''.join(self.output_alphabet)}")
        return codes

    def decode(self, codes):
        alphabet = np.frombuffer("".join(self.output_alphabet).encode("ascii"), dtype=np.uint8)
        return alphabet[np.asarray(codes)].tobytes().decode("ascii")

    @property
    def is_nucleotide_output(self):
        return self.output_alphabet == tuple(BASES)

    @cached_property
    def error_rate(self):
        """Mean over input bases of the probability that s is not read as s."""
        correct = []
        for s, base in enumerate(BASES):
            if base in self.output_alphabet:
                correct.append(self.matrix[s, self.output_alphabet.index(base)])
            else:
                correct.append(self.matrix[s].max())
        return float(1.0 - np.mean(correct))


def symmetric_channel(delta):
    """pi(s|s) = 1 - delta and pi(y|s) = delta / 3 for the three other bases."""
    if not 0.0 <= delta <= 1.0:
        raise RangeError(f"mis-read probability must lie in [0, 1], got {delta}")
    size = len(BASES)
    matrix = np.full((size, size), delta / (size - 1))
    np.fill_diagonal(matrix, 1.0 - delta)
    return NoiseChannel(tuple(BASES), matrix)


def identity_channel():
    return symmetric_channel(0.0)


def corrupt_reads(reads, channel, seed):
    """
    Passes every base of every read independently through the channel.

    Args:
        reads (ReadSet): Noiseless reads over {A,C,G,T}.
        channel (NoiseChannel): The read channel.
        seed (int): Seed of the per-read noise substreams.

    Returns:
        ReadSet: Reads over the channel's output alphabet, true starts preserved.
    """
    if len(reads) == 0:
        return reads
    length = reads.read_length
    codes = np.stack([encode_bases(read.symbols) for read in reads])
    uniforms = np.stack([derive_rng(seed, NOISE_STREAM, read.id).random(length) for read in reads])

    cumulative = np.cumsum(channel.matrix, axis=1)
    cumulative[:, -1] = 1.0
    # first output symbol whose cumulative probability exceeds the uniform draw
    noisy = (uniforms[..., None] >= cumulative[codes]).sum(axis=-1)

    corrupted = tuple(
        Read(channel.decode(row), read.true_start, read.id) for read, row in zip(reads, noisy)
    )
    return ReadSet(corrupted, length, reads.genome_length, dict(reads.metadata))
