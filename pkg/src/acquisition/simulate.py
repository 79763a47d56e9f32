# src/acquisition/simulate.py

import os

from src.acquisition.channel import corrupt_reads, symmetric_channel
from src.acquisition.genome import generate_genome
from src.acquisition.reads import sample_reads
from src.acquisition.storage import (
    read_channel,
    read_genome_fasta,
    read_reads,
    write_genome_fasta,
    write_reads,
)
from src.errors import ConfigError


def _require(path):
    if not os.path.exists(path):
        print(f"ERROR: Input file not found at '{path}'.")
        raise FileNotFoundError(path)


def generate_and_save_genome(length, distribution, seed, output_path):
    """
    Generates a circular i.i.d. genome and writes it as FASTA.

    Args:
        length (int): Genome length G.
        distribution (BaseDistribution): Base distribution Q.
        seed (int): Genome seed.
        output_path (str): Destination FASTA path.

    Returns:
        Genome: The generated genome.
    """
    print("--- Starting Genome Generation ---")
    genome = generate_genome(length, distribution, seed)
    write_genome_fasta(genome, output_path, seed=seed)
    print(f"  - G={genome.length}, Q={distribution.to_token()}, seed={seed}")
    print(f"  - Saved to '{output_path}'")
    print("--- Genome Generation Complete ---")
    return genome


def sample_and_save_reads(genome_path, count, length, seed, output_path):
    """Samples N reads of length L from the genome stored at `genome_path`."""
    print("--- Starting Read Sampling ---")
    _require(genome_path)
    genome, _ = read_genome_fasta(genome_path)
    reads = sample_reads(genome, count, length, seed)
    write_reads(reads, output_path, {"seed": seed})
    print(f"  - Sampled {len(reads)} reads of length {length} from G={genome.length}")
    print(f"  - Saved to '{output_path}'")
    print("--- Read Sampling Complete ---")
    return reads


def corrupt_and_save_reads(reads_path, seed, output_path, delta=None, channel_path=None):
    """
    Passes stored reads through a symmetric channel or a channel from file.

    Exactly one of `delta` and `channel_path` must be given.
    """
    print("--- Starting Read Corruption ---")
    if (delta is None) == (channel_path is None):
        raise ConfigError("give exactly one of a mis-read rate or a channel file")
    _require(reads_path)
    reads = read_reads(reads_path)

    if channel_path is not None:
        _require(channel_path)
        channel = read_channel(channel_path)
        header = {"channel": channel_path}
    else:
        channel = symmetric_channel(delta)
        header = {"delta": delta}
    header["noise_seed"] = seed
    if "seed" in reads.metadata:
        header["seed"] = reads.metadata["seed"]

    noisy = corrupt_reads(reads, channel, seed)
    write_reads(noisy, output_path, header)
    print(f"  - Corrupted {len(noisy)} reads, channel error rate {channel.error_rate:.4f}")
    print(f"  - Saved to '{output_path}'")
    print("--- Read Corruption Complete ---")
    return noisy
