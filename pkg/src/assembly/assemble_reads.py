# src/assembly/assemble_reads.py

import math
import os

import pandas as pd

from src.acquisition.channel import symmetric_channel
from src.acquisition.genome import BaseDistribution
from src.acquisition.storage import read_channel, read_reads
from src.analysis.info_theory import lcrit
from src.assembly.greedy import greedy_assemble
from src.config import FASTA_LINE_WIDTH, THETA_FACTOR
from src.errors import ConfigError
from src.processing.clean_reads import read_cleaned_reads
from src.processing.consensus import consensus_error_rate


def default_min_overlap(genome_length, distribution):
    """ceil(Lcrit * log2 G) + 1, the shortest overlap longer than the typical longest repeat."""
    critical = lcrit(distribution)
    if math.isinf(critical):
        raise ConfigError("a deterministic source has no finite minimum overlap; give w_min explicitly")
    return math.ceil(critical * math.log2(genome_length)) + 1


def default_theta(channel, distribution, cluster_size=None):
    """
    Mismatch threshold for assembling reads that went through `channel`.

    Direct reads get THETA_FACTOR times the channel error rate; cleaned reads
    (cluster_size given) get THETA_FACTOR times the exact consensus error rate.
    """
    if channel is None:
        return 0.0
    if cluster_size is None:
        rate = channel.error_rate
    else:
        rate = consensus_error_rate(channel, cluster_size, distribution)
    return min(1.0, THETA_FACTOR * rate)


# --- Output Writers ---

def write_contigs(result, path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w") as handle:
        for index, contig in enumerate(result.contigs):
            shape = "circular" if result.circular else "linear"
            handle.write(f">contig_{index} length={len(contig)} topology={shape}\n")
            for i in range(0, len(contig), FASTA_LINE_WIDTH):
                handle.write(contig[i : i + FASTA_LINE_WIDTH] + "\n")


def write_merge_log(result, path):
    """Tab-separated audit trail of every link and absorption, in merge order."""
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    df = pd.DataFrame(
        [(r.left_id, r.right_id, r.width, r.mismatches, r.kind) for r in result.merge_log],
        columns=["left_id", "right_id", "width", "mismatches", "kind"],
    )
    df.to_csv(path, sep="\t", index=False)


def _load_channel(delta, channel_path, tokens):
    if channel_path:
        return read_channel(channel_path)
    if delta is not None:
        return symmetric_channel(delta)
    if tokens.get("channel"):
        return read_channel(tokens["channel"])
    if "delta" in tokens:
        return symmetric_channel(float(tokens["delta"]))
    return None


def assemble_and_save_reads(input_path, output_path, cleaned=False, theta=None, w_min=None, circular=True,
                            log_path=None, delta=None, channel_path=None, distribution=None):
    """
    Assembles raw or cleaned reads and writes the contigs as FASTA.

    Args:
        input_path (str): Reads file, or cleaned-reads file when `cleaned` is set.
        output_path (str): Destination contigs FASTA.
        cleaned (bool): Whether the input holds cleaned reads.
        theta (float | None): Mismatch threshold; derived from the channel when omitted.
        w_min (int | None): Minimum overlap; ceil(Lcrit * log2 G) + 1 when omitted.
        circular (bool): Whether to attempt closing a single chain.
        log_path (str | None): Where to write the merge log.
        delta (float | None): Symmetric mis-read rate, when not recorded in the header.
        channel_path (str | None): Channel matrix file, when not recorded in the header.
        distribution (BaseDistribution | None): Source distribution Q (uniform by default).

    Returns:
        AssemblyResult: The assembly.
    """
    print("--- Starting Assembly ---")
    if not os.path.exists(input_path):
        print(f"ERROR: Input file not found at '{input_path}'.")
        raise FileNotFoundError(input_path)
    distribution = distribution or BaseDistribution.uniform()

    if cleaned:
        reads, tokens = read_cleaned_reads(input_path)
        symbols = [read.symbols for read in reads]
        cluster_size = int(tokens["M"]) if "M" in tokens else None
    else:
        read_set = read_reads(input_path)
        tokens = read_set.metadata
        symbols = [read.symbols for read in read_set]
        cluster_size = None
    if "G" not in tokens:
        raise ConfigError(f"'{input_path}' header does not record the genome length G")
    genome_length = int(tokens["G"])

    if theta is None:
        channel = _load_channel(delta, channel_path, tokens)
        if cleaned and (channel is None or cluster_size is None):
            raise ConfigError("cleaned reads carry no channel or cluster size; give --theta")
        theta = default_theta(channel, distribution, cluster_size)
    if w_min is None:
        w_min = default_min_overlap(genome_length, distribution)
    print(f"  - {len(symbols)} reads, theta={theta:.4f}, w_min={w_min}")

    if not symbols:
        print("WARNING: No reads to assemble.")
        print("--- Assembly Complete ---")
        return None

    result = greedy_assemble(symbols, w_min, theta, circular=circular)
    write_contigs(result, output_path)
    lengths = sorted((len(c) for c in result.contigs), reverse=True)
    print(f"  - {len(result.contigs)} contig(s), longest {lengths[0]}, circular={result.circular}")
    if result.closure_ambiguous:
        print("WARNING: The closing overlap is ambiguous; the contig was left linear.")
    print(f"  - Contigs saved to '{output_path}'")
    if log_path:
        write_merge_log(result, log_path)
        print(f"  - Merge log saved to '{log_path}'")
    print("--- Assembly Complete ---")
    return result
