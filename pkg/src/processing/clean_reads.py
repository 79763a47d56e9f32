# src/processing/clean_reads.py

import os
from dataclasses import dataclass

import pandas as pd

from src.acquisition.channel import symmetric_channel
from src.acquisition.storage import (
    format_header_tokens,
    parse_header_tokens,
    read_channel,
    read_reads,
)
from src.errors import ConfigError, FileFormatError
from src.processing.alignment import CorrectionParams, find_good_alignments
from src.processing.consensus import CleanedRead, ml_consensus
from src.processing.kmers import extract_kmers

CLEANED_COLUMNS = ["id", "symbols", "cluster_size", "claimed_start"]


@dataclass(frozen=True)
class CorrectionResult:
    """Cleaned reads together with the clusters they came from."""

    cleaned: list
    clusters: list
    pool_size: int


def correct_reads(reads, params, channel):
    """
    Runs the whole correction stage: K-mer pool, alignment search, consensus.

    Args:
        reads (ReadSet): Noisy reads.
        params (CorrectionParams): Correction parameters.
        channel (NoiseChannel): Read channel.

    Returns:
        CorrectionResult: Cleaned reads in cluster order, the accepted clusters and the pool size.
    """
    pool = extract_kmers(reads, params.k)
    clusters = find_good_alignments(pool, params, channel)
    cleaned = [ml_consensus(cluster, channel, read_id=i) for i, cluster in enumerate(clusters)]
    return CorrectionResult(cleaned, clusters, len(pool))


def clean_reads(reads, params, channel):
    """extract_kmers, then find_good_alignments, then ml_consensus of every accepted cluster."""
    return correct_reads(reads, params, channel).cleaned


# --- Cleaned reads TSV ---

def write_cleaned_reads(cleaned, path, header=None):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    df = pd.DataFrame(
        {
            "id": [read.id for read in cleaned],
            "symbols": [read.symbols for read in cleaned],
            "cluster_size": [read.cluster_size for read in cleaned],
            "claimed_start": pd.array([read.claimed_start for read in cleaned], dtype="Int64"),
        },
        columns=CLEANED_COLUMNS,
    )
    with open(path, "w") as handle:
        handle.write(f"# {format_header_tokens(header or {})}\n")
    df.to_csv(path, sep="\t", header=False, index=False, mode="a", na_rep="NA")


def read_cleaned_reads(path):
    """
    Loads a cleaned-reads file.

    Returns:
        tuple[list[CleanedRead], dict[str, str]]: The reads (without their
        source clusters) and the header tokens.
    """
    with open(path) as handle:
        tokens = parse_header_tokens(handle.readline().strip(), "#")
    df = pd.read_csv(
        path,
        sep="\t",
        skiprows=1,
        header=None,
        names=CLEANED_COLUMNS,
        dtype={"id": "int64", "symbols": str, "cluster_size": "int64", "claimed_start": "Int64"},
        na_values=["NA"],
        keep_default_na=False,
    )
    if df["symbols"].isna().any():
        raise FileFormatError(f"'{path}' holds a cleaned read without symbols")
    cleaned = [
        CleanedRead(int(row.id), row.symbols, None,
                    None if pd.isna(row.claimed_start) else int(row.claimed_start), int(row.cluster_size))
        for row in df.itertuples(index=False)
    ]
    return cleaned, tokens


def clean_and_save_reads(reads_path, output_path, delta=None, channel_path=None, **overrides):
    """
    Loads noisy reads, cleans them and writes the cleaned reads.

    Args:
        reads_path (str): Noisy reads file.
        output_path (str): Destination cleaned-reads file.
        delta (float | None): Symmetric mis-read rate of the channel.
        channel_path (str | None): Channel matrix file (instead of delta).
        **overrides: CorrectionParams fields (alpha, beta, typicality_eps, m_basis, anchor_len, ...).

    Returns:
        CorrectionResult: The correction outcome.
    """
    print("--- Starting Read Correction ---")
    if not os.path.exists(reads_path):
        print(f"ERROR: Input file not found at '{reads_path}'.")
        raise FileNotFoundError(reads_path)
    if delta is not None and channel_path is not None:
        raise ConfigError("give exactly one of a mis-read rate or a channel file")

    reads = read_reads(reads_path)
    if delta is None and channel_path is None:
        if "delta" not in reads.metadata:
            raise ConfigError("reads header records no delta; give a mis-read rate or a channel file")
        delta = float(reads.metadata["delta"])
        print(f"  - Using delta={delta} from the reads header")
    channel = read_channel(channel_path) if channel_path else symmetric_channel(delta)
    params = CorrectionParams.from_read_length(reads.read_length, reads.genome_length, **overrides)
    print(f"  - N={len(reads)}, L={reads.read_length}, G={reads.genome_length}")
    print(f"  - K={params.k}, M={params.m}, tau={params.tau:.4f}, eps_typ={params.typicality_eps}")

    result = correct_reads(reads, params, channel)
    print(f"  - Pool of {result.pool_size} K-mers, {len(result.clusters)} accepted clusters")
    if not result.cleaned:
        print("WARNING: No cluster passed the typicality test; the cleaned-reads file is empty.")

    header = {"G": reads.genome_length, "K": params.k, "M": params.m, "tau": params.tau,
              "count": len(result.cleaned), "delta": delta, "channel": channel_path}
    write_cleaned_reads(result.cleaned, output_path, header)
    print(f"  - Saved to '{output_path}'")
    print("--- Read Correction Complete ---")
    return result
