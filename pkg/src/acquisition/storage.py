# src/acquisition/storage.py

"""
File formats for genomes, reads and channels.

- Genome: single-record FASTA, header `>genome G=.. Q=a,c,g,t seed=..`.
- Reads: a `#` header line of key=value tokens, then tab-separated
  `id  true_start  symbols` rows (0-based starts).
- Channel: first line the output alphabet, then one row of reals per base A, C, G, T.
"""
import os

import numpy as np
import pandas as pd

from src.acquisition.channel import NoiseChannel
from src.acquisition.genome import BaseDistribution, Genome
from src.acquisition.reads import Read, ReadSet
from src.config import BASES, FASTA_LINE_WIDTH
from src.errors import FileFormatError

READ_COLUMNS = ["id", "true_start", "symbols"]


def format_header_tokens(values):
    return " ".join(f"{key}={value}" for key, value in values.items() if value is not None)


def parse_header_tokens(line, marker):
    """Parses `<marker>name key=value key=value` into a dict of strings."""
    if not line.startswith(marker):
        raise FileFormatError(f"expected a header line starting with '{marker}'")
    tokens = {}
    for token in line[len(marker):].split():
        if "=" in token:
            key, value = token.split("=", 1)
            tokens[key] = value
    return tokens


def _ensure_parent(path):
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


# --- Genome FASTA ---

def write_genome_fasta(genome, path, seed=None):
    _ensure_parent(path)
    header = format_header_tokens(
        {"G": genome.length, "Q": genome.source_distribution.to_token(), "seed": seed}
    )
    seq = genome.sequence
    with open(path, "w") as handle:
        handle.write(f">genome {header}\n")
        for i in range(0, len(seq), FASTA_LINE_WIDTH):
            handle.write(seq[i : i + FASTA_LINE_WIDTH] + "\n")


def read_genome_fasta(path):
    """
    Loads a single-record genome FASTA.

    Returns:
        tuple[Genome, dict[str, str]]: The genome and its header tokens.
    """
    with open(path) as handle:
        lines = [line.strip() for line in handle if line.strip()]
    if not lines:
        raise FileFormatError(f"'{path}' is empty")
    tokens = parse_header_tokens(lines[0], ">")
    if any(line.startswith(">") for line in lines[1:]):
        raise FileFormatError(f"'{path}' holds more than one FASTA record")
    sequence = "".join(lines[1:]).upper()
    distribution = BaseDistribution.parse(tokens["Q"]) if "Q" in tokens else BaseDistribution.uniform()
    genome = Genome.from_sequence(sequence, distribution)
    if "G" in tokens and int(tokens["G"]) != genome.length:
        raise FileFormatError(f"header says G={tokens['G']} but the record has {genome.length} bases")
    return genome, tokens


# --- Reads TSV ---

def write_reads(reads, path, header=None):
    _ensure_parent(path)
    values = {"G": reads.genome_length, "L": reads.read_length, "N": len(reads)}
    values.update(header or {})
    df = pd.DataFrame(
        {
            "id": [read.id for read in reads],
            "true_start": pd.array([read.true_start for read in reads], dtype="Int64"),
            "symbols": [read.symbols for read in reads],
        },
        columns=READ_COLUMNS,
    )
    with open(path, "w") as handle:
        handle.write(f"# {format_header_tokens(values)}\n")
    df.to_csv(path, sep="\t", header=False, index=False, mode="a", na_rep="NA")


def read_reads(path):
    """Loads a reads file written by write_reads; header tokens go to metadata."""
    with open(path) as handle:
        tokens = parse_header_tokens(handle.readline().strip(), "#")
    df = pd.read_csv(
        path,
        sep="\t",
        skiprows=1,
        header=None,
        names=READ_COLUMNS,
        dtype={"id": "int64", "true_start": "Int64", "symbols": str},
        na_values=["NA"],
        keep_default_na=False,
    )
    if df.empty:
        raise FileFormatError(f"'{path}' holds no reads")
    lengths = df["symbols"].str.len()
    read_length = int(tokens.get("L", lengths.iloc[0]))
    genome_length = int(tokens["G"]) if "G" in tokens else None
    if genome_length is None:
        raise FileFormatError(f"'{path}' header does not record the genome length G")
    reads = tuple(
        Read(symbols, None if pd.isna(start) else int(start), int(read_id))
        for read_id, start, symbols in df.itertuples(index=False)
    )
    return ReadSet(reads, read_length, genome_length, tokens)


# --- Channel matrix ---

def write_channel(channel, path):
    _ensure_parent(path)
    with open(path, "w") as handle:
        handle.write(" ".join(channel.output_alphabet) + "\n")
        for row in channel.matrix:
            handle.write(" ".join(repr(float(p)) for p in row) + "\n")


def read_channel(path):
    with open(path) as handle:
        lines = [line.split() for line in handle if line.strip()]
    if len(lines) != len(BASES) + 1:
        raise FileFormatError(f"'{path}' must hold an alphabet line and {len(BASES)} matrix rows")
    alphabet = tuple(lines[0])
    try:
        matrix = np.array([[float(v) for v in row] for row in lines[1:]])
    except ValueError as exc:
        raise FileFormatError(f"'{path}' holds a non-numeric channel entry") from exc
    return NoiseChannel(alphabet, matrix)
