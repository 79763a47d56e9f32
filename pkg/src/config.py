# src/config.py

"""
Central configuration file for the noisy shotgun assembly laboratory.
This file contains all the key parameters for genome simulation, error
correction, assembly and the experiment sweeps to ensure consistency across
all scripts.
"""
import os

from dotenv import dotenv_values

from src.errors import ConfigError

# --- Alphabet ---

# Nucleotides in their fixed order; this order is also the ML tie-break order
BASES = "ACGT"

# --- Genome Model Parameters ---

# Default genome length and base distribution for the `gen` stage
GENOME_LENGTH = 10_000
BASE_DISTRIBUTION = (0.25, 0.25, 0.25, 0.25)

# Base seed used when none is given on the command line
SEED = 1

# Line width of FASTA sequence records
FASTA_LINE_WIDTH = 60

# --- Coverage Parameters ---

# Lander-Waterman target failure probability for N_cov
COVERAGE_EPSILON = 0.05

# --- Threshold Calculator Parameters ---

# delta* is searched by bisection on [0, DELTA_SEARCH_UPPER]
DELTA_SEARCH_UPPER = 0.75
DELTA_TOLERANCE = 1e-6

# Default comparison mode for the alignment threshold condition
THRESHOLD_MODE = "example_consistent"

# Step of the i_read(delta) grid written by the `thresholds` stage
DELTA_GRID_STEP = 0.01

# --- Error Correction Parameters ---

# K = L - ceil(L**ALPHA), M = max(2, round(BETA * log2 X))
ALPHA = 0.5
BETA = 0.3
M_BASIS = "log_of_G"

# Multiplicative band of the typicality test
TYPICALITY_EPS = 0.35
TYPICALITY_ORDER = "marginals_and_pairs"

# Positive-probability cells are pooled until their expected count reaches this
MIN_CELL_COUNT = 8

# The full joint test tabulates |Y|**M cells; larger tables are refused
FULL_JOINT_MAX_CELLS = 4096

# Candidate search: anchor window length, Hamming radius factor (rho = factor * delta)
ANCHOR_LENGTH = 12
RADIUS_FACTOR = 2.5

# Anchor windows shared by more reads than this are skipped as uninformative
MAX_ANCHOR_BUCKET = 64

# Candidate groups are capped at GROUP_CAP_FACTOR * M members
GROUP_CAP_FACTOR = 4

# Block length of the genome q-gram index used by batched quality scans
QUALITY_BLOCK_LENGTH = 8

# --- Assembly Parameters ---

# theta = THETA_FACTOR * residual error rate of the reads being assembled
THETA_FACTOR = 3.0

# Rows of one-hot suffixes compared per block in the approximate overlap scan
OVERLAP_BLOCK_ROWS = 1024

# Symbol written for uncovered positions of a layout consensus
GAP_SYMBOL = "-"

# --- Experiment Harness Parameters ---

# Fraction of the genome the layout reads must cover for a perfect layout
COVERAGE_TARGET = 0.99

# Success frequency at which the empirical critical length is read off
SUCCESS_LEVEL = 0.5

# Parallel workers for sweeps (joblib semantics: -1 uses every core)
N_JOBS = 1

# Trials per sweep cell
TRIALS_PER_CELL = 20

# --- File Path Parameters ---

# Defines the directory for simulated genomes, reads and cleaned reads
DATA_DIR = "data"

# Defines the directory for assemblies, threshold reports and sweep results
RESULTS_DIR = "results"

# --- Specific File Paths (Derived from above) ---

GENOME_PATH = os.path.join(DATA_DIR, "genome.fa")
READS_PATH = os.path.join(DATA_DIR, "reads.tsv")
NOISY_READS_PATH = os.path.join(DATA_DIR, "noisy_reads.tsv")
CLEANED_READS_PATH = os.path.join(DATA_DIR, "cleaned_reads.tsv")
CONTIGS_PATH = os.path.join(RESULTS_DIR, "contigs.fa")
THRESHOLD_GRID_PATH = os.path.join(RESULTS_DIR, "i_read_grid.csv")
SWEEP_RESULTS_PATH = os.path.join(RESULTS_DIR, "sweep_results.csv")
SWEEP_TRIALS_PATH = os.path.join(RESULTS_DIR, "sweep_trials.log")


def load_config_file(path, allowed_keys=None):
    """
    Reads a flat key=value configuration file.

    Args:
        path (str): Path to the configuration file.
        allowed_keys (Iterable[str] | None): If given, any other key is rejected.

    Returns:
        dict[str, str]: Keys normalised to snake_case, values as raw strings.
    """
    if not os.path.exists(path):
        raise ConfigError(f"configuration file not found at '{path}'")

    values = {}
    for key, value in dotenv_values(path).items():
        if value is None:
            raise ConfigError(f"configuration key '{key}' has no value")
        values[key.strip().replace("-", "_").lower()] = value.strip()

    if allowed_keys is not None:
        unknown = sorted(set(values) - set(allowed_keys))
        if unknown:
            raise ConfigError(f"unknown configuration keys: {', '.join(unknown)}")
    return values
