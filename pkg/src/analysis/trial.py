# src/analysis/trial.py

"""
One seeded end-to-end trial: generate, sample, corrupt, correct, assemble, evaluate.

Every random stage draws from its own substream of the trial seed, so a
TrialResult is a pure function of its TrialConfig (wall time aside).
"""
import math
import time
from dataclasses import dataclass, field
from enum import Enum

from src.acquisition.channel import corrupt_reads, symmetric_channel
from src.acquisition.genome import BaseDistribution, generate_genome
from src.acquisition.reads import sample_reads
from src.acquisition.storage import read_channel
from src.analysis.coverage import lander_waterman
from src.assembly.assemble_reads import default_min_overlap, default_theta
from src.assembly.greedy import greedy_assemble
from src.assembly.layout import evaluate_layout, placement_errors
from src.config import COVERAGE_EPSILON, COVERAGE_TARGET
from src.errors import ConfigError, RangeError
from src.processing.alignment import CorrectionParams
from src.processing.clean_reads import correct_reads
from src.processing.consensus import CleanedRead
from src.processing.quality import cluster_purity_violations, covered_fraction, quality_batch


class Pipeline(str, Enum):
    NOISELESS_GREEDY = "noiseless_greedy"
    DIRECT_NOISY_GREEDY = "direct_noisy_greedy"
    CORRECT_THEN_GREEDY = "correct_then_greedy"


class Failure(str, Enum):
    NO_COVERAGE = "no-coverage"
    LAYOUT_ERROR = "layout-error"
    MISASSEMBLED = "misassembled"
    FRAGMENTED = "fragmented"


@dataclass(frozen=True)
class TrialConfig:
    """
    Exactly one of read_length / lbar and one of count / multiple must be given.
    The noisy pipelines need a channel, as delta or channel_path. Assembly uses
    w_min = ceil(Lcrit * log2 G) + 1 unless w_min is given or exact_min_overlap
    asks for the pure largest-overlap-first greedy (w_min = 1).
    """

    genome_length: int
    pipeline: Pipeline = Pipeline.NOISELESS_GREEDY
    seed: int = 1
    distribution: BaseDistribution = BaseDistribution.uniform()
    read_length: int | None = None
    lbar: float | None = None
    count: int | None = None
    multiple: float | None = None
    epsilon: float = COVERAGE_EPSILON
    delta: float | None = None
    channel_path: str | None = None
    theta: float | None = None
    w_min: int | None = None
    exact_min_overlap: bool = False
    alpha: float | None = None
    beta: float | None = None
    typicality_eps: float | None = None
    m_basis: str | None = None
    anchor_len: int | None = None
    k: int | None = None
    m: int | None = None
    tau: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "pipeline", Pipeline(self.pipeline))

    def correction_overrides(self):
        names = ("alpha", "beta", "typicality_eps", "m_basis", "anchor_len", "k", "m", "tau")
        return {name: getattr(self, name) for name in names if getattr(self, name) is not None}


@dataclass(frozen=True)
class ResolvedConfig:
    read_length: int
    count: int
    params: CorrectionParams
    theta: float
    w_min: int
    channel: object = None


@dataclass(frozen=True)
class TrialResult:
    """
    Attributes:
        success (bool): Perfect reconstruction for noiseless_greedy, perfect layout otherwise.
        d_max (float): Largest quality d over the layout reads (1.0 when there are none).
        failure (str | None): Failure category, or "error: ..." when a stage raised.
        wall_time (float): Seconds; excluded from equality.
    """

    perfect_layout: bool
    perfect_reconstruction: bool
    d_max: float
    cleaned_count: int
    covered_fraction: float
    purity_violations: float
    contig_count: int
    success: bool
    failure: str | None
    seed: int
    wall_time: float = field(default=0.0, compare=False)


def resolve_config(config):
    """
    Derives L, N, the correction parameters, theta and w_min of a trial.

    Returns:
        ResolvedConfig: The concrete values the trial runs with.
    """
    g = config.genome_length
    if (config.read_length is None) == (config.lbar is None):
        raise ConfigError("give exactly one of read_length and lbar")
    if (config.count is None) == (config.multiple is None):
        raise ConfigError("give exactly one of count and multiple")
    if config.delta is not None and config.channel_path is not None:
        raise ConfigError("give at most one of delta and channel_path")

    length = config.read_length if config.read_length is not None else round(config.lbar * math.log2(g))
    if not 1 <= length <= g:
        raise RangeError(f"read length {length} outside [1, {g}]")
    if config.count is not None:
        count = config.count
    else:
        count = math.ceil(config.multiple * lander_waterman(g, length, config.epsilon).ncov)

    channel = None
    if config.pipeline is not Pipeline.NOISELESS_GREEDY:
        if config.channel_path is not None:
            channel = read_channel(config.channel_path)
        elif config.delta is not None:
            channel = symmetric_channel(config.delta)
        else:
            raise ConfigError(f"pipeline {config.pipeline.value} needs a delta or a channel file")

    overrides = config.correction_overrides()
    overrides.setdefault("source_distribution", config.distribution)
    params = CorrectionParams.from_read_length(length, g, **overrides)

    theta = config.theta
    if theta is None:
        cluster_size = params.m if config.pipeline is Pipeline.CORRECT_THEN_GREEDY else None
        theta = default_theta(channel, config.distribution, cluster_size)
    if config.w_min is not None:
        w_min = config.w_min
    elif config.exact_min_overlap:
        w_min = 1
    else:
        w_min = default_min_overlap(g, config.distribution)
    return ResolvedConfig(length, count, params, theta, w_min, channel)


def _classify(covered, evaluation, misplaced_in_assembly, contig_count, reconstructed):
    if covered < COVERAGE_TARGET:
        return Failure.NO_COVERAGE
    if not evaluation.perfect_layout:
        return Failure.LAYOUT_ERROR
    if misplaced_in_assembly:
        return Failure.MISASSEMBLED
    if not reconstructed:
        return Failure.FRAGMENTED if contig_count > 1 else Failure.MISASSEMBLED
    return None


def run_trial(config):
    """
    Runs one seeded trial end to end.

    Any exception raised by a stage is recorded in TrialResult.failure as
    "error: <type>: <message>"; configuration errors raise.

    Args:
        config (TrialConfig): The trial configuration.

    Returns:
        TrialResult: The outcome.
    """
    started = time.perf_counter()
    resolved = resolve_config(config)
    seed = config.seed
    g = config.genome_length
    try:
        genome = generate_genome(g, config.distribution, seed)
        reads = sample_reads(genome, resolved.count, resolved.read_length, seed)
        clusters = []
        if config.pipeline is Pipeline.NOISELESS_GREEDY:
            layout = [CleanedRead(r.id, r.symbols, None, r.true_start, 1) for r in reads]
        else:
            noisy = corrupt_reads(reads, resolved.channel, seed)
            if config.pipeline is Pipeline.DIRECT_NOISY_GREEDY:
                layout = [CleanedRead(r.id, r.symbols, None, r.true_start, 1) for r in noisy]
            else:
                correction = correct_reads(noisy, resolved.params, resolved.channel)
                layout, clusters = correction.cleaned, correction.clusters

        if not layout:
            return TrialResult(False, False, 1.0, 0, 0.0, 0.0, 0, False, Failure.NO_COVERAGE.value, seed,
                               time.perf_counter() - started)

        reports = quality_batch(layout, genome)
        k = len(layout[0].symbols)
        covered = covered_fraction(reports, k, g, resolved.params.tau)
        d_max = max(report.d for report in reports)

        assembly = greedy_assemble([read.symbols for read in layout], resolved.w_min, resolved.theta)
        assembled = assembly.contigs[0] if len(assembly.contigs) == 1 else None
        evaluation = evaluate_layout(layout, genome, resolved.params.tau, assembled, reports)
        misplaced = placement_errors(assembly, {i: read.claimed_start for i, read in enumerate(layout)}, g)

        perfect_layout = evaluation.perfect_layout and misplaced == 0 and covered >= COVERAGE_TARGET
        reconstructed = assembly.circular and evaluation.perfect_reconstruction
        failure = _classify(covered, evaluation, misplaced, len(assembly.contigs), reconstructed)
        success = reconstructed if config.pipeline is Pipeline.NOISELESS_GREEDY else perfect_layout
        if success:
            failure = None
        elif failure is None:
            failure = Failure.MISASSEMBLED
        return TrialResult(
            perfect_layout=perfect_layout,
            perfect_reconstruction=reconstructed,
            d_max=float(d_max),
            cleaned_count=len(layout) if config.pipeline is Pipeline.CORRECT_THEN_GREEDY else 0,
            covered_fraction=covered,
            purity_violations=cluster_purity_violations(clusters),
            contig_count=len(assembly.contigs),
            success=bool(success),
            failure=None if failure is None else Failure(failure).value,
            seed=seed,
            wall_time=time.perf_counter() - started,
        )
    except Exception as exc:
        return TrialResult(False, False, 1.0, 0, 0.0, 0.0, 0, False, f"error: {type(exc).__name__}: {exc}", seed,
                           time.perf_counter() - started)
