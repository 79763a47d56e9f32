# main.py

import sys
import os
import argparse
from dataclasses import asdict

# Add the project root to the Python path.
sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from src import config
from src.acquisition.genome import BaseDistribution
from src.acquisition.simulate import corrupt_and_save_reads, generate_and_save_genome, sample_and_save_reads
from src.acquisition.storage import read_genome_fasta
from src.analysis.coverage import lander_waterman
from src.analysis.info_theory import ThresholdMode
from src.analysis.sweep import SweepGrid, run_and_save_sweep
from src.analysis.thresholds import format_report, run_threshold_report
from src.analysis.trial import Pipeline, TrialConfig, resolve_config, run_trial
from src.assembly.assemble_reads import assemble_and_save_reads
from src.errors import ConfigError, DistributionError, RangeError
from src.processing.clean_reads import clean_and_save_reads

# Exit codes
EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

BOOLEAN_KEYS = {"circular", "exact_min_overlap"}


class PipelineArgumentParser(argparse.ArgumentParser):
    """Reports usage errors with exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"ERROR: {message}", file=sys.stderr)
        sys.exit(EXIT_USAGE)


def float_list(text):
    try:
        return tuple(float(tok) for tok in text.replace(",", " ").split())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got '{text}'") from exc


def name_list(text):
    return tuple(tok for tok in text.replace(",", " ").split())


def _add_channel_flags(parser):
    group = parser.add_mutually_exclusive_group()
    group.add_argument("--delta", type=float, help="Symmetric mis-read probability.")
    group.add_argument("--channel-file", help="Channel matrix file (alphabet line + 4 rows).")


def _add_correction_flags(parser):
    parser.add_argument("--alpha", type=float, help="K = L - ceil(L**alpha).")
    parser.add_argument("--beta", type=float, help="M = max(2, round(beta * log2 X)).")
    parser.add_argument("--eps-typ", type=float, help="Typicality band half-width.")
    parser.add_argument("--m-basis", choices=["log_of_G", "log_of_L"])
    parser.add_argument("--anchor-len", type=int, help="Exact-match anchor window length.")


def build_parser():
    parser = PipelineArgumentParser(description="Run the noisy shotgun assembly pipeline.")
    parser.add_argument("--config", help="Flat key=value file; keys are long flag names.")
    stages = parser.add_subparsers(dest="command", required=True, metavar="stage")
    parser.stages = stages

    gen = stages.add_parser("gen", help="Generate a circular i.i.d. genome.")
    gen.add_argument("--length", type=int, default=config.GENOME_LENGTH)
    gen.add_argument("--q", default="uniform", help="'uniform' or four comma-separated probabilities.")
    gen.add_argument("--seed", type=int, default=config.SEED)
    gen.add_argument("--out", default=config.GENOME_PATH)

    reads = stages.add_parser("reads", help="Sample reads from a genome.")
    reads.add_argument("--genome", default=config.GENOME_PATH)
    size = reads.add_mutually_exclusive_group()
    size.add_argument("--length", type=int)
    size.add_argument("--lbar", type=float)
    number = reads.add_mutually_exclusive_group()
    number.add_argument("--count", type=int)
    number.add_argument("--multiple", type=float)
    reads.add_argument("--seed", type=int, default=config.SEED)
    reads.add_argument("--out", default=config.READS_PATH)

    corrupt = stages.add_parser("corrupt", help="Pass reads through a noisy channel.")
    corrupt.add_argument("--reads", default=config.READS_PATH)
    _add_channel_flags(corrupt)
    corrupt.add_argument("--seed", type=int, default=config.SEED)
    corrupt.add_argument("--out", default=config.NOISY_READS_PATH)

    correct = stages.add_parser("correct", help="Clean noisy reads by typicality-tested alignments.")
    correct.add_argument("--reads", default=config.NOISY_READS_PATH)
    _add_channel_flags(correct)
    _add_correction_flags(correct)
    correct.add_argument("--out", default=config.CLEANED_READS_PATH)

    assemble = stages.add_parser("assemble", help="Greedy assembly of raw or cleaned reads.")
    source = assemble.add_mutually_exclusive_group()
    source.add_argument("--reads")
    source.add_argument("--cleaned")
    _add_channel_flags(assemble)
    assemble.add_argument("--theta", type=float)
    assemble.add_argument("--w-min", type=int)
    assemble.add_argument("--circular", action=argparse.BooleanOptionalAction, default=True)
    assemble.add_argument("--out", default=config.CONTIGS_PATH)
    assemble.add_argument("--log")

    thresholds = stages.add_parser("thresholds", help="Evaluate the alignment threshold condition.")
    thresholds.add_argument("--q", default="uniform")
    _add_channel_flags(thresholds)
    thresholds.add_argument("--mode", choices=[m.value for m in ThresholdMode], default=config.THRESHOLD_MODE)
    thresholds.add_argument("--grid", type=float, help="Step of an i_read(delta) grid.")
    thresholds.add_argument("--grid-out", default=config.THRESHOLD_GRID_PATH)
    thresholds.add_argument("--genome-length", type=int)
    thresholds.add_argument("--read-length", type=int)

    sweep = stages.add_parser("sweep", help="Monte Carlo sweep over Lbar, coverage multiple and delta.")
    sweep.add_argument("--genome-length", type=int, default=config.GENOME_LENGTH)
    sweep.add_argument("--q", default="uniform")
    sweep.add_argument("--lbar", type=float_list, default="0.5,1.0,1.5,2.0")
    sweep.add_argument("--multiple", type=float_list, default="1.5")
    sweep.add_argument("--delta", type=float_list, default="0.0")
    sweep.add_argument("--pipelines", type=name_list, default=Pipeline.NOISELESS_GREEDY.value)
    sweep.add_argument("--trials", type=int, default=config.TRIALS_PER_CELL)
    sweep.add_argument("--seed", type=int, default=config.SEED)
    sweep.add_argument("--jobs", type=int, default=config.N_JOBS)
    sweep.add_argument("--out", default=config.SWEEP_RESULTS_PATH)
    sweep.add_argument("--trials-log", default=config.SWEEP_TRIALS_PATH)
    sweep.add_argument("--exact-min-overlap", action="store_true",
                       help="Assemble with w_min = 1 instead of ceil(Lcrit * log2 G) + 1.")

    trial = stages.add_parser("trial", help="Run one seeded end-to-end trial.")
    trial.add_argument("--genome-length", type=int, default=config.GENOME_LENGTH)
    trial.add_argument("--q", default="uniform")
    size = trial.add_mutually_exclusive_group()
    size.add_argument("--length", type=int)
    size.add_argument("--lbar", type=float)
    number = trial.add_mutually_exclusive_group()
    number.add_argument("--count", type=int)
    number.add_argument("--multiple", type=float)
    _add_channel_flags(trial)
    trial.add_argument("--pipeline", choices=[p.value for p in Pipeline], default=Pipeline.NOISELESS_GREEDY.value)
    trial.add_argument("--seed", type=int, default=config.SEED)
    trial.add_argument("--theta", type=float)
    trial.add_argument("--w-min", type=int)
    trial.add_argument("--exact-min-overlap", action="store_true",
                       help="Assemble with w_min = 1 unless --w-min is given.")
    _add_correction_flags(trial)
    return parser


def _parse_bool(key, value):
    lowered = value.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"configuration key '{key}' expects a boolean, got '{value}'")


def parse_arguments(argv=None):
    """Parses the command line; a --config file supplies defaults that flags override."""
    parser = build_parser()
    args = parser.parse_args(argv)
    if not args.config:
        return args

    stage = parser.stages.choices[args.command]
    allowed = {action.dest for action in stage._actions if action.dest != "help"}
    values = config.load_config_file(args.config, allowed_keys=allowed)
    for key in BOOLEAN_KEYS & set(values):
        values[key] = _parse_bool(key, values[key])
    stage.set_defaults(**values)
    return parser.parse_args(argv)


# --- Stage Runners ---

def _read_size(args, genome_length):
    if args.length is None and args.lbar is None:
        raise ConfigError("give --length or --lbar")
    if args.count is None and args.multiple is None:
        raise ConfigError("give --count or --multiple")
    sizes = TrialConfig(genome_length, read_length=args.length, lbar=args.lbar, count=args.count,
                        multiple=args.multiple, exact_min_overlap=True)
    resolved = resolve_config(sizes)
    return resolved.read_length, resolved.count


def run_gen(args):
    generate_and_save_genome(args.length, BaseDistribution.parse(args.q), args.seed, args.out)


def run_reads(args):
    if not os.path.exists(args.genome):
        print(f"ERROR: Input file not found at '{args.genome}'.")
        raise FileNotFoundError(args.genome)
    genome, _ = read_genome_fasta(args.genome)
    length, count = _read_size(args, genome.length)
    if args.multiple is not None:
        ncov = lander_waterman(genome.length, length, config.COVERAGE_EPSILON).ncov
        print(f"  - Ncov={ncov}, sampling N={count} reads")
    sample_and_save_reads(args.genome, count, length, args.seed, args.out)


def run_corrupt(args):
    corrupt_and_save_reads(args.reads, args.seed, args.out, delta=args.delta, channel_path=args.channel_file)


def _correction_overrides(args):
    return {
        "alpha": args.alpha,
        "beta": args.beta,
        "typicality_eps": args.eps_typ,
        "m_basis": args.m_basis,
        "anchor_len": args.anchor_len,
    }


def run_correct(args):
    clean_and_save_reads(args.reads, args.out, delta=args.delta, channel_path=args.channel_file,
                         **_correction_overrides(args))


def run_assemble(args):
    cleaned = args.cleaned is not None
    input_path = args.cleaned if cleaned else (args.reads or config.READS_PATH)
    assemble_and_save_reads(input_path, args.out, cleaned=cleaned, theta=args.theta, w_min=args.w_min,
                            circular=args.circular, log_path=args.log, delta=args.delta,
                            channel_path=args.channel_file)


def run_thresholds(args):
    if args.delta is None and args.channel_file is None:
        raise ConfigError("give --delta or --channel-file")
    run_threshold_report(BaseDistribution.parse(args.q), args.mode, delta=args.delta,
                         channel_path=args.channel_file, grid_step=args.grid,
                         grid_path=args.grid_out if args.grid else None,
                         genome_length=args.genome_length, read_length=args.read_length)


def run_sweep_stage(args):
    grid = SweepGrid(
        genome_length=args.genome_length,
        lbar=args.lbar,
        multiple=args.multiple,
        delta=args.delta,
        pipelines=args.pipelines,
        trials=args.trials,
        seed=args.seed,
        distribution=BaseDistribution.parse(args.q),
        overrides={"exact_min_overlap": True} if args.exact_min_overlap else {},
    )
    run_and_save_sweep(grid, args.out, args.trials_log, n_jobs=args.jobs)


def run_trial_stage(args):
    print("--- Starting Trial ---")
    trial_config = TrialConfig(
        genome_length=args.genome_length,
        pipeline=args.pipeline,
        seed=args.seed,
        distribution=BaseDistribution.parse(args.q),
        read_length=args.length,
        lbar=args.lbar,
        count=args.count,
        multiple=args.multiple,
        delta=args.delta,
        channel_path=args.channel_file,
        theta=args.theta,
        w_min=args.w_min,
        exact_min_overlap=args.exact_min_overlap,
        **{key: value for key, value in _correction_overrides(args).items() if value is not None},
    )
    result = run_trial(trial_config)
    print(format_report(asdict(result)))
    if result.failure and result.failure.startswith("error"):
        print(f"WARNING: A stage failed: {result.failure}")
    print("--- Trial Complete ---")


RUNNERS = {
    "gen": run_gen,
    "reads": run_reads,
    "corrupt": run_corrupt,
    "correct": run_correct,
    "assemble": run_assemble,
    "thresholds": run_thresholds,
    "sweep": run_sweep_stage,
    "trial": run_trial_stage,
}


def main(argv=None):
    """Main function to orchestrate the pipeline stages."""
    try:
        args = parse_arguments(argv)
    except ConfigError as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE

    try:
        RUNNERS[args.command](args)
    except (ConfigError, RangeError, DistributionError) as exc:
        print(f"ERROR: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Exception as exc:
        print(f"ERROR: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
