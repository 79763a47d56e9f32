# src/analysis/sweep.py

import hashlib
import itertools
import os
from dataclasses import asdict, dataclass, field, replace

import pandas as pd
from joblib import Parallel, delayed
from scipy.stats import binomtest

from src.acquisition.genome import BaseDistribution
from src.acquisition.seeding import TRIAL_STREAM, derive_seed
from src.analysis.trial import Pipeline, TrialConfig, run_trial
from src.config import COVERAGE_EPSILON, N_JOBS, SUCCESS_LEVEL, TRIALS_PER_CELL
from src.errors import ConfigError, EstimateUnavailableError

RESULT_COLUMNS = ["cell_id", "Lbar", "multiple", "delta", "pipeline", "trials", "successes", "wilson_lo", "wilson_hi"]
FLOAT_COLUMNS = ["Lbar", "multiple", "delta", "wilson_lo", "wilson_hi"]


@dataclass(frozen=True)
class SweepGrid:
    """
    Axes of a sweep. Cells are the product pipeline x Lbar x multiple x delta,
    in that order; noiseless cells ignore the delta axis.
    """

    genome_length: int
    lbar: tuple
    multiple: tuple
    delta: tuple = (0.0,)
    pipelines: tuple = (Pipeline.NOISELESS_GREEDY,)
    trials: int = TRIALS_PER_CELL
    seed: int = 1
    distribution: BaseDistribution = BaseDistribution.uniform()
    epsilon: float = COVERAGE_EPSILON
    overrides: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.trials < 1:
            raise ConfigError(f"trials per cell must be at least 1, got {self.trials}")
        object.__setattr__(self, "pipelines", tuple(Pipeline(p) for p in self.pipelines))
        for name in ("lbar", "multiple", "delta"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ConfigError(f"sweep axis '{name}' is empty")
            object.__setattr__(self, name, values)

    def cells(self):
        """Cell configurations (without trial seeds) in grid order."""
        cells = []
        for pipeline, lbar, multiple in itertools.product(self.pipelines, self.lbar, self.multiple):
            deltas = (0.0,) if pipeline is Pipeline.NOISELESS_GREEDY else self.delta
            for delta in deltas:
                cells.append(
                    TrialConfig(
                        genome_length=self.genome_length,
                        pipeline=pipeline,
                        seed=self.seed,
                        distribution=self.distribution,
                        lbar=lbar,
                        multiple=multiple,
                        epsilon=self.epsilon,
                        delta=None if pipeline is Pipeline.NOISELESS_GREEDY else delta,
                        **self.overrides,
                    )
                )
        return cells


def config_hash(mapping):
    """Short stable hash of the canonical sorted `key=value` text of a mapping."""
    text = "\n".join(f"{key}={mapping[key]}" for key in sorted(mapping))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:12]


def _cell_key(cell, trials):
    values = {key: value for key, value in asdict(cell).items() if value is not None}
    values["pipeline"] = cell.pipeline.value
    values["distribution"] = cell.distribution.to_token()
    values["trials"] = trials
    return values


def wilson_interval(successes, trials, confidence=0.95):
    """Wilson score interval of a binomial success proportion."""
    ci = binomtest(successes, trials).proportion_ci(confidence_level=confidence, method="wilson")
    return float(ci.low), float(ci.high)


def trial_seed(base_seed, cell_index, trial_index):
    return derive_seed(base_seed, TRIAL_STREAM, cell_index, trial_index)


def _format_row(cell_id, cell, trials, successes):
    low, high = wilson_interval(successes, trials)
    return {
        "cell_id": cell_id,
        "Lbar": f"{cell.lbar:.6f}",
        "multiple": f"{cell.multiple:.6f}",
        "delta": f"{(cell.delta or 0.0):.6f}",
        "pipeline": cell.pipeline.value,
        "trials": str(trials),
        "successes": str(successes),
        "wilson_lo": f"{low:.6f}",
        "wilson_hi": f"{high:.6f}",
    }


def _trial_record(cell_id, trial_index, result):
    record = {"cell_id": cell_id, "trial": trial_index}
    record.update(asdict(result))
    return record


def _log_line(record):
    return " ".join(f"{key}={value}" for key, value in record.items())


def _numeric(df):
    df = df.copy()
    for column in FLOAT_COLUMNS:
        df[column] = pd.to_numeric(df[column])
    for column in ("trials", "successes"):
        df[column] = pd.to_numeric(df[column]).astype("int64")
    return df


def trials_checkpoint_path(results_path):
    """Per-trial CSV kept next to the results CSV; every finished trial is appended to it."""
    return os.path.splitext(results_path)[0] + "_trials.csv"


def _completed_trials(path, cell_ids):
    """Checkpointed trials of the given cells as text columns; a row cut short by an interrupted write is dropped."""
    if not path or not os.path.exists(path) or os.path.getsize(path) == 0:
        return pd.DataFrame(columns=["cell_id", "seed", "success"])
    with open(path) as handle:
        torn = not handle.read().endswith("\n")
    frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    complete = frame[frame["wall_time"].fillna("") != ""]
    if torn or len(complete) < len(frame):
        complete.to_csv(path, index=False)
    complete = complete.drop_duplicates(["cell_id", "seed"], keep="first")
    return complete[complete["cell_id"].isin(cell_ids)]


def _typed(frame):
    frame = frame.copy()
    for column in frame.columns:
        if column == "cell_id":
            continue
        if column == "failure":
            frame[column] = frame[column].where(frame[column] != "", None)
        elif frame[column].isin(["True", "False"]).all():
            frame[column] = frame[column] == "True"
        else:
            frame[column] = pd.to_numeric(frame[column])
    return frame


def _append(path, record, log_path):
    if path:
        pd.DataFrame([record]).to_csv(path, mode="a", header=not os.path.exists(path), index=False)
    if log_path:
        with open(log_path, "a") as handle:
            handle.write(_log_line(record) + "\n")


def _ensure_parent(path):
    parent = os.path.dirname(path) if path else ""
    if parent:
        os.makedirs(parent, exist_ok=True)


def run_sweep(grid, results_path=None, trials_log_path=None, n_jobs=N_JOBS):
    """
    Runs every trial of every cell not already present in `results_path`.

    Each finished trial is appended to the per-trial checkpoint CSV next to
    `results_path` (and to `trials_log_path`) as soon as it completes. A rerun
    reads the checkpoint back and only runs the (cell, seed) trials missing from
    it, so an interrupted sweep never repeats a trial.

    Args:
        grid (SweepGrid): The sweep definition.
        results_path (str | None): CSV to resume from and rewrite.
        trials_log_path (str | None): Per-trial key=value log; new trials are appended.
        n_jobs (int): joblib worker count.

    Returns:
        pd.DataFrame: One row per cell, in grid order, with Wilson 95% intervals.
    """
    cells = grid.cells()
    cell_ids = [config_hash(_cell_key(cell, grid.trials)) for cell in cells]
    checkpoint = trials_checkpoint_path(results_path) if results_path else None
    _ensure_parent(results_path)
    _ensure_parent(trials_log_path)

    existing = {}
    if results_path and os.path.exists(results_path):
        previous = pd.read_csv(results_path, dtype=str, keep_default_na=False)
        existing = {row["cell_id"]: row for row in previous.to_dict("records") if row["cell_id"] in cell_ids}

    done = _completed_trials(checkpoint, cell_ids)
    finished = {(row.cell_id, int(row.seed)): str(row.success) == "True" for row in done.itertuples(index=False)}

    jobs = []
    for index, cell in enumerate(cells):
        if cell_ids[index] in existing:
            continue
        for trial in range(grid.trials):
            seed = trial_seed(grid.seed, index, trial)
            if (cell_ids[index], seed) not in finished:
                jobs.append((index, trial, replace(cell, seed=seed)))
    if finished:
        print(f"  - {len(finished)} trial(s) restored from checkpoint, {len(jobs)} to run")

    outcomes = Parallel(n_jobs=n_jobs, return_as="generator")(delayed(run_trial)(config) for _, _, config in jobs)
    for (index, trial, config), result in zip(jobs, outcomes):
        _append(checkpoint, _trial_record(cell_ids[index], trial, result), trials_log_path)
        finished[(cell_ids[index], config.seed)] = result.success

    rows = []
    for index, cell in enumerate(cells):
        if cell_ids[index] in existing:
            rows.append(existing[cell_ids[index]])
            continue
        seeds = [trial_seed(grid.seed, index, trial) for trial in range(grid.trials)]
        successes = sum(int(finished[(cell_ids[index], seed)]) for seed in seeds)
        rows.append(_format_row(cell_ids[index], cell, grid.trials, successes))
    table = pd.DataFrame(rows, columns=RESULT_COLUMNS)

    if results_path:
        table.to_csv(results_path, index=False)
        trials = _completed_trials(checkpoint, cell_ids)
        if not trials.empty:
            _typed(trials).to_parquet(os.path.splitext(results_path)[0] + "_trials.parquet", index=False, engine="pyarrow")
    return _numeric(table)


def critical_length_estimate(results, axis="Lbar", level=SUCCESS_LEVEL):
    """
    Axis value at which the success frequency crosses `level`.

    Rows sharing an axis value are pooled. The first pair of neighbouring axis
    values whose frequencies bracket `level` is interpolated linearly.

    Args:
        results (pd.DataFrame): Sweep rows with `trials` and `successes`.
        axis (str): Column to read the estimate off.
        level (float): Success frequency of the crossing.

    Returns:
        float: The interpolated axis value.
    """
    pooled = results.groupby(axis)[["successes", "trials"]].sum().sort_index()
    rates = (pooled["successes"] / pooled["trials"]).tolist()
    values = [float(v) for v in pooled.index]
    for (x0, r0), (x1, r1) in zip(zip(values, rates), zip(values[1:], rates[1:])):
        if r0 != r1 and (r0 - level) * (r1 - level) <= 0:
            return x0 + (level - r0) * (x1 - x0) / (r1 - r0)
    raise EstimateUnavailableError(f"no pair of '{axis}' cells brackets a success rate of {level}")


def run_and_save_sweep(grid, results_path, trials_log_path, n_jobs=N_JOBS):
    """Stage wrapper around run_sweep that reports progress and the critical length."""
    print("--- Starting Sweep ---")
    cells = grid.cells()
    print(f"  - {len(cells)} cell(s) x {grid.trials} trial(s), G={grid.genome_length}, n_jobs={n_jobs}")
    table = run_sweep(grid, results_path, trials_log_path, n_jobs)
    print(table.to_string(index=False))
    for pipeline, rows in table.groupby("pipeline", sort=False):
        try:
            estimate = critical_length_estimate(rows)
            print(f"  - {pipeline}: empirical critical Lbar ~ {estimate:.3f}")
        except EstimateUnavailableError:
            print(f"WARNING: {pipeline}: no Lbar bracket around a success rate of {SUCCESS_LEVEL}.")
    print(f"  - Results saved to '{results_path}'")
    print("--- Sweep Complete ---")
    return table
