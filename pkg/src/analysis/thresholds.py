# src/analysis/thresholds.py

import os

from src.acquisition.channel import symmetric_channel
from src.acquisition.storage import read_channel
from src.analysis.coverage import lander_waterman
from src.analysis.info_theory import delta_star, i_read_grid, threshold_condition
from src.config import COVERAGE_EPSILON
from src.errors import ConfigError


def format_report(values):
    """Renders a mapping as one `key=value` line per entry."""
    lines = []
    for key, value in values.items():
        if isinstance(value, float):
            value = f"{value:.6f}"
        lines.append(f"{key}={value}")
    return "\n".join(lines)


def run_threshold_report(distribution, mode, delta=None, channel_path=None, grid_step=None,
                         grid_path=None, genome_length=None, read_length=None):
    """
    Evaluates the alignment threshold condition and prints a key=value report.

    Args:
        distribution (BaseDistribution): Base distribution Q.
        mode (ThresholdMode | str): Threshold comparison mode.
        delta (float | None): Symmetric mis-read rate; mutually exclusive with channel_path.
        channel_path (str | None): Channel matrix file.
        grid_step (float | None): If given, also tabulate i_read(delta) on this grid.
        grid_path (str | None): Where to write the grid CSV.
        genome_length (int | None): With read_length, adds Lander-Waterman coverage figures.
        read_length (int | None): Read length for the coverage figures.

    Returns:
        ThresholdReport: The evaluated condition.
    """
    print("--- Starting Threshold Report ---")
    if (delta is None) == (channel_path is None):
        raise ConfigError("give exactly one of a mis-read rate or a channel file")

    if channel_path is not None:
        if not os.path.exists(channel_path):
            print(f"ERROR: Input file not found at '{channel_path}'.")
            raise FileNotFoundError(channel_path)
        channel = read_channel(channel_path)
        print(f"  - Channel loaded from '{channel_path}' (output alphabet {''.join(channel.output_alphabet)})")
    else:
        channel = symmetric_channel(delta)
        print(f"  - Symmetric channel with delta={delta}")

    report = threshold_condition(distribution, channel, mode)
    values = report.as_dict()
    star = delta_star(distribution, mode)
    values["delta_star"] = "infeasible" if star is None else star

    if genome_length is not None and read_length is not None:
        estimate = lander_waterman(genome_length, read_length, COVERAGE_EPSILON)
        values.update(ncov=estimate.ncov, coverage_depth=estimate.coverage_depth,
                      arrival_rate=estimate.arrival_rate)

    print(format_report(values))

    if grid_step is not None:
        grid = i_read_grid(distribution, grid_step)
        if grid_path:
            parent = os.path.dirname(grid_path)
            if parent:
                os.makedirs(parent, exist_ok=True)
            grid.to_csv(grid_path, index=False, float_format="%.6f")
            print(f"  - i_read grid ({len(grid)} rows) saved to '{grid_path}'")
        else:
            print(grid.to_string(index=False))

    print("--- Threshold Report Complete ---")
    return report
