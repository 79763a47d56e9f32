# tests/test_acceptance.py

"""
Monte Carlo checks of the pipelines' qualitative behaviour.

These run many full trials; deselect with `-m "not slow"`.
"""

import numpy as np
import pytest

from src.analysis.sweep import SweepGrid, run_sweep
from src.analysis.trial import TrialConfig, resolve_config, run_trial

pytestmark = pytest.mark.slow

TRIALS = 20


def _trials(pipeline, delta, seeds=range(1, TRIALS + 1), **sizes):
    sizes = {"lbar": 2.5, "multiple": 2.5, **sizes}
    return [run_trial(TrialConfig(10_000, pipeline, seed=s, delta=delta, **sizes)) for s in seeds]


def test_noiseless_phase_transition():
    """Long reads reconstruct a 10^5 genome almost always; very short reads almost never do."""
    grid = SweepGrid(100_000, lbar=(0.5, 2.0), multiple=(1.5,), trials=TRIALS, seed=1,
                     overrides={"exact_min_overlap": True})
    table = run_sweep(grid, n_jobs=-1).set_index("Lbar")
    short = table.loc[0.5, "successes"] / TRIALS
    long = table.loc[2.0, "successes"] / TRIALS
    assert long >= 0.9
    assert short <= 0.1
    assert long - short >= 0.6


def test_correction_yields_good_covering_reads():
    results = _trials("correct_then_greedy", 0.1)
    tau = resolve_config(TrialConfig(10_000, "correct_then_greedy", lbar=2.5, multiple=2.5, delta=0.1)).params.tau
    good = [r.d_max <= tau and r.covered_fraction >= 0.99 for r in results]
    assert np.mean(good) >= 0.9
    assert np.mean([r.purity_violations for r in results]) <= 0.05


def test_correction_beats_direct_noisy_assembly():
    corrected = np.mean([r.perfect_layout for r in _trials("correct_then_greedy", 0.1)])
    direct = np.mean([r.perfect_layout for r in _trials("direct_noisy_greedy", 0.1)])
    assert corrected - direct >= 0.2


def test_correction_degrades_past_the_threshold():
    below = _trials("correct_then_greedy", 0.1)
    above = _trials("correct_then_greedy", 0.3)
    purity = np.mean([r.purity_violations for r in above])
    drop = np.mean([r.perfect_layout for r in below]) - np.mean([r.perfect_layout for r in above])
    assert purity > 0.05 or drop >= 0.3
