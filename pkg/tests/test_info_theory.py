# tests/test_info_theory.py

"""Closed-form information quantities, the threshold condition and coverage statistics."""

import math

import numpy as np
import pytest

from src.acquisition.channel import NoiseChannel, identity_channel, symmetric_channel
from src.acquisition.genome import BaseDistribution
from src.analysis.coverage import expected_gaps, lander_waterman
from src.analysis.info_theory import (
    ThresholdMode,
    delta_star,
    i_read,
    i_read_grid,
    lcrit,
    per_base_divergence,
    printed_symmetric_i_read,
    renyi2,
    symmetric_capacity,
    symmetric_margin,
    threshold_condition,
)
from src.analysis.thresholds import run_threshold_report
from src.errors import ConfigError, RangeError

HALF_HALF = BaseDistribution((0.5, 0.5, 0.0, 0.0))
CONSTANT = BaseDistribution((1.0, 0.0, 0.0, 0.0))


# --- Entropies ---

def test_renyi2_examples(uniform):
    assert renyi2(uniform) == 2.0
    assert renyi2(HALF_HALF) == pytest.approx(1.0)
    assert renyi2(CONSTANT) == 0.0


def test_renyi2_is_maximised_by_uniform(rng):
    for _ in range(200):
        q = rng.dirichlet(np.ones(4))
        q = q / q.sum()
        q[-1] = 1.0 - q[:-1].sum()
        if q[-1] < 0:
            continue
        assert renyi2(BaseDistribution(tuple(q))) <= 2.0 + 1e-12


def test_lcrit_examples(uniform):
    assert lcrit(uniform) == pytest.approx(1.0)
    assert lcrit(HALF_HALF) == pytest.approx(2.0)
    assert math.isinf(lcrit(CONSTANT))


# --- Divergences ---

def test_noiseless_divergence_equals_source_entropy(uniform):
    for base in "ACGT":
        assert per_base_divergence(base, identity_channel(), uniform) == pytest.approx(2.0, abs=1e-12)


def test_uninformative_channel_has_zero_divergence(uniform):
    assert i_read(symmetric_channel(0.75), uniform) == pytest.approx(0.0, abs=1e-12)


def test_row_equal_to_output_marginal_has_zero_divergence(uniform):
    matrix = np.array([
        [0.25, 0.25, 0.25, 0.25],
        [0.5, 0.5, 0.0, 0.0],
        [0.0, 0.0, 0.5, 0.5],
        [0.25, 0.25, 0.25, 0.25],
    ])
    channel = NoiseChannel(("A", "C", "G", "T"), matrix)
    assert per_base_divergence("A", channel, uniform) == pytest.approx(0.0, abs=1e-12)
    assert i_read(channel, uniform) == pytest.approx(0.0, abs=1e-12)


def test_divergence_is_infinite_outside_the_output_support():
    assert math.isinf(per_base_divergence("C", identity_channel(), CONSTANT))


def test_symmetric_closed_forms_agree(uniform):
    for delta in (0.0, 0.05, 0.1, 0.19, 0.3, 0.5, 0.7):
        channel = symmetric_channel(delta)
        assert i_read(channel, uniform) == pytest.approx(symmetric_capacity(delta), abs=1e-12)
        assert symmetric_capacity(delta) + printed_symmetric_i_read(delta) == pytest.approx(2.0, abs=1e-12)
        divergences = {per_base_divergence(b, channel, uniform) for b in "ACGT"}
        assert max(divergences) - min(divergences) < 1e-12


def test_i_read_decreases_with_delta(uniform):
    grid = i_read_grid(uniform, 0.01)
    assert len(grid) == 76
    assert list(grid.columns) == ["delta", "i_read", "margin_as_printed", "margin_example_consistent"]
    assert (np.diff(grid["i_read"].to_numpy()) <= 1e-12).all()


# --- Threshold condition ---

def test_threshold_condition_examples(uniform):
    assert threshold_condition(uniform, symmetric_channel(0.1), ThresholdMode.EXAMPLE_CONSISTENT).condition_satisfied
    assert not threshold_condition(uniform, symmetric_channel(0.3), "example_consistent").condition_satisfied
    assert not threshold_condition(uniform, symmetric_channel(0.1), "as_printed").condition_satisfied
    noiseless = threshold_condition(uniform, identity_channel(), "as_printed")
    assert noiseless.margin == pytest.approx(0.0, abs=1e-12)
    assert not noiseless.condition_satisfied


def test_threshold_report_fields(uniform):
    report = threshold_condition(uniform, symmetric_channel(0.1), "example_consistent")
    assert report.renyi2 == 2.0
    assert report.threshold == 1.0
    assert report.margin == pytest.approx(report.i_read - 1.0)
    assert set(report.as_dict()) >= {"renyi2", "i_read", "lcrit", "margin", "divergence_A"}


def test_delta_star_uniform(uniform):
    star = delta_star(uniform, "example_consistent")
    assert 0.185 <= star <= 0.195
    assert symmetric_capacity(star) == pytest.approx(1.0, abs=1e-5)
    assert symmetric_margin(star - 0.01, uniform, "example_consistent") > 0
    assert symmetric_margin(star + 0.01, uniform, "example_consistent") < 0


def test_delta_star_infeasible_as_printed(uniform):
    assert delta_star(uniform, "as_printed") is None


def test_delta_star_of_a_constant_source():
    """The only base carries no information about itself, so no delta satisfies the condition."""
    assert i_read(symmetric_channel(0.1), CONSTANT) == pytest.approx(0.0, abs=1e-12)
    assert delta_star(CONSTANT, "example_consistent") is None


def test_margin_at_the_bracket_end_is_minus_the_threshold(uniform):
    skewed = BaseDistribution((0.7, 0.1, 0.1, 0.1))
    for distribution in (uniform, skewed):
        for mode in ("as_printed", "example_consistent"):
            threshold = threshold_condition(distribution, symmetric_channel(0.75), mode).threshold
            assert symmetric_margin(0.75, distribution, mode) == pytest.approx(-threshold, abs=1e-12)
            assert threshold > 0


def test_delta_star_root_at_the_bracket_end(monkeypatch, uniform):
    """A margin that reaches zero exactly at 0.75 puts delta* on the bracket end."""
    monkeypatch.setattr("src.analysis.info_theory.symmetric_margin", lambda delta, distribution, mode: 0.75 - delta)
    assert delta_star(uniform) == 0.75


def test_threshold_report_prints_key_values(capsys, uniform):
    run_threshold_report(uniform, "example_consistent", delta=0.1, genome_length=10_000, read_length=33)
    out = capsys.readouterr().out
    assert "satisfied=True" in out
    assert "renyi2=2.000000" in out
    assert "ncov=" in out


def test_threshold_report_needs_one_channel(uniform):
    with pytest.raises(ConfigError):
        run_threshold_report(uniform, "example_consistent")


# --- Coverage ---

def test_lander_waterman_examples():
    assert 19.7 <= lander_waterman(3_000_000_000, 100, 0.05).coverage_depth <= 20.7
    assert lander_waterman(100_000, 50, 0.05).coverage_depth == pytest.approx(math.log(4e4))
    assert lander_waterman(1_000, 1_000, 0.999).coverage_depth == pytest.approx(math.log(1 / 0.999))


def test_arrival_rate_tracks_coverage_depth():
    for g, length in ((10_000, 33), (100_000, 8), (5_000, 250)):
        estimate = lander_waterman(g, length, 0.05)
        assert abs(estimate.arrival_rate - estimate.coverage_depth) <= length / g


def test_lander_waterman_rejects_bad_arguments():
    with pytest.raises(RangeError):
        lander_waterman(100, 10, 0.0)
    with pytest.raises(RangeError):
        lander_waterman(100, 101, 0.05)


def test_expected_gaps():
    assert expected_gaps(1_000, 10, 0) == 0
    assert expected_gaps(1_000, 10, 100) == pytest.approx(100 * math.exp(-1))
