# src/analysis/info_theory.py

"""
Closed-form information quantities of the sequencing model.

All entropies and divergences are in bits, with 0 * log 0 = 0. The alignment
threshold condition compares I_read against either H2 ("as_printed") or H2 / 2
("example_consistent", the form that reproduces delta* ~ 0.19 for a uniform
source and a symmetric channel). Both comparisons are always available.
"""
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np
import pandas as pd
from scipy.optimize import bisect
from scipy.special import entr, rel_entr

from src.acquisition.channel import symmetric_channel
from src.acquisition.genome import BaseDistribution
from src.config import BASES, DELTA_GRID_STEP, DELTA_SEARCH_UPPER, DELTA_TOLERANCE, THRESHOLD_MODE

LN2 = math.log(2.0)


class ThresholdMode(str, Enum):
    AS_PRINTED = "as_printed"
    EXAMPLE_CONSISTENT = "example_consistent"


DEFAULT_MODE = ThresholdMode(THRESHOLD_MODE)


@dataclass(frozen=True)
class ThresholdReport:
    renyi2: float
    per_base_divergence: dict
    i_read: float
    lcrit: float
    condition_mode: ThresholdMode
    threshold: float
    condition_satisfied: bool
    margin: float

    def as_dict(self):
        values = {
            "renyi2": self.renyi2,
            "i_read": self.i_read,
            "lcrit": self.lcrit,
            "mode": self.condition_mode.value,
            "threshold": self.threshold,
            "satisfied": self.condition_satisfied,
            "margin": self.margin,
        }
        values.update({f"divergence_{base}": value for base, value in self.per_base_divergence.items()})
        return values


def _as_distribution(distribution):
    if isinstance(distribution, BaseDistribution):
        return distribution
    return BaseDistribution(tuple(distribution))


def renyi2(distribution):
    """Renyi entropy of order 2, -log2 sum_s Q_s^2."""
    q = _as_distribution(distribution).as_array()
    return -math.log2(float(np.dot(q, q))) + 0.0


def output_marginal(channel, distribution):
    """F_Q(y) = sum_s Q_s pi(y|s)."""
    return _as_distribution(distribution).as_array() @ channel.matrix


def per_base_divergence(base, channel, distribution):
    """
    I(S=s; Y) = sum_y pi(y|s) log2(pi(y|s) / F_Q(y)).

    Returns math.inf when pi(y|s) > 0 for an output with F_Q(y) = 0.
    """
    row = channel.matrix[BASES.index(base)]
    value = float(rel_entr(row, output_marginal(channel, distribution)).sum()) / LN2
    return max(value, 0.0)


def i_read(channel, distribution):
    """Minimum over the four bases of per_base_divergence."""
    return min(per_base_divergence(base, channel, distribution) for base in BASES)


def lcrit(distribution):
    """Critical normalised read length 2 / H2; math.inf for a deterministic source."""
    h2 = renyi2(distribution)
    return math.inf if h2 == 0.0 else 2.0 / h2


def _threshold(h2, mode):
    return h2 if ThresholdMode(mode) is ThresholdMode.AS_PRINTED else h2 / 2.0


def threshold_condition(distribution, channel, mode=DEFAULT_MODE):
    """
    Evaluates the alignment threshold condition I_read > threshold.

    Args:
        distribution (BaseDistribution): Base distribution Q.
        channel (NoiseChannel): Read channel.
        mode (ThresholdMode | str): as_printed compares against H2,
            example_consistent against H2 / 2.

    Returns:
        ThresholdReport: All intermediate quantities plus the verdict and margin.
    """
    mode = ThresholdMode(mode)
    h2 = renyi2(distribution)
    divergences = {base: per_base_divergence(base, channel, distribution) for base in BASES}
    info = min(divergences.values())
    threshold = _threshold(h2, mode)
    margin = info - threshold
    return ThresholdReport(
        renyi2=h2,
        per_base_divergence=divergences,
        i_read=info,
        lcrit=lcrit(distribution),
        condition_mode=mode,
        threshold=threshold,
        condition_satisfied=margin > 0,
        margin=margin,
    )


def symmetric_margin(delta, distribution, mode=DEFAULT_MODE):
    """I_read of the symmetric channel at `delta` minus the mode's threshold."""
    threshold = _threshold(renyi2(distribution), mode)
    return i_read(symmetric_channel(delta), distribution) - threshold


def delta_star(distribution, mode=DEFAULT_MODE, tolerance=DELTA_TOLERANCE):
    """
    Largest symmetric mis-read rate at which the threshold condition still holds.

    Bisection on [0, DELTA_SEARCH_UPPER], where the margin is monotone. At
    DELTA_SEARCH_UPPER every output row is uniform, so the margin there is
    minus the threshold and negative for any source with H2 > 0. When it is not
    negative the root sits at the bracket end and DELTA_SEARCH_UPPER itself is
    returned.

    Returns:
        float | None: delta*, or None when the condition fails for every delta > 0.
    """
    distribution = _as_distribution(distribution)
    lower, upper = tolerance, DELTA_SEARCH_UPPER
    low_margin = symmetric_margin(lower, distribution, mode)
    if low_margin <= 0:
        return None
    high_margin = symmetric_margin(upper, distribution, mode)
    if high_margin >= 0:
        return upper
    return bisect(symmetric_margin, lower, upper, args=(distribution, mode), xtol=tolerance)


def binary_entropy(p):
    return float(entr(p) + entr(1.0 - p)) / LN2


def symmetric_capacity(delta):
    """2 - H_b(delta) - delta * log2(3): I_read of the symmetric channel for uniform Q."""
    return 2.0 - binary_entropy(delta) - delta * math.log2(3.0)


def printed_symmetric_i_read(delta):
    """
    -delta * log2(delta / 3) - (1 - delta) * log2(1 - delta).

    This is the conditional output entropy H(Y|S) of the symmetric channel;
    it is kept to compare against the general definition, not used for decisions.
    """
    return binary_entropy(delta) + delta * math.log2(3.0)


def i_read_grid(distribution, step=DELTA_GRID_STEP):
    """
    Tabulates I_read of the symmetric channel on a delta grid over [0, DELTA_SEARCH_UPPER].

    Returns:
        pd.DataFrame: delta, i_read, and the margin under each threshold mode.
    """
    distribution = _as_distribution(distribution)
    h2 = renyi2(distribution)
    deltas = np.round(np.arange(0.0, DELTA_SEARCH_UPPER + step / 2, step), 10)
    values = [i_read(symmetric_channel(float(d)), distribution) for d in deltas]
    df = pd.DataFrame({"delta": deltas, "i_read": values})
    for mode in ThresholdMode:
        df[f"margin_{mode.value}"] = df["i_read"] - _threshold(h2, mode)
    return df
