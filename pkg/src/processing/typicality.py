# src/processing/typicality.py

"""
Typicality tests for candidate alignments.

A set of M equal-length K-mers is a good alignment when the K column tuples
look like K draws from F_P^M, the law of M independent channel observations
of one base drawn from P. At desk-scale K most cells of the tables have
expected counts far below one, so positive-probability cells are pooled (in
ascending order of probability) into groups whose expected count reaches
`min_cell_count`, and the multiplicative band |N - K*F| <= eps*K*F is applied
per group. Cells with zero probability must not be observed at all. The pools
depend only on (F, K, min_cell_count), so widening eps never turns an
accepted alignment into a rejected one. The full joint test pools inside the
marginal and pair pools, so passing it implies passing marginals_and_pairs.
"""
import itertools
import math
from enum import Enum
from functools import reduce

import numpy as np
from scipy.special import logsumexp

from src.config import FULL_JOINT_MAX_CELLS, MIN_CELL_COUNT
from src.errors import ShapeError, TypicalityError

LN2 = math.log(2.0)


class TypicalityOrder(str, Enum):
    MARGINALS_AND_PAIRS = "marginals_and_pairs"
    FULL_JOINT = "full_joint"


def _as_probabilities(distribution):
    if hasattr(distribution, "as_array"):
        return distribution.as_array()
    return np.asarray(distribution, dtype=float)


def f_pm_log_prob(column, distribution, channel):
    """
    log2 F_P^M(column) = log2 sum_s P(s) prod_i pi(column_i | s).

    Args:
        column (str | Sequence[str]): M observed symbols over the channel's output alphabet.
        distribution (BaseDistribution): The base composition P.
        channel (NoiseChannel): Read channel.

    Returns:
        float: The log-probability in bits; -inf for an impossible column.
    """
    codes = channel.encode("".join(column))
    per_base = channel.log_matrix[:, codes].sum(axis=1)
    with np.errstate(divide="ignore"):
        value = logsumexp(per_base, b=_as_probabilities(distribution))
    return float(value) / LN2


def pooled_groups(expected, min_cell_count=MIN_CELL_COUNT):
    """
    Pools cells with positive expected count into groups of at least `min_cell_count`.

    Cells are taken in ascending order of expected count (ties by index). A
    trailing group that never reaches the floor is merged into the one before it.

    Args:
        expected (np.ndarray): Expected counts K * F per cell.
        min_cell_count (float): Floor on the expected count of a group.

    Returns:
        list[np.ndarray]: Cell indices of each group.
    """
    positive = np.flatnonzero(expected > 0)
    order = positive[np.argsort(expected[positive], kind="stable")]
    groups, current, total = [], [], 0.0
    for cell in order:
        current.append(cell)
        total += expected[cell]
        if total >= min_cell_count:
            groups.append(current)
            current, total = [], 0.0
    if current:
        if groups:
            groups[-1].extend(current)
        else:
            groups.append(current)
    return [np.array(group, dtype=np.int64) for group in groups]


def band_test(counts, probabilities, eps, min_cell_count=MIN_CELL_COUNT, groups=None):
    """
    Multiplicative-band test of observed cell counts against a distribution.

    Args:
        counts (np.ndarray): Observed counts, summing to K.
        probabilities (np.ndarray): Cell probabilities F, same shape.
        eps (float): Band half-width relative to the expected count.
        min_cell_count (float): Pooling floor (see pooled_groups).
        groups (list[np.ndarray] | None): Cell groups to test instead of the default pools.

    Returns:
        bool: True when no zero-probability cell is observed and every pooled
        group satisfies |N - K*F| <= eps * K * F.
    """
    counts = np.asarray(counts, dtype=float).ravel()
    probabilities = np.asarray(probabilities, dtype=float).ravel()
    if counts[probabilities <= 0].sum() > 0:
        return False
    expected = counts.sum() * probabilities
    if groups is None:
        groups = pooled_groups(expected, min_cell_count)
    for group in groups:
        observed = counts[group].sum()
        target = expected[group].sum()
        if abs(observed - target) > eps * target + 1e-9:
            return False
    return True


def _codes(members, channel):
    lengths = {len(member) for member in members}
    if len(lengths) != 1:
        raise ShapeError(f"typicality test needs equal-length members, got lengths {sorted(lengths)}")
    return np.stack([channel.encode(member) for member in members]).astype(np.int64)


def projected_tables(probs, channel):
    """F_P of one member and F_P^2 of a pair of members observing the same base."""
    single = probs @ channel.matrix
    shared = channel.matrix.T @ (probs[:, None] * channel.matrix)
    return single, shared


def _marginals_and_pairs(codes, probs, channel, eps, min_cell_count):
    size = len(channel.output_alphabet)
    single, shared = projected_tables(probs, channel)
    for row in codes:
        if not band_test(np.bincount(row, minlength=size), single, eps, min_cell_count):
            return False
    for a, b in itertools.combinations(range(len(codes)), 2):
        counts = np.bincount(codes[a] * size + codes[b], minlength=size * size)
        if not band_test(counts, shared, eps, min_cell_count):
            return False
    return True


def joint_table(probs, channel, m):
    """F_P^M as a flat table over Y^M, tuples indexed in row-major order."""
    rows = [reduce(np.multiply.outer, [channel.matrix[s]] * m).ravel() for s in range(len(probs))]
    return np.asarray(probs) @ np.stack(rows)


def _group_labels(expected, min_cell_count):
    labels = np.full(expected.shape, -1, dtype=np.int64)
    for label, group in enumerate(pooled_groups(expected, min_cell_count)):
        labels[group] = label
    return labels


def joint_groups(probs, channel, m, k, min_cell_count=MIN_CELL_COUNT):
    """
    Pools of the joint table that refine every marginal and pairwise pool.

    Joint cells are split by the tuple of marginal and pair groups they project
    into, and the positive cells of each part are pooled on their own. Every
    marginal or pair group is then a sum of joint groups, so a table inside the
    joint band has all its projections inside their bands as well.

    Args:
        probs (np.ndarray): Base composition P.
        channel (NoiseChannel): Read channel.
        m (int): Number of members M.
        k (int): Number of columns K.
        min_cell_count (float): Pooling floor.

    Returns:
        tuple[np.ndarray, list[np.ndarray]]: F_P^M and the joint cell groups.
    """
    size = len(channel.output_alphabet)
    table = joint_table(probs, channel, m)
    expected = k * table
    digits = np.array(list(itertools.product(range(size), repeat=m)), dtype=np.int64).reshape(-1, m)
    single, shared = projected_tables(probs, channel)
    single_labels = _group_labels(k * single, min_cell_count)
    pair_labels = _group_labels(k * shared.ravel(), min_cell_count)

    keys = [single_labels[digits[:, a]] for a in range(m)]
    keys += [pair_labels[digits[:, a] * size + digits[:, b]] for a, b in itertools.combinations(range(m), 2)]
    _, parts = np.unique(np.stack(keys, axis=1), axis=0, return_inverse=True)
    parts = np.asarray(parts).ravel()

    order = np.argsort(parts, kind="stable")
    groups = []
    for cells in np.split(order, np.flatnonzero(np.diff(parts[order])) + 1):
        cells = cells[expected[cells] > 0]
        if cells.size:
            groups.extend(cells[group] for group in pooled_groups(expected[cells], min_cell_count))
    return table, groups


def typicality_test(members, distribution, channel, eps, order=TypicalityOrder.MARGINALS_AND_PAIRS,
                    min_cell_count=MIN_CELL_COUNT):
    """
    Decides whether M K-mers are jointly typical with respect to F_P^M.

    Args:
        members (Sequence[str]): The M K-mers over the channel's output alphabet.
        distribution (BaseDistribution): Candidate base composition P.
        channel (NoiseChannel): Read channel.
        eps (float): Multiplicative band half-width.
        order (TypicalityOrder | str): marginals_and_pairs tests every single-member
            marginal against F_P and every pair against the shared-base F_P^2;
            full_joint tests the table of column tuples against F_P^M, pooled
            as in joint_groups.
        min_cell_count (float): Pooling floor.

    Returns:
        bool: Whether the members pass.
    """
    order = TypicalityOrder(order)
    codes = _codes(members, channel)
    probs = _as_probabilities(distribution)
    if order is TypicalityOrder.MARGINALS_AND_PAIRS:
        return _marginals_and_pairs(codes, probs, channel, eps, min_cell_count)

    size = len(channel.output_alphabet)
    m, k = codes.shape
    if size ** m > FULL_JOINT_MAX_CELLS:
        raise TypicalityError(f"full joint table would need {size}**{m} cells")
    index = np.zeros(k, dtype=np.int64)
    for row in codes:
        index = index * size + row
    counts = np.bincount(index, minlength=size ** m)
    table, groups = joint_groups(probs, channel, m, k, min_cell_count)
    return band_test(counts, table, eps, groups=groups)
