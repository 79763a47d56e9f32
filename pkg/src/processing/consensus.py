# src/processing/consensus.py

"""Column-wise maximum-likelihood consensus of an accepted alignment."""
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.stats import multinomial

from src.acquisition.genome import decode_bases
from src.config import BASES

# Log-likelihoods within this of the maximum count as tied
TIE_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CleanedRead:
    """
    A cleaned-up read: the ML consensus of one good alignment.

    Attributes:
        id (int): Position of the read in the cleaned list.
        symbols (str): Length-K nucleotide string.
        source_cluster (KmerCluster | None): The alignment it was built from.
        claimed_start (int | None): Most common true location among the
            members; evaluation metadata, None without ground truth.
        cluster_size (int): Number of members M.
    """

    id: int
    symbols: str
    source_cluster: object = None
    claimed_start: int | None = None
    cluster_size: int = 0

    def __len__(self):
        return len(self.symbols)


def ml_codes(codes, channel):
    """
    ML base per column of an (M, K) array of output-symbol codes.

    Returns:
        np.ndarray: K base codes; ties go to the first base in A<C<G<T order.
    """
    loglik = channel.log_matrix[:, np.asarray(codes)].sum(axis=1)
    best = loglik.max(axis=0)
    return np.argmax(loglik >= best - TIE_TOLERANCE, axis=0).astype(np.uint8)


def ml_consensus(cluster, channel, read_id=0):
    """
    Builds the cleaned read of an accepted cluster.

    Each column takes argmax_s prod_j pi(u_ji | s), a uniform prior over bases.

    Args:
        cluster (KmerCluster): An accepted alignment.
        channel (NoiseChannel): Read channel.
        read_id (int): Id given to the cleaned read.

    Returns:
        CleanedRead: The consensus with the cluster's claimed location.
    """
    codes = np.stack([channel.encode(member.symbols) for member in cluster.members])
    symbols = decode_bases(ml_codes(codes, channel))
    return CleanedRead(read_id, symbols, cluster, cluster.claimed_start, len(cluster.members))


def _compositions(size, m):
    for combo in itertools.combinations_with_replacement(range(size), m):
        yield np.bincount(combo, minlength=size)


def consensus_error_rate(channel, m, distribution):
    """
    Exact probability that the ML consensus of M observations of a base is wrong.

    Sums, over every composition of M symbols, the multinomial probability of
    the composition under each true base s (weighted by Q_s) whenever the ML
    decision for that composition differs from s.

    Args:
        channel (NoiseChannel): Read channel.
        m (int): Number of observations per column.
        distribution (BaseDistribution): Base distribution Q of the true base.

    Returns:
        float: Per-base error probability of the consensus.
    """
    q = distribution.as_array()
    size = len(channel.output_alphabet)
    error = 0.0
    for counts in _compositions(size, m):
        with np.errstate(invalid="ignore"):
            loglik = np.where(counts > 0, channel.log_matrix * counts, 0.0).sum(axis=1)
        best = loglik.max()
        decision = int(np.argmax(loglik >= best - TIE_TOLERANCE))
        for s in range(len(BASES)):
            if s != decision and q[s] > 0:
                error += q[s] * multinomial.pmf(counts, m, channel.matrix[s])
    return float(error)
