# src/assembly/greedy.py

"""
Greedy merge assembler with approximate suffix-prefix overlaps.

Widths are visited from the longest read length down to `min_overlap`. At
each width the admissible (left, right) pairs are visited in ascending
(left, right) order and re-checked against the current state: a link needs a
left without successor, a right without predecessor, and must not close a
cycle. A pair whose width covers a whole read is a containment and absorbs
that read instead. Overlapping symbols are taken from the left read.
Closing the single remaining chain into a circle is decided separately after
the merge loop.
"""
from dataclasses import dataclass, field

from scipy.cluster.hierarchy import DisjointSet

from src.acquisition.reads import hamming_distance
from src.assembly.overlap import OverlapScorer, allowed_mismatches
from src.errors import RangeError


@dataclass(frozen=True)
class MergeRecord:
    left_id: int
    right_id: int
    width: int
    mismatches: int
    kind: str = "merge"


@dataclass(frozen=True)
class AssemblyResult:
    """
    Attributes:
        contigs (list[str]): Assembled sequences; one when circular.
        circular (bool): Whether the single contig was closed into a cycle.
        merge_log (list[MergeRecord]): Links and absorptions in the order they were made.
        placements (dict[int, tuple[int, int]]): Read id -> (contig index, offset).
        chains (list[list[int]]): Linked read ids of each contig, in contig order.
        closing_overlap (int | None): Width used to close the cycle.
        closure_ambiguous (bool): A closing width existed but was not unique enough to use.
    """

    contigs: list
    circular: bool
    merge_log: list
    placements: dict = field(default_factory=dict)
    chains: list = field(default_factory=list)
    closing_overlap: int | None = None
    closure_ambiguous: bool = False

    def __post_init__(self):
        if self.circular and len(self.contigs) != 1:
            raise RangeError("a circular assembly must consist of exactly one contig")


class _State:
    def __init__(self, count):
        self.successor = {}
        self.predecessor = {}
        self.absorbed_by = {}
        self.chains = DisjointSet(range(count))
        self.log = []

    def free_left(self, i):
        return i not in self.successor and i not in self.absorbed_by

    def free_right(self, j):
        return j not in self.predecessor and j not in self.absorbed_by

    def unlinked(self, i):
        return i not in self.successor and i not in self.predecessor

    def try_pair(self, reads, i, j, width, mismatches):
        """Applies the pair if it is still admissible; returns whether it was applied."""
        if not (self.free_left(i) and self.free_right(j)):
            return False
        if width >= len(reads[j]) or width >= len(reads[i]):
            if len(reads[j]) <= len(reads[i]):
                absorbed, host, offset = j, i, len(reads[i]) - width
            else:
                absorbed, host, offset = i, j, 0
            if not self.unlinked(absorbed):
                return False
            self.absorbed_by[absorbed] = (host, offset)
            self.log.append(MergeRecord(i, j, width, mismatches, "absorb"))
            return True
        if self.chains.connected(i, j):
            return False
        self.successor[i] = (j, width)
        self.predecessor[j] = i
        self.chains.merge(i, j)
        self.log.append(MergeRecord(i, j, width, mismatches))
        return True


def _exact_width(reads, scorer, state, lefts, rights, width):
    buckets = scorer.exact_buckets(rights, width)
    heads = dict.fromkeys(buckets, 0)
    for i in lefts:
        if not state.free_left(i):
            continue
        suffix = reads[i][len(reads[i]) - width :]
        bucket = buckets.get(suffix)
        if not bucket:
            continue
        start = heads[suffix]
        while start < len(bucket) and not state.free_right(bucket[start]):
            start += 1
        heads[suffix] = start
        for j in bucket[start:]:
            if j != i and state.free_right(j) and state.try_pair(reads, i, j, width, 0):
                # an absorbed right leaves i free to link further
                if not state.free_left(i):
                    break


def _spell(reads, state):
    placements, chains, contigs = {}, [], []
    heads = sorted(i for i in range(len(reads)) if i not in state.predecessor and i not in state.absorbed_by)
    for head in heads:
        chain, pieces, offset = [head], [reads[head]], 0
        placements[head] = (len(contigs), 0)
        current = head
        while current in state.successor:
            nxt, width = state.successor[current]
            offset += len(reads[current]) - width
            placements[nxt] = (len(contigs), offset)
            pieces.append(reads[nxt][width:])
            chain.append(nxt)
            current = nxt
        chains.append(chain)
        contigs.append("".join(pieces))

    def place(read_id):
        if read_id not in placements:
            host, offset = state.absorbed_by[read_id]
            contig, host_offset = place(host)
            placements[read_id] = (contig, host_offset + offset)
        return placements[read_id]

    for read_id in sorted(state.absorbed_by):
        place(read_id)
    return contigs, chains, placements


def _closing_width(tail, head, min_overlap, threshold):
    """
    Largest admissible closing width, and whether the closing is ambiguous.

    A closing is ambiguous when a smaller width fits strictly better, or when
    another width of at least half the chosen one fits no worse: the overlap is
    then periodic and the cycle length is not determined.
    """
    scored = []
    for width in range(min(len(tail), len(head)) - 1, min_overlap - 1, -1):
        mismatches = hamming_distance(tail[len(tail) - width :], head[:width])
        if mismatches <= allowed_mismatches(width, threshold):
            scored.append((width, mismatches / width))
    if not scored:
        return None, False
    width, fraction = scored[0]
    ambiguous = any(
        other < fraction or (other == fraction and 2 * other_width >= width) for other_width, other in scored[1:]
    )
    return width, ambiguous


def greedy_assemble(reads, min_overlap, mismatch_threshold, circular=True):
    """
    Greedy largest-overlap-first assembly.

    Args:
        reads (Sequence[str]): Reads, identified by their index.
        min_overlap (int): Smallest overlap width w_min considered.
        mismatch_threshold (float): theta; a pair overlaps at width w when it has at
            most floor(theta * w) mismatches. theta = 0 is exact greedy.
        circular (bool): Whether to try closing a single chain into a cycle.

    Returns:
        AssemblyResult: Contigs, merge log, read placements and closure details.
    """
    reads = list(reads)
    if not reads:
        raise RangeError("cannot assemble an empty read list")
    if min_overlap < 1:
        raise RangeError(f"minimum overlap must be at least 1, got {min_overlap}")
    if not 0.0 <= mismatch_threshold <= 1.0:
        raise RangeError(f"mismatch threshold must lie in [0, 1], got {mismatch_threshold}")

    scorer = OverlapScorer(reads)
    state = _State(len(reads))
    longest = max(len(read) for read in reads)

    for width in range(longest, min_overlap - 1, -1):
        lefts = [i for i in range(len(reads)) if len(reads[i]) >= width and state.free_left(i)]
        rights = [j for j in range(len(reads)) if len(reads[j]) >= width and state.free_right(j)]
        if not lefts or not rights:
            continue
        budget = allowed_mismatches(width, mismatch_threshold)
        if budget == 0:
            _exact_width(reads, scorer, state, lefts, rights, width)
            continue
        for candidate in scorer.approximate(lefts, rights, width, budget):
            state.try_pair(reads, candidate.left_id, candidate.right_id, width, candidate.mismatches)

    contigs, chains, placements = _spell(reads, state)

    closing, ambiguous = None, False
    if circular and len(chains) == 1 and len(chains[0]) >= 2:
        tail, head = reads[chains[0][-1]], reads[chains[0][0]]
        closing, ambiguous = _closing_width(tail, head, min_overlap, mismatch_threshold)
        if ambiguous:
            closing = None
        if closing is not None:
            contigs = [contigs[0][: len(contigs[0]) - closing]]

    return AssemblyResult(
        contigs=contigs,
        circular=closing is not None,
        merge_log=state.log,
        placements=placements,
        chains=chains,
        closing_overlap=closing,
        closure_ambiguous=ambiguous,
    )
