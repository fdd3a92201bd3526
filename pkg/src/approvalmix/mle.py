"""Maximum-likelihood learners for single (non-mixture) cultures.

Closed forms exist for the shared-probability model, the per-candidate
model and the Hamming noise model. For the grouped model with t
probability groups, the optimum partitions candidates contiguously after
sorting by approval score, so a dynamic program over sorted prefixes
finds the global maximum. A brute-force enumerator over all set
partitions doubles as an oracle for small rosters.

All scores are accumulated in log space; blocks whose approval fraction
is exactly 0 or 1 contribute zero log-terms (the ``0 * ln 0 = 0``
convention shared with the likelihood module).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np
from scipy.special import xlogy

from .cultures import Culture, FullIam, GroupedIam, HammingNoise, ImpartialCulture
from .elections import Election, approval_fraction
from .errors import BadArity, EmptyElection, TooLarge
from .likelihood import log_prob_election

__all__ = [
    "FitReport",
    "fit_ic",
    "fit_full_iam",
    "fit_hamming",
    "fit_t_iam",
    "brute_force_t_iam",
]

BRUTE_FORCE_MAX_CANDIDATES = 10


@dataclass(frozen=True)
class FitReport:
    """A fitted culture together with its training log-likelihood."""

    model: Culture
    train_log_likelihood: float


def _require_voters(e: Election) -> None:
    if e.n == 0:
        raise EmptyElection("cannot fit a model to an election with no voters")


def fit_ic(e: Election) -> FitReport:
    """Shared approval probability = overall fraction of approvals."""
    _require_voters(e)
    model = ImpartialCulture(approval_fraction(e, range(e.m)), e.m)
    return FitReport(model, log_prob_election(model, e))


def fit_full_iam(e: Election) -> FitReport:
    """Per-candidate approval probability = its approval score over n."""
    _require_voters(e)
    model = FullIam(e.scores / e.n)
    return FitReport(model, log_prob_election(model, e))


def fit_hamming(e: Election) -> FitReport:
    """Majoritarian central vote, then the dispersion that matches it.

    The central vote contains exactly the candidates approved by at least
    half of the voters (ties included). With h the total Hamming distance
    from the central vote to all ballots, the optimal dispersion is
    ``h / (m*n - h)``, and 0 when h is 0.
    """
    _require_voters(e)
    central = (2 * e.scores >= e.n).astype(np.int8)
    h = int(np.where(central == 1, e.n - e.scores, e.scores).sum())
    phi = h / (e.m * e.n - h) if h > 0 else 0.0
    model = HammingNoise(phi, central)
    return FitReport(model, log_prob_election(model, e))


def _score_order(e: Election) -> np.ndarray:
    """Candidates by descending approval score, ties by ascending index."""
    return np.argsort(-e.scores, kind="stable")


def _block_log_liks(sorted_scores: np.ndarray, n: int) -> np.ndarray:
    """(m+1, m+1) table: entry [i, j] is the best single-probability
    log-likelihood of the sorted candidate block [i, j), -inf for j <= i."""
    m = sorted_scores.size
    prefix = np.concatenate([[0], np.cumsum(sorted_scores)]).astype(float)
    approvals = prefix[None, :] - prefix[:, None]
    slots = (np.arange(m + 1)[None, :] - np.arange(m + 1)[:, None]) * float(n)
    valid = slots > 0
    with np.errstate(invalid="ignore", divide="ignore"):
        p = np.where(valid, approvals / np.where(valid, slots, 1.0), 0.0)
        table = xlogy(approvals, p) + xlogy(slots - approvals, 1.0 - p)
    return np.where(valid, table, -np.inf)


def fit_t_iam(e: Election, t: int) -> FitReport:
    """Best grouped model with exactly ``t`` probability groups.

    Sorts candidates by descending approval score and runs a dynamic
    program over contiguous blocks of the sorted order; the optimal
    grouping is always contiguous in that order, so this attains the
    global maximum. Each group's probability is its approval fraction.
    """
    _require_voters(e)
    if t < 1 or t > e.m:
        raise BadArity(f"t={t} outside [1, {e.m}]")
    order = _score_order(e)
    block = _block_log_liks(e.scores[order], e.n)
    m = e.m

    # best[j] = best log-likelihood of the first j sorted candidates using
    # the current number of blocks; split[l][j] = where block l starts.
    best = block[0].copy()
    split = np.zeros((t + 1, m + 1), dtype=np.intp)
    for level in range(2, t + 1):
        candidates = best[:, None] + block  # candidates[i, j]: last block [i, j)
        candidates[: level - 1, :] = -np.inf  # first level-1 blocks need level-1 slots
        starts = np.argmax(candidates, axis=0)
        best = candidates[starts, np.arange(m + 1)]
        split[level] = starts

    boundaries = [m]
    for level in range(t, 1, -1):
        boundaries.append(int(split[level][boundaries[-1]]))
    boundaries.append(0)
    boundaries.reverse()

    group_of = np.empty(m, dtype=np.intp)
    probs = np.empty(t)
    for g in range(t):
        members = order[boundaries[g] : boundaries[g + 1]]
        group_of[members] = g
        probs[g] = approval_fraction(e, members)
    model = GroupedIam(group_of, probs)
    return FitReport(model, log_prob_election(model, e))


def _set_partitions(m: int, t: int) -> Iterator[list[list[int]]]:
    """All partitions of range(m) into exactly t nonempty unordered groups."""
    groups: list[list[int]] = []

    def extend(i: int) -> Iterator[list[list[int]]]:
        if i == m:
            if len(groups) == t:
                yield [list(g) for g in groups]
            return
        if len(groups) + (m - i) < t:
            return
        for g in groups:
            g.append(i)
            yield from extend(i + 1)
            g.pop()
        if len(groups) < t:
            groups.append([i])
            yield from extend(i + 1)
            groups.pop()

    return extend(0)


def brute_force_t_iam(e: Election, t: int) -> FitReport:
    """Exhaustive-search oracle over every partition into ``t`` groups.

    Each partition is scored with group probabilities equal to approval
    fractions, which is optimal for a fixed partition. Only for small
    rosters; the reported log-likelihood is accumulated independently of
    the dynamic program so the two routes can be compared.
    """
    _require_voters(e)
    if e.m > BRUTE_FORCE_MAX_CANDIDATES:
        raise TooLarge(f"brute force limited to m <= {BRUTE_FORCE_MAX_CANDIDATES}")
    if t < 1 or t > e.m:
        raise BadArity(f"t={t} outside [1, {e.m}]")

    scores = e.scores.astype(float)
    best_ll = -np.inf
    best_partition: list[list[int]] | None = None
    for partition in _set_partitions(e.m, t):
        ll = 0.0
        for group in partition:
            approvals = scores[group].sum()
            slots = float(e.n * len(group))
            p = approvals / slots
            ll += float(xlogy(approvals, p) + xlogy(slots - approvals, 1.0 - p))
        if ll > best_ll:
            best_ll = ll
            best_partition = partition

    assert best_partition is not None
    group_of = np.empty(e.m, dtype=np.intp)
    probs = np.empty(t)
    for g, group in enumerate(best_partition):
        group_of[group] = g
        probs[g] = approval_fraction(e, group)
    return FitReport(GroupedIam(group_of, probs), best_ll)
