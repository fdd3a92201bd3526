"""Distances between elections and between elections and learned models.

The central quantity is the voter-anonymous Hamming distance: match the
two elections' voters one-to-one so that the total Hamming distance
between matched ballots is minimal, then divide by the number of voters.
The matching is an exact minimum-cost assignment on the integer cost
matrix; the single division at the end keeps all other arithmetic
integral.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .cultures import Culture, sample_election
from .elections import Election, sample_disjoint_pair
from .errors import DimensionMismatch, EmptyElection, UnequalSizes

__all__ = [
    "hamming",
    "va_ham",
    "baseline",
    "absolute_distance",
    "DistanceReport",
]

DEFAULT_BASELINE_PAIRS = 5


def hamming(a, b) -> int:
    """Number of candidates approved in exactly one of the two ballots."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"ballot lengths {a.size} vs {b.size}")
    return int(np.count_nonzero(a != b))


def _hamming_cost_matrix(e1: Election, e2: Election) -> np.ndarray:
    # a xor b = a(1-b) + (1-a)b; float matmul uses BLAS and stays exact
    # because every value is a small integer.
    a = e1.ballots.astype(float)
    b = e2.ballots.astype(float)
    return (a @ (1.0 - b).T + (1.0 - a) @ b.T).astype(np.int64)


def va_ham(e1: Election, e2: Election) -> float:
    """Voter-anonymous Hamming distance between two equal-size elections.

    Exact optimum of the n-by-n assignment problem on pairwise ballot
    Hamming distances, divided by n. Invariant to reordering the voters
    of either election.
    """
    if e1.m != e2.m:
        raise DimensionMismatch(f"candidate sets differ: m={e1.m} vs m={e2.m}")
    if e1.n != e2.n:
        raise UnequalSizes(f"voter counts differ: n={e1.n} vs n={e2.n}")
    if e1.n == 0:
        raise EmptyElection("distance undefined for empty elections")
    costs = _hamming_cost_matrix(e1, e2)
    rows, cols = linear_sum_assignment(costs)
    return int(costs[rows, cols].sum()) / e1.n


def baseline(
    e: Election,
    n_eval: int,
    pairs: int = DEFAULT_BASELINE_PAIRS,
    rng: np.random.Generator | None = None,
) -> float:
    """Internal diversity of an election.

    Average voter-anonymous Hamming distance over ``pairs`` independent
    draws of two disjoint random sub-elections with ``n_eval`` voters
    each.
    """
    if pairs < 1:
        raise ValueError("pairs must be at least 1")
    if rng is None:
        rng = np.random.default_rng()
    values = [va_ham(*sample_disjoint_pair(e, n_eval, rng)) for _ in range(pairs)]
    return float(np.mean(values))


def absolute_distance(c: Culture, e_eval: Election, rng: np.random.Generator) -> float:
    """Distance from an evaluation election to a model.

    Samples an election of the same size from the model and returns the
    voter-anonymous Hamming distance to the evaluation election.
    """
    if c.m != e_eval.m:
        raise DimensionMismatch(f"model m={c.m} vs election m={e_eval.m}")
    if e_eval.n == 0:
        raise EmptyElection("evaluation election has no voters")
    return va_ham(e_eval, sample_election(c, e_eval.n, rng))


@dataclass(frozen=True)
class DistanceReport:
    """Absolute and baseline distances plus their ratio.

    ``relative`` is None (undefined) when the baseline is zero; the
    ratio would otherwise silently inject non-finite values downstream.
    """

    absolute: float
    baseline: float
    relative: float | None

    @classmethod
    def from_values(cls, absolute: float, baseline: float) -> "DistanceReport":
        relative = absolute / baseline if baseline > 0 else None
        return cls(absolute, baseline, relative)
