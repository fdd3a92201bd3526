"""Core approval-election data model and slicing utilities.

An election is a fixed candidate roster plus an ordered collection of
approval ballots. Ballots are stored as one dense 0/1 matrix of shape
(n voters, m candidates); row i is voter i's indicator vector. Voters are
non-anonymous: the row order is part of the election's identity.

Elections are immutable after construction (the ballot and score arrays
are marked read-only), so values can be shared freely across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EmptyElection, EmptySubset, TooFewVoters

__all__ = [
    "Candidate",
    "Election",
    "approval_fraction",
    "restrict",
    "split_learn_eval",
    "sample_disjoint_pair",
]


@dataclass(frozen=True)
class Candidate:
    """A candidate: external id (e.g. Pabulib project id) plus dense index."""

    external_id: str
    index: int


class Election:
    """Candidate roster plus ordered ballot matrix with cached approval scores.

    Parameters
    ----------
    candidates:
        Candidate external ids, in roster order.
    ballots:
        Array-like of shape (n, m) with entries in {0, 1}.
    """

    def __init__(self, candidates: Sequence[str], ballots) -> None:
        ids = [str(c) for c in candidates]
        self.candidates = tuple(Candidate(cid, j) for j, cid in enumerate(ids))
        mat = np.asarray(ballots, dtype=np.int8)
        if mat.size == 0:
            mat = mat.reshape(0, len(ids))
        if mat.ndim != 2 or mat.shape[1] != len(ids):
            raise ValueError(
                f"ballot matrix shape {mat.shape} does not match {len(ids)} candidates"
            )
        if mat.size and not np.all((mat == 0) | (mat == 1)):
            raise ValueError("ballot entries must be 0 or 1")
        mat = mat.copy()
        mat.flags.writeable = False
        self.ballots = mat
        scores = mat.sum(axis=0, dtype=np.int64)
        scores.flags.writeable = False
        self.scores = scores

    @property
    def n(self) -> int:
        """Number of voters."""
        return self.ballots.shape[0]

    @property
    def m(self) -> int:
        """Number of candidates."""
        return self.ballots.shape[1]

    def candidate_ids(self) -> list[str]:
        return [c.external_id for c in self.candidates]

    def approval_sets(self) -> list[list[int]]:
        """Each ballot as a sorted list of approved candidate indices."""
        return [np.flatnonzero(row).tolist() for row in self.ballots]

    def take_voters(self, positions: Iterable[int]) -> "Election":
        """Sub-election holding the given voter positions, in the given order."""
        pos = np.asarray(list(positions), dtype=np.intp)
        return Election(self.candidate_ids(), self.ballots[pos])

    def concat(self, other: "Election") -> "Election":
        if other.m != self.m:
            raise ValueError("cannot concatenate elections with different rosters")
        return Election(self.candidate_ids(), np.vstack([self.ballots, other.ballots]))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Election):
            return NotImplemented
        return (
            self.candidate_ids() == other.candidate_ids()
            and self.ballots.shape == other.ballots.shape
            and bool(np.array_equal(self.ballots, other.ballots))
        )

    def __hash__(self):
        return hash((tuple(self.candidate_ids()), self.ballots.tobytes()))

    def __repr__(self) -> str:
        return f"Election(n={self.n}, m={self.m})"

    # --- JSON fixture format -------------------------------------------
    # {"candidates": [id, ...], "ballots": [[approved index, ...], ...]}

    def to_json(self) -> str:
        """Serialize to the internal JSON dump (ballots as index arrays)."""
        return json.dumps(
            {"candidates": self.candidate_ids(), "ballots": self.approval_sets()}
        )

    @classmethod
    def from_json(cls, text: str) -> "Election":
        data = json.loads(text)
        ids = data["candidates"]
        mat = np.zeros((len(data["ballots"]), len(ids)), dtype=np.int8)
        for i, approved in enumerate(data["ballots"]):
            mat[i, approved] = 1
        return cls(ids, mat)


def _subset_indices(e: Election, subset) -> np.ndarray:
    """Normalize a candidate-index subset; sets are sorted for determinism."""
    if isinstance(subset, (set, frozenset)):
        idx = np.asarray(sorted(subset), dtype=np.intp)
    else:
        idx = np.asarray(list(subset), dtype=np.intp)
    if idx.size == 0:
        raise EmptySubset("candidate subset is empty")
    if len(np.unique(idx)) != idx.size:
        raise ValueError("candidate subset contains duplicates")
    if idx.min() < 0 or idx.max() >= e.m:
        raise IndexError(f"candidate index out of range [0, {e.m})")
    return idx


def approval_fraction(e: Election, subset) -> float:
    """Probability that a random voter approves a random candidate from `subset`.

    Equals the total number of approvals received by the subset divided by
    n * |subset|.
    """
    idx = _subset_indices(e, subset)
    if e.n == 0:
        raise EmptyElection("approval fraction undefined for an empty election")
    return float(e.scores[idx].sum()) / (e.n * idx.size)


def restrict(e: Election, subset) -> Election:
    """Election restricted to a candidate subset, reindexed densely.

    Keeps every voter (ballots are projected onto the subset); candidate
    order follows the subset order (sorted when a set is given).
    """
    idx = _subset_indices(e, subset)
    ids = [e.candidates[j].external_id for j in idx]
    return Election(ids, e.ballots[:, idx])


def split_learn_eval(
    e: Election, n_eval: int, n_sample_cap: int, rng: np.random.Generator
) -> tuple[Election, Election]:
    """Split into a learning and an evaluation election.

    The evaluation part gets exactly `n_eval` voters, drawn uniformly
    without replacement; the learning part holds the rest, down-sampled
    uniformly to `n_sample_cap` voters if larger. The two parts never share
    a voter position. Voter order within each part follows the original.
    """
    if e.n < n_eval + 1:
        raise TooFewVoters(f"need at least {n_eval + 1} voters, have {e.n}")
    eval_pos = np.sort(rng.choice(e.n, size=n_eval, replace=False))
    learn_pos = np.setdiff1d(np.arange(e.n), eval_pos, assume_unique=True)
    if learn_pos.size > n_sample_cap:
        learn_pos = np.sort(rng.choice(learn_pos, size=n_sample_cap, replace=False))
    return e.take_voters(learn_pos), e.take_voters(eval_pos)


def sample_disjoint_pair(
    e: Election, n_eval: int, rng: np.random.Generator
) -> tuple[Election, Election]:
    """Two disjoint random sub-elections of `n_eval` voters each.

    Draws 2 * n_eval voter positions without replacement and splits them in
    half, which is uniform over disjoint pairs.
    """
    if e.n < 2 * n_eval:
        raise TooFewVoters(f"need at least {2 * n_eval} voters, have {e.n}")
    pos = rng.choice(e.n, size=2 * n_eval, replace=False)
    return e.take_voters(pos[:n_eval]), e.take_voters(pos[n_eval:])
