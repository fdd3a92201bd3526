"""Exact log-probabilities of votes and elections under every culture.

Everything is computed in natural-log space with the convention
``0 * ln 0 = 0`` (via ``scipy.special.xlogy``), so deterministic models
score their own training data at 0 instead of NaN, and impossible events
come out as ``-inf``. No smoothing happens here; callers that want a
guard against ``-inf`` clamp the model first
(:func:`approvalmix.cultures.clamp_probabilities`).
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp, xlogy

from .cultures import (
    Culture,
    FullIam,
    GroupedIam,
    HammingNoise,
    ImpartialCulture,
    Mixture,
    Resampling,
)
from .elections import Election
from .errors import DimensionMismatch

__all__ = [
    "log_prob_vote",
    "log_prob_election",
    "log_prob_votes",
    "component_log_probs",
]


def _bernoulli_log_probs(votes: np.ndarray, probs: np.ndarray) -> np.ndarray:
    """Per-vote log-probability under independent per-candidate Bernoullis."""
    return xlogy(votes, probs).sum(axis=1) + xlogy(1 - votes, 1.0 - probs).sum(axis=1)


def log_prob_votes(c: Culture, votes: np.ndarray) -> np.ndarray:
    """Log-probability of each row of a (n, m) 0/1 vote matrix."""
    votes = np.asarray(votes)
    if votes.ndim != 2 or votes.shape[1] != c.m:
        raise DimensionMismatch(
            f"vote matrix with {votes.shape[-1] if votes.ndim else 0} candidates "
            f"scored under a model with m={c.m}"
        )
    if isinstance(c, (ImpartialCulture, GroupedIam, FullIam)):
        return _bernoulli_log_probs(votes, c.entry_probs())
    if isinstance(c, HammingNoise):
        distances = np.abs(votes - c.central).sum(axis=1)
        return xlogy(distances, c.phi) - c.m * np.log1p(c.phi)
    if isinstance(c, Resampling):
        # Per position: the vote disagrees with the central vote only when
        # the position was resampled to the other value. Disagreement
        # probabilities phi*(1-p) and phi*p are formed directly (never as
        # 1 - agreement) so tiny values keep full relative precision.
        miss_in = c.phi * (1.0 - c.p)   # central approves, vote does not
        miss_out = c.phi * c.p          # central skips, vote approves
        with np.errstate(divide="ignore"):
            vote_one = np.where(c.central == 1, np.log1p(-miss_in), np.log(miss_out))
            vote_zero = np.where(c.central == 1, np.log(miss_in), np.log1p(-miss_out))
        return np.where(votes == 1, vote_one[None, :], vote_zero[None, :]).sum(axis=1)
    if isinstance(c, Mixture):
        per_comp = component_log_probs(c, votes)
        with np.errstate(divide="ignore"):
            weighted = per_comp + np.log(c.weights)[None, :]
        return logsumexp(weighted, axis=1)
    raise TypeError(f"unknown culture {type(c).__name__}")


def component_log_probs(mix: Mixture, votes: np.ndarray) -> np.ndarray:
    """(n, K) matrix of per-component log-probabilities, without weights."""
    return np.column_stack([log_prob_votes(comp, votes) for comp in mix.components])


def log_prob_vote(c: Culture, ballot) -> float:
    """Exact log-probability of one approval ballot under the culture."""
    ballot = np.asarray(ballot)
    if ballot.ndim != 1 or ballot.size != c.m:
        raise DimensionMismatch(f"ballot of length {ballot.size} vs model m={c.m}")
    return float(log_prob_votes(c, ballot[None, :])[0])


def log_prob_election(c: Culture, e: Election) -> float:
    """Log-likelihood of generating the election: sum of per-vote log-probs."""
    if e.m != c.m:
        raise DimensionMismatch(f"election with m={e.m} vs model m={c.m}")
    if e.n == 0:
        return 0.0
    return float(log_prob_votes(c, e.ballots).sum())
