"""Expectation-maximization for mixtures of approval-vote models.

Supported component families: ``ic``, ``fulliam``, ``hamming`` and
``resampling``. The E-step computes responsibilities in log space; each
M-step refits every component on the responsibility-weighted election,
which reduces to the single-model closed forms with real-valued vote
weights (weighted approval fractions, a weighted majoritarian central
vote, or a weighted scan over score-sorted two-group splits).

Parameters that land exactly on 0 or 1 after an M-step are clamped away
from the boundary for the next E-step only, so a component can never be
permanently locked out by one impossible vote; reported models keep the
unclamped values.
"""

from __future__ import annotations

from dataclasses import dataclass

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
    clamp_probabilities,
    twoiam_to_resampling,
)
from .elections import Election
from .errors import DimensionMismatch, EmptyComponent, EmptyElection
from .likelihood import component_log_probs, log_prob_election
from .mle import FitReport

__all__ = ["SoftAssignment", "EmTrace", "e_step", "m_step", "em_fit"]

EM_FAMILIES = ("ic", "fulliam", "hamming", "resampling")

_EMPTY_TOL = 1e-10
_INIT_LOW, _INIT_HIGH = 0.05, 0.95


@dataclass(frozen=True)
class SoftAssignment:
    """Per-vote component responsibilities and their per-component totals."""

    resp: np.ndarray    # (n, K), rows sum to 1
    totals: np.ndarray  # (K,) column sums


@dataclass(frozen=True)
class EmTrace:
    """Per-iteration training log-likelihoods of one EM run."""

    log_likelihoods: tuple[float, ...]
    iterations: int
    converged: bool


def e_step(e: Election, mix: Mixture) -> SoftAssignment:
    """Responsibility of each component for each vote.

    Computed in log space with log-sum-exp row normalization. A vote that
    is impossible under every component gets a uniform row.
    """
    if e.m != mix.m:
        raise DimensionMismatch(f"election with m={e.m} vs mixture m={mix.m}")
    per_comp = component_log_probs(mix, e.ballots)
    with np.errstate(divide="ignore"):
        weighted = per_comp + np.log(mix.weights)[None, :]
    norm = logsumexp(weighted, axis=1)
    impossible = np.isinf(norm)
    with np.errstate(invalid="ignore"):
        resp = np.exp(weighted - norm[:, None])
    resp[impossible] = 1.0 / mix.k
    return SoftAssignment(resp, resp.sum(axis=0))


def _weighted_two_group(weighted_scores: np.ndarray, total: float) -> Resampling:
    """Best two-group split of responsibility-weighted approval scores.

    Scans every split point of the candidates sorted by descending
    weighted score; each side's probability is its weighted approval
    fraction. Returns the equivalent resampling parameterization.
    """
    m = weighted_scores.size
    if m == 1:
        p = float(np.clip(weighted_scores[0] / total, 0.0, 1.0))
        return Resampling(p=p, phi=1.0, central=np.array([1 if p >= 0.5 else 0], dtype=np.int8))
    order = np.argsort(-weighted_scores, kind="stable")
    prefix = np.concatenate([[0.0], np.cumsum(weighted_scores[order])])
    sizes = np.arange(1, m)                     # candidates in the first group
    first = prefix[1:m]
    second = prefix[m] - first
    slots1 = total * sizes
    slots2 = total * (m - sizes)
    p1 = np.clip(first / slots1, 0.0, 1.0)
    p2 = np.clip(second / slots2, 0.0, 1.0)
    lls = (
        xlogy(first, p1)
        + xlogy(np.maximum(slots1 - first, 0.0), 1.0 - p1)
        + xlogy(second, p2)
        + xlogy(np.maximum(slots2 - second, 0.0), 1.0 - p2)
    )
    cut = int(np.argmax(lls))
    group_of = np.ones(m, dtype=np.intp)
    group_of[order[: cut + 1]] = 0
    return twoiam_to_resampling(GroupedIam(group_of, [p1[cut], p2[cut]]))


def m_step(e: Election, assignment: SoftAssignment, family: str) -> Mixture:
    """Refit weights and components on the weighted election.

    Component weights become the responsibility totals over n. Raises
    EmptyComponent when a component's total mass is (numerically) zero;
    the caller is expected to reinitialize it and continue.
    """
    if family not in EM_FAMILIES:
        raise ValueError(f"unknown component family {family!r}")
    resp, totals = assignment.resp, assignment.totals
    if resp.shape[0] != e.n:
        raise DimensionMismatch("assignment does not match the election")
    empty = np.flatnonzero(totals < _EMPTY_TOL)
    if empty.size:
        raise EmptyComponent(empty.tolist())

    weights = totals / totals.sum()
    weighted_scores = resp.T @ e.ballots  # (K, m) weighted approvals per candidate
    components = []
    for k in range(resp.shape[1]):
        total = float(totals[k])
        scores_k = weighted_scores[k]
        if family == "ic":
            components.append(
                ImpartialCulture(float(np.clip(scores_k.sum() / (total * e.m), 0.0, 1.0)), e.m)
            )
        elif family == "fulliam":
            components.append(FullIam(np.clip(scores_k / total, 0.0, 1.0)))
        elif family == "hamming":
            central = (2.0 * scores_k >= total).astype(np.int8)
            h = float(np.where(central == 1, total - scores_k, scores_k).sum())
            phi = min(h / (e.m * total - h), 1.0) if h > 0 else 0.0
            components.append(HammingNoise(phi, central))
        else:
            components.append(_weighted_two_group(scores_k, total))
    return Mixture(weights, tuple(components))


def _random_component(
    family: str, m: int, vote: np.ndarray | None, rng: np.random.Generator
) -> Culture:
    """A spread-out random component; central votes come from a real ballot."""
    def u():
        return float(rng.uniform(_INIT_LOW, _INIT_HIGH))

    if family == "ic":
        if vote is not None:
            return ImpartialCulture(float(np.clip(vote.mean(), _INIT_LOW, _INIT_HIGH)), m)
        return ImpartialCulture(u(), m)
    if family == "fulliam":
        if vote is not None:
            return FullIam(np.where(vote == 1, _INIT_HIGH, _INIT_LOW))
        return FullIam(rng.uniform(_INIT_LOW, _INIT_HIGH, size=m))
    if family == "hamming":
        central = vote if vote is not None else (rng.random(m) < 0.5).astype(np.int8)
        return HammingNoise(u(), central)
    central = vote if vote is not None else (rng.random(m) < 0.5).astype(np.int8)
    return Resampling(p=u(), phi=u(), central=central)


def _initial_mixture(e: Election, k: int, family: str, rng: np.random.Generator) -> Mixture:
    """Uniform weights; parameters i.i.d. uniform on the clamped init range;
    central votes taken from k distinct randomly chosen training votes."""
    votes = None
    if family in ("hamming", "resampling"):
        votes = e.ballots[rng.choice(e.n, size=k, replace=False)]
    components = []
    for j in range(k):
        vote = votes[j] if votes is not None else None
        components.append(_random_component(family, e.m, vote, rng))
    return Mixture(np.full(k, 1.0 / k), tuple(components))


def _reorder_by_weight(mix: Mixture) -> Mixture:
    order = np.argsort(-mix.weights, kind="stable")
    return Mixture(mix.weights[order], tuple(mix.components[i] for i in order))


def em_fit(
    e: Election,
    k: int,
    family: str,
    n_restarts: int = 5,
    max_iter: int = 300,
    tol: float = 1e-6,
    rng: np.random.Generator | None = None,
) -> tuple[FitReport, EmTrace]:
    """Fit a k-component mixture by EM with random restarts.

    Each restart initializes randomly, then alternates E- and M-steps
    until the training log-likelihood changes by less than ``tol`` or
    ``max_iter`` iterations pass. A component that loses all its mass is
    reseeded from a random training vote within the same restart. Returns
    the best restart's model (components sorted by descending weight)
    and its log-likelihood trace.
    """
    if rng is None:
        rng = np.random.default_rng()
    if k < 1:
        raise ValueError("k must be at least 1")
    if family not in EM_FAMILIES:
        raise ValueError(f"unknown component family {family!r}")
    if e.n < k:
        raise EmptyElection(f"need at least {k} voters to fit {k} components")

    best: tuple[float, Mixture, EmTrace] | None = None
    for _ in range(max(1, n_restarts)):
        mix = _initial_mixture(e, k, family, rng)
        lls: list[float] = []
        converged = False
        for _ in range(max_iter):
            assignment = e_step(e, clamp_probabilities(mix))
            try:
                mix = m_step(e, assignment, family)
            except EmptyComponent as err:
                comps = list(mix.components)
                for dead in err.components:
                    vote = e.ballots[rng.integers(e.n)]
                    comps[dead] = _random_component(family, e.m, vote, rng)
                weights = np.maximum(mix.weights, 1.0 / (2 * k))
                mix = Mixture(weights / weights.sum(), tuple(comps))
                continue
            ll = log_prob_election(mix, e)
            lls.append(ll)
            if len(lls) >= 2 and abs(lls[-1] - lls[-2]) < tol:
                converged = True
                break
        trace = EmTrace(tuple(lls), len(lls), converged)
        final = lls[-1] if lls else -np.inf
        if best is None or final > best[0]:
            best = (final, mix, trace)

    assert best is not None
    model = _reorder_by_weight(best[1])
    return FitReport(model, log_prob_election(model, e)), best[2]
