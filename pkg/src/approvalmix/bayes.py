"""Bayesian mixture estimation by Gibbs sampling.

The generative processes use flat priors throughout: mixture weights are
Dirichlet(1), approval and dispersion parameters are uniform on [0, 1],
and central-vote bits are Bernoulli (fair coins for the Hamming family,
Bernoulli(p_k) for the resampling family). One sweep of the sampler

1. draws every voter's component assignment from its categorical full
   conditional,
2. draws the weights from Dirichlet(1 + per-component counts),
3. updates component parameters: per-candidate Beta draws for the
   ``fulliam`` family (conjugate), two-point conditionals for central-vote
   bits, and reflective random-walk Metropolis steps for the dispersion
   and approval parameters of the ``hamming`` / ``resampling`` families.

Recorded states have their components sorted by descending weight, which
pins one of the K! equivalent labelings so that posterior means are
well defined. Fixed seeds give identical chains.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, xlogy

from .cultures import FullIam, HammingNoise, Mixture, Resampling, culture_to_json
from .elections import Election
from .errors import BadConfig, EmptyChain
from .likelihood import component_log_probs

__all__ = ["PosteriorChain", "gibbs_fit", "posterior_mean", "chain_to_jsonl"]

BAYES_FAMILIES = ("fulliam", "hamming", "resampling")

DEFAULT_TOTAL_SAMPLES = 2000
DEFAULT_BURN_IN = 1000

_MH_STEP = 0.05  # random-walk scale; tunable, chosen for mid-range acceptance


@dataclass(frozen=True)
class PosteriorChain:
    """All sampled mixture states plus the burn-in cutoff."""

    samples: tuple[Mixture, ...]
    burn_in: int
    family: str
    k: int

    @property
    def retained(self) -> tuple[Mixture, ...]:
        """Post-burn-in samples, the ones estimates are built from."""
        return self.samples[self.burn_in :]


def _reflect01(x: float) -> float:
    while x < 0.0 or x > 1.0:
        x = -x if x < 0.0 else 2.0 - x
    return x


def _mh_step(current: float, log_target, rng: np.random.Generator) -> float:
    """One reflective random-walk Metropolis update on [0, 1]."""
    proposal = _reflect01(current + _MH_STEP * rng.standard_normal())
    if np.log(rng.random()) < log_target(proposal) - log_target(current):
        return proposal
    return current


class _FullIamState:
    def __init__(self, k: int, m: int, rng: np.random.Generator):
        self.probs = rng.random((k, m))

    def update(self, approvals, counts, rng):
        self.probs = rng.beta(1.0 + approvals, 1.0 + counts[:, None] - approvals)

    def components(self, order):
        return tuple(FullIam(self.probs[j]) for j in order)


class _HammingState:
    def __init__(self, k: int, m: int, rng: np.random.Generator):
        self.phi = rng.random(k)
        self.central = (rng.random((k, m)) < 0.5).astype(np.int8)

    def update(self, approvals, counts, rng):
        for j in range(self.phi.size):
            s = approvals[j]
            n_j = counts[j]
            # Flipping one central bit rescales the vote likelihood by
            # phi^(+-(2s - n)); the fair-coin prior contributes nothing.
            with np.errstate(divide="ignore", invalid="ignore"):
                delta = -(2.0 * s - n_j) * np.log(self.phi[j])
            delta = np.nan_to_num(delta, nan=0.0, posinf=np.inf, neginf=-np.inf)
            self.central[j] = (rng.random(s.size) < expit(delta)).astype(np.int8)

            mismatches = float(np.where(self.central[j] == 1, n_j - s, s).sum())
            m = s.size

            def log_target(phi, h=mismatches, total=n_j * m):
                return float(xlogy(h, phi) - total * np.log1p(phi))

            self.phi[j] = _mh_step(self.phi[j], log_target, rng)

    def components(self, order):
        return tuple(HammingNoise(float(self.phi[j]), self.central[j].copy()) for j in order)


class _ResamplingState:
    def __init__(self, k: int, m: int, rng: np.random.Generator):
        self.phi = rng.random(k)
        self.p = rng.random(k)
        self.central = np.zeros((k, m), dtype=np.int8)
        for j in range(k):
            self.central[j] = (rng.random(m) < self.p[j]).astype(np.int8)

    def update(self, approvals, counts, rng):
        for j in range(self.phi.size):
            s = approvals[j]
            n_j = counts[j]
            phi, p = float(self.phi[j]), float(self.p[j])
            miss_in = phi * (1.0 - p)  # central approves, vote does not
            miss_out = phi * p         # central skips, vote approves
            with np.errstate(divide="ignore", invalid="ignore"):
                on = np.log(p) + xlogy(s, 1.0 - miss_in) + xlogy(n_j - s, miss_in)
                off = np.log(1.0 - p) + xlogy(s, miss_out) + xlogy(n_j - s, 1.0 - miss_out)
                delta = np.nan_to_num(on - off, nan=0.0, posinf=np.inf, neginf=-np.inf)
            self.central[j] = (rng.random(s.size) < expit(delta)).astype(np.int8)

            inside = self.central[j] == 1
            n11 = float(s[inside].sum())
            n10 = float(n_j * inside.sum() - n11)
            n01 = float(s[~inside].sum())
            n00 = float(n_j * (~inside).sum() - n01)

            def vote_ll(phi, p):
                return float(
                    xlogy(n11, 1.0 - phi * (1.0 - p))
                    + xlogy(n10, phi * (1.0 - p))
                    + xlogy(n01, phi * p)
                    + xlogy(n00, 1.0 - phi * p)
                )

            ones = float(inside.sum())
            zeros = float(s.size - ones)
            self.phi[j] = _mh_step(self.phi[j], lambda x: vote_ll(x, self.p[j]), rng)
            # p also acts as the prior for the central-vote bits.
            self.p[j] = _mh_step(
                self.p[j],
                lambda x: vote_ll(self.phi[j], x) + float(xlogy(ones, x) + xlogy(zeros, 1.0 - x)),
                rng,
            )

    def components(self, order):
        return tuple(
            Resampling(float(self.p[j]), float(self.phi[j]), self.central[j].copy())
            for j in order
        )


_STATE_CLASSES = {
    "fulliam": _FullIamState,
    "hamming": _HammingState,
    "resampling": _ResamplingState,
}


def gibbs_fit(
    e: Election,
    k: int,
    family: str,
    total_samples: int = DEFAULT_TOTAL_SAMPLES,
    burn_in: int = DEFAULT_BURN_IN,
    rng: np.random.Generator | None = None,
) -> PosteriorChain:
    """Run the Gibbs sampler and record one mixture state per sweep.

    On an empty election the chain simply samples the prior. Components
    of every recorded state are sorted by descending weight.
    """
    if rng is None:
        rng = np.random.default_rng()
    if family not in BAYES_FAMILIES:
        raise ValueError(f"unknown component family {family!r}")
    if k < 1:
        raise BadConfig("k must be at least 1")
    if burn_in < 0 or burn_in >= total_samples:
        raise BadConfig(f"burn_in={burn_in} must be in [0, total_samples={total_samples})")

    ballots = e.ballots.astype(float)
    weights = rng.dirichlet(np.ones(k))
    state = _STATE_CLASSES[family](k, e.m, rng)

    samples = []
    for _ in range(total_samples):
        # (1) component assignments from their categorical full conditional
        mix = Mixture(weights / weights.sum(), state.components(range(k)))
        if e.n:
            with np.errstate(divide="ignore"):
                logits = component_log_probs(mix, e.ballots) + np.log(mix.weights)[None, :]
            z = np.argmax(logits + rng.gumbel(size=logits.shape), axis=1)
            counts = np.bincount(z, minlength=k).astype(float)
            one_hot = np.zeros((e.n, k))
            one_hot[np.arange(e.n), z] = 1.0
            approvals = one_hot.T @ ballots
        else:
            counts = np.zeros(k)
            approvals = np.zeros((k, e.m))

        # (2) weights from Dirichlet(1 + counts)
        weights = rng.dirichlet(1.0 + counts)

        # (3) family-specific parameter updates
        state.update(approvals, counts, rng)

        # (4) record, sorted by descending weight
        order = np.argsort(-weights, kind="stable")
        samples.append(Mixture(weights[order] / weights[order].sum(), state.components(order)))

    return PosteriorChain(tuple(samples), burn_in, family, k)


def posterior_mean(chain: PosteriorChain) -> Mixture:
    """Coordinate-wise mean of the retained samples.

    Weights and continuous parameters are averaged; central-vote bits are
    set by per-bit majority across samples (ties count as approved).
    Weights are renormalized to sum to one.
    """
    retained = chain.retained
    if not retained:
        raise EmptyChain("no retained samples")
    k = chain.k
    weights = np.mean([s.weights for s in retained], axis=0)
    weights = weights / weights.sum()

    components = []
    for j in range(k):
        comps = [s.components[j] for s in retained]
        if chain.family == "fulliam":
            components.append(FullIam(np.mean([c.probs for c in comps], axis=0)))
        elif chain.family == "hamming":
            central = np.mean([c.central for c in comps], axis=0) >= 0.5
            components.append(
                HammingNoise(float(np.mean([c.phi for c in comps])), central.astype(np.int8))
            )
        else:
            central = np.mean([c.central for c in comps], axis=0) >= 0.5
            components.append(
                Resampling(
                    float(np.mean([c.p for c in comps])),
                    float(np.mean([c.phi for c in comps])),
                    central.astype(np.int8),
                )
            )
    return Mixture(weights, tuple(components))


def chain_to_jsonl(chain: PosteriorChain) -> str:
    """Retained samples as JSON lines, one mixture state per line."""
    return "\n".join(culture_to_json(s) for s in chain.retained) + "\n"
