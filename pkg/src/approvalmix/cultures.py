"""Parametric vote distributions and exact conversions between them.

Families
--------
ImpartialCulture
    One shared approval probability for every candidate.
HammingNoise
    Vote probability proportional to ``phi ** distance-to-central-vote``.
Resampling
    Start from a central vote; each position is independently replaced,
    with probability ``phi``, by a Bernoulli(p) draw.
GroupedIam
    Candidates partitioned into groups; every candidate in a group shares
    one approval probability ("t-parameter independent approval model").
FullIam
    Every candidate has its own approval probability.
Mixture
    Categorical draw over components, then a vote from that component.
    Components must all come from one family and share the roster size.

HammingNoise, Resampling and two-group GroupedIam describe the same set
of distributions; the conversion functions below move parameters between
those parameterizations exactly.

All sampling goes through an explicit ``numpy.random.Generator`` so that
fixed seeds give bit-identical elections.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .elections import Election
from .errors import WrongArity

__all__ = [
    "Culture",
    "ImpartialCulture",
    "HammingNoise",
    "Resampling",
    "GroupedIam",
    "FullIam",
    "Mixture",
    "sample_election",
    "resampling_to_2iam",
    "twoiam_to_resampling",
    "hamming_to_2iam",
    "clamp_probabilities",
    "culture_to_dict",
    "culture_from_dict",
    "culture_to_json",
    "culture_from_json",
]

_WEIGHT_TOL = 1e-12


def _check_prob(value: float, name: str) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"{name}={value} outside [0, 1]")
    return value


def _check_prob_vector(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).copy()
    if arr.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional")
    if arr.size and (arr.min() < 0.0 or arr.max() > 1.0):
        raise ValueError(f"{name} has entries outside [0, 1]")
    arr.flags.writeable = False
    return arr


def _check_central(central) -> np.ndarray:
    arr = np.asarray(central, dtype=np.int8).copy()
    if arr.ndim != 1 or arr.size == 0:
        raise ValueError("central vote must be a nonempty indicator vector")
    if not np.all((arr == 0) | (arr == 1)):
        raise ValueError("central vote entries must be 0 or 1")
    arr.flags.writeable = False
    return arr


class Culture:
    """Base class for vote distributions over a fixed candidate set."""

    kind: str = ""

    @property
    def m(self) -> int:
        raise NotImplementedError


@dataclass(frozen=True, eq=False)
class ImpartialCulture(Culture):
    """Every candidate approved independently with probability ``p``."""

    p: float
    num_candidates: int
    kind = "ic"

    def __post_init__(self):
        _check_prob(self.p, "p")
        if self.num_candidates < 1:
            raise ValueError("need at least one candidate")

    @property
    def m(self) -> int:
        return self.num_candidates

    def entry_probs(self) -> np.ndarray:
        return np.full(self.m, self.p)


@dataclass(frozen=True, eq=False)
class HammingNoise(Culture):
    """Vote probability proportional to ``phi ** ham(central, vote)``."""

    phi: float
    central: np.ndarray
    kind = "hamming"

    def __post_init__(self):
        _check_prob(self.phi, "phi")
        object.__setattr__(self, "central", _check_central(self.central))

    @property
    def m(self) -> int:
        return self.central.size

    def entry_probs(self) -> np.ndarray:
        # Agreement with the central vote happens with probability 1/(1+phi),
        # independently per candidate; this is the two-group reformulation.
        inside = 1.0 / (1.0 + self.phi)
        outside = self.phi / (1.0 + self.phi)
        return np.where(self.central == 1, inside, outside)


@dataclass(frozen=True, eq=False)
class Resampling(Culture):
    """Central vote with positions independently resampled to Bernoulli(p)."""

    p: float
    phi: float
    central: np.ndarray
    kind = "resampling"

    def __post_init__(self):
        _check_prob(self.p, "p")
        _check_prob(self.phi, "phi")
        object.__setattr__(self, "central", _check_central(self.central))

    @property
    def m(self) -> int:
        return self.central.size


@dataclass(frozen=True, eq=False)
class GroupedIam(Culture):
    """Candidates partitioned into groups sharing approval probabilities.

    ``group_of[j]`` is the group index of candidate j; ``probs[g]`` the
    approval probability of group g. Group indices must be dense in
    ``[0, t)`` with no empty group.
    """

    group_of: np.ndarray
    probs: np.ndarray
    kind = "tiam"

    def __post_init__(self):
        groups = np.asarray(self.group_of, dtype=np.intp).copy()
        if groups.ndim != 1 or groups.size == 0:
            raise ValueError("group_of must be a nonempty vector")
        probs = _check_prob_vector(self.probs, "probs")
        t = probs.size
        present = np.unique(groups)
        if t < 1 or groups.min() < 0 or groups.max() >= t or present.size != t:
            raise ValueError("group indices must cover [0, t) with no empty group")
        groups.flags.writeable = False
        object.__setattr__(self, "group_of", groups)
        object.__setattr__(self, "probs", probs)

    @property
    def m(self) -> int:
        return self.group_of.size

    @property
    def t(self) -> int:
        return self.probs.size

    def entry_probs(self) -> np.ndarray:
        return self.probs[self.group_of]


@dataclass(frozen=True, eq=False)
class FullIam(Culture):
    """One approval probability per candidate."""

    probs: np.ndarray
    kind = "fulliam"

    def __post_init__(self):
        probs = _check_prob_vector(self.probs, "probs")
        if probs.size == 0:
            raise ValueError("need at least one candidate")
        object.__setattr__(self, "probs", probs)

    @property
    def m(self) -> int:
        return self.probs.size

    def entry_probs(self) -> np.ndarray:
        return self.probs


@dataclass(frozen=True, eq=False)
class Mixture(Culture):
    """Weighted mixture of same-family, same-roster components."""

    weights: np.ndarray
    components: tuple

    kind = "mixture"

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float).copy()
        comps = tuple(self.components)
        if weights.ndim != 1 or weights.size != len(comps) or not comps:
            raise ValueError("need one weight per component, at least one component")
        if weights.min() < 0.0:
            raise ValueError("mixture weights must be nonnegative")
        if abs(weights.sum() - 1.0) > _WEIGHT_TOL:
            raise ValueError(f"mixture weights sum to {weights.sum()!r}, not 1")
        first = type(comps[0])
        for c in comps:
            if isinstance(c, Mixture):
                raise ValueError("mixture components cannot be mixtures")
            if type(c) is not first:
                raise ValueError("mixture components must come from a single family")
            if c.m != comps[0].m:
                raise ValueError("mixture components must share the candidate set")
        weights.flags.writeable = False
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "components", comps)

    @property
    def m(self) -> int:
        return self.components[0].m

    @property
    def k(self) -> int:
        return len(self.components)


# --- sampling --------------------------------------------------------------


def _default_ids(m: int) -> list[str]:
    return [f"c{j}" for j in range(m)]


def _sample_matrix(c: Culture, n: int, rng: np.random.Generator) -> np.ndarray:
    if isinstance(c, Resampling):
        votes = np.broadcast_to(c.central, (n, c.m)).copy()
        replaced = rng.random((n, c.m)) < c.phi
        redrawn = rng.random((n, c.m)) < c.p
        votes[replaced] = redrawn[replaced]
        return votes.astype(np.int8)
    if isinstance(c, Mixture):
        comp = rng.choice(c.k, size=n, p=c.weights)
        votes = np.zeros((n, c.m), dtype=np.int8)
        for k in range(c.k):
            rows = np.flatnonzero(comp == k)
            if rows.size:
                votes[rows] = _sample_matrix(c.components[k], rows.size, rng)
        return votes
    return (rng.random((n, c.m)) < c.entry_probs()).astype(np.int8)


def sample_election(c: Culture, n: int, rng: np.random.Generator) -> Election:
    """Draw ``n`` i.i.d. votes from the culture."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    return Election(_default_ids(c.m), _sample_matrix(c, n, rng))


# --- exact parameter conversions --------------------------------------------


def _two_group_from_central(central: np.ndarray, p_in: float, p_out: float) -> GroupedIam:
    """Two-group model: central candidates get p_in, the rest p_out.

    Degenerates to one group when the central vote is full or empty.
    """
    central = _check_central(central)
    if central.min() == central.max():
        prob = p_in if central[0] == 1 else p_out
        return GroupedIam(np.zeros(central.size, dtype=np.intp), [prob])
    return GroupedIam(np.where(central == 1, 0, 1), [p_in, p_out])


def resampling_to_2iam(p: float, phi: float, central) -> GroupedIam:
    """Equivalent grouped model of a resampling culture.

    Central candidates stay approved unless resampled away, giving
    ``(1 - phi) + phi * p``; the others are approved only when resampled,
    giving ``phi * p``.
    """
    p = _check_prob(p, "p")
    phi = _check_prob(phi, "phi")
    return _two_group_from_central(central, (1.0 - phi) + phi * p, phi * p)


def twoiam_to_resampling(t2: GroupedIam) -> Resampling:
    """Resampling parameters of a two-group model.

    The higher-probability group becomes the central vote; then
    ``phi = 1 - (p1 - p2)`` and ``p = p2 / phi``. The fully deterministic
    case ``p1 - p2 = 1`` maps to ``phi = 0`` with ``p = 0`` by convention.
    """
    if t2.t != 2:
        raise WrongArity(f"expected 2 groups, got {t2.t}")
    p1, p2 = float(t2.probs[0]), float(t2.probs[1])
    central = (t2.group_of == 0).astype(np.int8)
    if p2 > p1:
        p1, p2 = p2, p1
        central = 1 - central
    phi = float(np.clip(1.0 - (p1 - p2), 0.0, 1.0))
    p = float(np.clip(p2 / phi, 0.0, 1.0)) if phi > 0.0 else 0.0
    return Resampling(p=p, phi=phi, central=central)


def hamming_to_2iam(phi: float, central) -> GroupedIam:
    """Equivalent grouped model of a Hamming noise culture.

    Central candidates are approved with probability ``1/(1+phi)``, the
    others with ``phi/(1+phi)``.
    """
    phi = _check_prob(phi, "phi")
    return _two_group_from_central(central, 1.0 / (1.0 + phi), phi / (1.0 + phi))


# --- evaluation-time guard ---------------------------------------------------


def clamp_probabilities(c: Culture, eps: float = 1e-9) -> Culture:
    """Copy of the culture with probabilities pulled off the {0, 1} boundary.

    Approval probabilities are clipped to ``[eps, 1 - eps]`` and dispersion
    parameters to ``[eps, 1]``, so no vote gets probability zero. Used as an
    evaluation-time guard; learned parameters themselves stay unclamped.
    """
    if isinstance(c, ImpartialCulture):
        return ImpartialCulture(float(np.clip(c.p, eps, 1 - eps)), c.m)
    if isinstance(c, HammingNoise):
        return HammingNoise(float(np.clip(c.phi, eps, 1.0)), c.central)
    if isinstance(c, Resampling):
        return Resampling(
            float(np.clip(c.p, eps, 1 - eps)), float(np.clip(c.phi, eps, 1.0)), c.central
        )
    if isinstance(c, GroupedIam):
        return GroupedIam(c.group_of, np.clip(c.probs, eps, 1 - eps))
    if isinstance(c, FullIam):
        return FullIam(np.clip(c.probs, eps, 1 - eps))
    if isinstance(c, Mixture):
        return Mixture(c.weights, tuple(clamp_probabilities(x, eps) for x in c.components))
    raise TypeError(f"unknown culture {type(c).__name__}")


# --- JSON model schema --------------------------------------------------------
# {"kind": "ic" | "hamming" | "resampling" | "tiam" | "fulliam" | "mixture", ...}
# Central votes are stored as arrays of approved candidate indices. Floats are
# written with Python's shortest round-trip repr (<= 17 significant digits).


def _central_to_indices(central: np.ndarray) -> list[int]:
    return np.flatnonzero(central).tolist()


def _central_from_indices(indices: Sequence[int], m: int) -> np.ndarray:
    central = np.zeros(m, dtype=np.int8)
    central[list(indices)] = 1
    return central


def culture_to_dict(c: Culture) -> dict:
    if isinstance(c, ImpartialCulture):
        return {"kind": "ic", "p": c.p, "m": c.m}
    if isinstance(c, HammingNoise):
        return {"kind": "hamming", "phi": c.phi, "central": _central_to_indices(c.central), "m": c.m}
    if isinstance(c, Resampling):
        return {
            "kind": "resampling",
            "p": c.p,
            "phi": c.phi,
            "central": _central_to_indices(c.central),
            "m": c.m,
        }
    if isinstance(c, GroupedIam):
        return {"kind": "tiam", "group_of": c.group_of.tolist(), "probs": c.probs.tolist()}
    if isinstance(c, FullIam):
        return {"kind": "fulliam", "probs": c.probs.tolist()}
    if isinstance(c, Mixture):
        return {
            "kind": "mixture",
            "weights": c.weights.tolist(),
            "components": [culture_to_dict(x) for x in c.components],
        }
    raise TypeError(f"unknown culture {type(c).__name__}")


def culture_from_dict(data: dict) -> Culture:
    kind = data.get("kind")
    if kind == "ic":
        return ImpartialCulture(data["p"], data["m"])
    if kind == "hamming":
        return HammingNoise(data["phi"], _central_from_indices(data["central"], data["m"]))
    if kind == "resampling":
        return Resampling(
            data["p"], data["phi"], _central_from_indices(data["central"], data["m"])
        )
    if kind == "tiam":
        return GroupedIam(data["group_of"], data["probs"])
    if kind == "fulliam":
        return FullIam(data["probs"])
    if kind == "mixture":
        return Mixture(data["weights"], tuple(culture_from_dict(x) for x in data["components"]))
    raise ValueError(f"unknown culture kind {kind!r}")


def culture_to_json(c: Culture) -> str:
    return json.dumps(culture_to_dict(c))


def culture_from_json(text: str) -> Culture:
    return culture_from_dict(json.loads(text))
