import numpy as np
import pytest

from approvalmix import Election


@pytest.fixture
def e0() -> Election:
    """Two candidates a, b; ballots {a,b}, {a}, {a}, {}; scores (3, 1)."""
    return Election(["a", "b"], [[1, 1], [1, 0], [1, 0], [0, 0]])


def random_election(rng: np.random.Generator, m: int, n: int) -> Election:
    """Election with per-candidate approval rates spread over (0, 1)."""
    rates = rng.uniform(0.05, 0.95, size=m)
    ballots = (rng.random((n, m)) < rates).astype(np.int8)
    return Election([f"c{j}" for j in range(m)], ballots)


def all_votes(m: int) -> np.ndarray:
    """All 2^m approval ballots as a (2^m, m) 0/1 matrix."""
    return ((np.arange(2**m)[:, None] >> np.arange(m)) & 1).astype(np.int8)


def pb_text(e: Election) -> str:
    """Render an election in the Pabulib ballot format."""
    lines = ["META", "key;value", "description;synthetic fixture", "PROJECTS", "project_id;cost"]
    for cand in e.candidates:
        lines.append(f"{cand.external_id};1000")
    lines += ["VOTES", "voter_id;vote"]
    for i, approved in enumerate(e.approval_sets()):
        joined = ",".join(e.candidates[j].external_id for j in approved)
        lines.append(f"{i};{joined}")
    return "\n".join(lines) + "\n"
