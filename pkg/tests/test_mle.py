import numpy as np
import pytest

from approvalmix import (
    Election,
    FullIam,
    GroupedIam,
    HammingNoise,
    ImpartialCulture,
    brute_force_t_iam,
    fit_full_iam,
    fit_hamming,
    fit_ic,
    fit_t_iam,
    log_prob_election,
)
from approvalmix.errors import BadArity, EmptyElection, TooLarge
from approvalmix.mle import _set_partitions

from conftest import random_election


class TestClosedForms:
    def test_ic_on_fixture(self, e0):
        report = fit_ic(e0)
        assert report.model.p == 0.5
        assert report.train_log_likelihood == pytest.approx(
            log_prob_election(report.model, e0), abs=1e-12
        )

    def test_ic_saturated(self):
        assert fit_ic(Election(["a", "b"], [[1, 1], [1, 1]])).model.p == 1.0
        assert fit_ic(Election(["a", "b"], [[0, 0], [0, 0]])).model.p == 0.0

    def test_full_iam_on_fixture(self, e0):
        assert fit_full_iam(e0).model.probs.tolist() == [0.75, 0.25]

    def test_full_iam_degenerate(self):
        assert fit_full_iam(Election(["a", "b"], [[1, 1]])).model.probs.tolist() == [1, 1]
        assert fit_full_iam(Election(["a"], [[1], [0]])).model.probs.tolist() == [0.5]

    def test_hamming_on_fixture(self, e0):
        model = fit_hamming(e0).model
        assert model.central.tolist() == [1, 0]
        assert model.phi == pytest.approx(1 / 3, abs=1e-15)

    def test_hamming_identical_votes(self):
        e = Election(["a", "b", "c"], [[1, 0, 1]] * 5)
        model = fit_hamming(e).model
        assert model.central.tolist() == [1, 0, 1] and model.phi == 0.0

    def test_hamming_tie_counts_as_approved(self):
        e = Election(["a"], [[1], [0]])
        model = fit_hamming(e).model
        assert model.central.tolist() == [1]
        assert model.phi == pytest.approx(1.0)

    def test_empty_election_rejected(self):
        empty = Election(["a"], np.zeros((0, 1)))
        for fit in (fit_ic, fit_full_iam, fit_hamming):
            with pytest.raises(EmptyElection):
                fit(empty)


class TestGroupedFit:
    def test_two_groups_on_fixture(self, e0):
        model = fit_t_iam(e0, 2).model
        assert model.group_of.tolist() == [0, 1]
        assert model.probs.tolist() == [0.75, 0.25]

    def test_one_group_equals_ic(self):
        rng = np.random.default_rng(0)
        for _ in range(10):
            e = random_election(rng, int(rng.integers(1, 8)), int(rng.integers(1, 30)))
            assert fit_t_iam(e, 1).train_log_likelihood == pytest.approx(
                fit_ic(e).train_log_likelihood, abs=1e-12
            )

    def test_full_arity_equals_per_candidate_fit(self):
        rng = np.random.default_rng(1)
        for _ in range(10):
            e = random_election(rng, int(rng.integers(1, 8)), int(rng.integers(1, 30)))
            grouped = fit_t_iam(e, e.m).model
            per_candidate = fit_full_iam(e).model
            assert grouped.entry_probs().tolist() == pytest.approx(
                per_candidate.probs.tolist(), abs=1e-12
            )

    def test_arity_bounds(self, e0):
        with pytest.raises(BadArity):
            fit_t_iam(e0, 0)
        with pytest.raises(BadArity):
            fit_t_iam(e0, 3)

    def test_contiguous_in_score_order(self):
        rng = np.random.default_rng(2)
        for _ in range(20):
            e = random_election(rng, int(rng.integers(3, 11)), int(rng.integers(5, 40)))
            t = int(rng.integers(2, e.m + 1))
            model = fit_t_iam(e, t).model
            order = np.argsort(-e.scores, kind="stable")
            along_order = model.group_of[order]
            assert np.all(np.diff(along_order) >= 0)

    def test_nesting_monotonic_in_t(self):
        rng = np.random.default_rng(3)
        for _ in range(8):
            e = random_election(rng, int(rng.integers(2, 10)), int(rng.integers(5, 40)))
            lls = [fit_t_iam(e, t).train_log_likelihood for t in range(1, e.m + 1)]
            assert np.all(np.diff(lls) >= -1e-9)


class TestBruteForceOracle:
    def test_partition_counts(self):
        # Stirling numbers of the second kind
        assert sum(1 for _ in _set_partitions(4, 2)) == 7
        assert sum(1 for _ in _set_partitions(5, 3)) == 25
        assert sum(1 for _ in _set_partitions(6, 1)) == 1

    def test_matches_dynamic_program(self, e0):
        assert brute_force_t_iam(e0, 2).train_log_likelihood == pytest.approx(
            fit_t_iam(e0, 2).train_log_likelihood, abs=1e-12
        )

    def test_one_group_equals_ic(self, e0):
        assert brute_force_t_iam(e0, 1).train_log_likelihood == pytest.approx(
            fit_ic(e0).train_log_likelihood, abs=1e-12
        )

    def test_oracle_sweep_small_elections(self):
        # 5 candidates, 10 voters, both arities, many seeds
        for seed in range(100):
            rng = np.random.default_rng(seed)
            e = random_election(rng, 5, 10)
            for t in (2, 3):
                dp = fit_t_iam(e, t).train_log_likelihood
                oracle = brute_force_t_iam(e, t).train_log_likelihood
                assert dp == pytest.approx(oracle, abs=1e-9)

    def test_size_limit(self):
        e = random_election(np.random.default_rng(4), 11, 5)
        with pytest.raises(TooLarge):
            brute_force_t_iam(e, 2)


def _perturbed_log_liks(model, e, delta=1e-3):
    """Log-likelihoods after nudging each parameter by +-delta (clamped)."""
    results = []
    if isinstance(model, ImpartialCulture):
        for sign in (-1, 1):
            p = float(np.clip(model.p + sign * delta, 0, 1))
            results.append(log_prob_election(ImpartialCulture(p, model.m), e))
    elif isinstance(model, FullIam):
        for j in range(model.m):
            for sign in (-1, 1):
                probs = model.probs.copy()
                probs[j] = np.clip(probs[j] + sign * delta, 0, 1)
                results.append(log_prob_election(FullIam(probs), e))
    elif isinstance(model, HammingNoise):
        for sign in (-1, 1):
            phi = float(np.clip(model.phi + sign * delta, 0, 1))
            results.append(log_prob_election(HammingNoise(phi, model.central), e))
    elif isinstance(model, GroupedIam):
        for g in range(model.t):
            for sign in (-1, 1):
                probs = model.probs.copy()
                probs[g] = np.clip(probs[g] + sign * delta, 0, 1)
                results.append(log_prob_election(GroupedIam(model.group_of, probs), e))
    return results


class TestLocalOptimality:
    def test_single_parameter_perturbations_never_improve(self):
        rng = np.random.default_rng(5)
        for _ in range(10):
            e = random_election(rng, int(rng.integers(2, 7)), int(rng.integers(3, 25)))
            for report in (fit_ic(e), fit_full_iam(e), fit_hamming(e), fit_t_iam(e, 2)):
                base = report.train_log_likelihood
                for perturbed in _perturbed_log_liks(report.model, e):
                    assert perturbed <= base + 1e-12

    def test_hamming_dispersion_never_exceeds_one(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            e = random_election(rng, int(rng.integers(1, 10)), int(rng.integers(1, 40)))
            assert fit_hamming(e).model.phi <= 1.0
