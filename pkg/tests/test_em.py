import numpy as np
import pytest

from approvalmix import (
    Election,
    FullIam,
    Mixture,
    SoftAssignment,
    e_step,
    em_fit,
    fit_full_iam,
    fit_hamming,
    fit_ic,
    fit_t_iam,
    m_step,
    sample_election,
    twoiam_to_resampling,
)
from approvalmix.errors import EmptyComponent, EmptyElection

from conftest import random_election


def _hard_assignment(n: int, k: int, labels) -> SoftAssignment:
    resp = np.zeros((n, k))
    resp[np.arange(n), labels] = 1.0
    return SoftAssignment(resp, resp.sum(axis=0))


class TestEStep:
    def test_single_component(self, e0):
        mix = Mixture([1.0], (FullIam([0.7, 0.3]),))
        resp = e_step(e0, mix).resp
        assert np.all(resp == 1.0)

    def test_identical_components_split_evenly(self, e0):
        comp = FullIam([0.7, 0.3])
        mix = Mixture([0.5, 0.5], (comp, comp))
        resp = e_step(e0, mix).resp
        assert resp == pytest.approx(np.full((4, 2), 0.5), abs=1e-12)

    def test_impossible_component_gets_zero(self):
        e = Election(["a", "b"], [[1, 1]])
        mix = Mixture([0.5, 0.5], (FullIam([1.0, 1.0]), FullIam([0.0, 0.0])))
        assert e_step(e, mix).resp.tolist() == [[1.0, 0.0]]

    def test_vote_impossible_everywhere_gets_uniform_row(self):
        e = Election(["a", "b"], [[1, 0]])
        mix = Mixture([0.5, 0.5], (FullIam([1.0, 1.0]), FullIam([0.0, 0.0])))
        assert e_step(e, mix).resp.tolist() == [[0.5, 0.5]]

    def test_rows_sum_to_one(self):
        rng = np.random.default_rng(0)
        e = random_election(rng, 6, 50)
        mix = Mixture([0.3, 0.7], (FullIam(rng.random(6)), FullIam(rng.random(6))))
        assignment = e_step(e, mix)
        assert assignment.resp.sum(axis=1) == pytest.approx(np.ones(50), abs=1e-9)
        assert assignment.totals.sum() == pytest.approx(50, abs=1e-6)


class TestMStep:
    def test_single_component_full_iam_reduces_to_mle(self, e0):
        mix = m_step(e0, _hard_assignment(4, 1, [0, 0, 0, 0]), "fulliam")
        assert mix.weights.tolist() == [1.0]
        assert mix.components[0].probs.tolist() == fit_full_iam(e0).model.probs.tolist()

    def test_single_component_hamming_reduces_to_mle(self, e0):
        mix = m_step(e0, _hard_assignment(4, 1, [0, 0, 0, 0]), "hamming")
        comp = mix.components[0]
        assert comp.central.tolist() == [1, 0]
        assert comp.phi == pytest.approx(1 / 3, abs=1e-12)

    def test_single_component_ic_and_resampling_reduce_to_mle(self, e0):
        assignment = _hard_assignment(4, 1, [0, 0, 0, 0])
        assert m_step(e0, assignment, "ic").components[0].p == pytest.approx(0.5)
        comp = m_step(e0, assignment, "resampling").components[0]
        reference = twoiam_to_resampling(fit_t_iam(e0, 2).model)
        assert comp.p == pytest.approx(reference.p, abs=1e-12)
        assert comp.phi == pytest.approx(reference.phi, abs=1e-12)
        assert comp.central.tolist() == reference.central.tolist()

    def test_hard_split_fits_each_half(self):
        rng = np.random.default_rng(1)
        e = random_election(rng, 5, 40)
        labels = [0] * 20 + [1] * 20
        mix = m_step(e, _hard_assignment(40, 2, labels), "fulliam")
        assert mix.weights.tolist() == pytest.approx([0.5, 0.5])
        first = Election(e.candidate_ids(), e.ballots[:20])
        second = Election(e.candidate_ids(), e.ballots[20:])
        assert mix.components[0].probs.tolist() == pytest.approx(
            fit_full_iam(first).model.probs.tolist(), abs=1e-12
        )
        assert mix.components[1].probs.tolist() == pytest.approx(
            fit_full_iam(second).model.probs.tolist(), abs=1e-12
        )

    def test_empty_component_raises(self, e0):
        resp = np.zeros((4, 2))
        resp[:, 0] = 1.0
        with pytest.raises(EmptyComponent) as excinfo:
            m_step(e0, SoftAssignment(resp, resp.sum(axis=0)), "fulliam")
        assert excinfo.value.components == (1,)


class TestWeightedEqualsReplicated:
    """Fractional vote weights must act exactly like replicated votes."""

    @pytest.mark.parametrize("family", ["ic", "fulliam", "hamming", "resampling"])
    def test_quarter_weights(self, family):
        rng = np.random.default_rng(2)
        e = random_election(rng, 5, 12)
        quarters = rng.integers(1, 4, size=12)  # weights in {1/4, 2/4, 3/4}
        resp = np.column_stack([quarters / 4.0, 1.0 - quarters / 4.0])
        mix = m_step(e, SoftAssignment(resp, resp.sum(axis=0)), family)

        fits = {"ic": fit_ic, "fulliam": fit_full_iam, "hamming": fit_hamming}
        for k, weights in ((0, quarters), (1, 4 - quarters)):
            rows = np.repeat(e.ballots, weights, axis=0)
            induced = Election(e.candidate_ids(), rows)
            comp = mix.components[k]
            if family == "resampling":
                reference = twoiam_to_resampling(fit_t_iam(induced, 2).model)
                assert comp.p == pytest.approx(reference.p, abs=1e-9)
                assert comp.phi == pytest.approx(reference.phi, abs=1e-9)
                assert comp.central.tolist() == reference.central.tolist()
            else:
                reference = fits[family](induced).model
                if family == "ic":
                    assert comp.p == pytest.approx(reference.p, abs=1e-9)
                elif family == "fulliam":
                    assert comp.probs.tolist() == pytest.approx(
                        reference.probs.tolist(), abs=1e-9
                    )
                else:
                    assert comp.central.tolist() == reference.central.tolist()
                    assert comp.phi == pytest.approx(reference.phi, abs=1e-9)


class TestWeightOptimality:
    def test_returned_weights_maximize_weighted_log_mass(self):
        rng = np.random.default_rng(3)
        e = random_election(rng, 4, 30)
        mix0 = Mixture([0.5, 0.5], (FullIam(rng.random(4)), FullIam(rng.random(4))))
        assignment = e_step(e, mix0)
        mix = m_step(e, assignment, "fulliam")
        totals = assignment.totals

        def weighted_mass(alpha):
            return float((totals * np.log(alpha)).sum())

        base = weighted_mass(mix.weights)
        for _ in range(50):
            nudge = mix.weights + rng.uniform(-1e-3, 1e-3, size=2)
            nudge = np.clip(nudge, 1e-9, None)
            nudge /= nudge.sum()
            assert weighted_mass(nudge) <= base + 1e-12


class TestEmFit:
    def test_single_component_matches_closed_form(self, e0):
        report, trace = em_fit(
            e0, 1, "fulliam", n_restarts=1, max_iter=50, tol=1e-9,
            rng=np.random.default_rng(4),
        )
        assert report.train_log_likelihood == pytest.approx(
            fit_full_iam(e0).train_log_likelihood, abs=1e-9
        )
        assert trace.converged

    def test_trace_is_monotone(self):
        rng = np.random.default_rng(5)
        e = random_election(rng, 8, 120)
        _, trace = em_fit(e, 3, "fulliam", n_restarts=1, max_iter=60, tol=0.0, rng=rng)
        diffs = np.diff(trace.log_likelihoods)
        assert np.all(diffs >= -1e-7)

    def test_fixed_seed_gives_identical_trace(self):
        e = random_election(np.random.default_rng(6), 6, 80)
        runs = [
            em_fit(e, 2, "hamming", n_restarts=2, max_iter=40, tol=1e-8,
                   rng=np.random.default_rng(77))
            for _ in range(2)
        ]
        assert runs[0][1] == runs[1][1]
        assert runs[0][0].train_log_likelihood == runs[1][0].train_log_likelihood

    def test_components_sorted_by_weight(self):
        rng = np.random.default_rng(7)
        e = random_election(rng, 5, 60)
        report, _ = em_fit(e, 3, "fulliam", n_restarts=2, max_iter=40, tol=1e-8, rng=rng)
        weights = report.model.weights
        assert np.all(np.diff(weights) <= 1e-15)

    def test_planted_two_component_recovery(self):
        rng = np.random.default_rng(8)
        truth = Mixture(
            [0.5, 0.5],
            (FullIam([0.9] * 5 + [0.1] * 5), FullIam([0.1] * 5 + [0.9] * 5)),
        )
        e = sample_election(truth, 3000, rng)
        report, _ = em_fit(e, 2, "fulliam", n_restarts=3, max_iter=200, tol=1e-7, rng=rng)
        assert report.model.weights.tolist() == pytest.approx([0.5, 0.5], abs=0.05)
        first = report.model.components[0].probs
        options = [truth.components[0].probs, truth.components[1].probs]
        assert min(np.abs(first - opt).max() for opt in options) < 0.05

    def test_requires_enough_voters(self):
        e = Election(["a"], [[1]])
        with pytest.raises(EmptyElection):
            em_fit(e, 2, "fulliam", rng=np.random.default_rng(9))
