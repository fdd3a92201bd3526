import json

import numpy as np
import pytest

from approvalmix import (
    Election,
    FullIam,
    Mixture,
    PosteriorChain,
    chain_to_jsonl,
    culture_from_json,
    gibbs_fit,
    posterior_mean,
)
from approvalmix.bayes import DEFAULT_BURN_IN, DEFAULT_TOTAL_SAMPLES
from approvalmix.errors import BadConfig, EmptyChain

from conftest import random_election


class TestProtocolDefaults:
    def test_reference_sampling_protocol(self):
        assert DEFAULT_TOTAL_SAMPLES == 2000
        assert DEFAULT_BURN_IN == 1000

    def test_bad_config(self, e0):
        with pytest.raises(BadConfig):
            gibbs_fit(e0, 1, "fulliam", 100, 100, np.random.default_rng(0))
        with pytest.raises(BadConfig):
            gibbs_fit(e0, 0, "fulliam", 100, 50, np.random.default_rng(0))
        with pytest.raises(ValueError):
            gibbs_fit(e0, 1, "ic", 100, 50, np.random.default_rng(0))


class TestConjugateCase:
    def test_posterior_means_match_beta_analytics(self, e0):
        # scores (3, 1) over 4 voters: Beta(4, 2) and Beta(2, 4) posteriors
        for seed in range(3):
            chain = gibbs_fit(e0, 1, "fulliam", 2000, 1000, np.random.default_rng(seed))
            mean = posterior_mean(chain)
            probs = mean.components[0].probs
            assert probs[0] == pytest.approx(4 / 6, abs=0.02)
            assert probs[1] == pytest.approx(2 / 6, abs=0.02)

    def test_prior_recovery_on_empty_election(self):
        empty = Election(["a", "b"], np.zeros((0, 2)))
        chain = gibbs_fit(empty, 1, "fulliam", 2000, 1000, np.random.default_rng(11))
        draws = np.array([s.components[0].probs for s in chain.retained])
        assert draws.mean() == pytest.approx(0.5, abs=0.05)
        assert draws.var() == pytest.approx(1 / 12, abs=0.02)


class TestHammingFamily:
    def test_concentrates_on_repeated_vote(self):
        vote = [1, 0, 1, 0, 0]
        e = Election(list("abcde"), [vote] * 200)
        chain = gibbs_fit(e, 1, "hamming", 600, 300, np.random.default_rng(1))
        mean = posterior_mean(chain)
        assert mean.components[0].central.tolist() == vote
        assert mean.components[0].phi < 0.1


class TestResamplingFamily:
    def test_recovers_planted_central_vote(self):
        rng = np.random.default_rng(2)
        from approvalmix import Resampling, sample_election

        truth = Resampling(p=0.3, phi=0.4, central=np.array([1, 1, 0, 0, 0], dtype=np.int8))
        e = sample_election(truth, 400, rng)
        chain = gibbs_fit(e, 1, "resampling", 800, 400, np.random.default_rng(3))
        mean = posterior_mean(chain)
        comp = mean.components[0]
        assert comp.central.tolist() == truth.central.tolist()
        assert comp.phi == pytest.approx(0.4, abs=0.15)


class TestChainStructure:
    def test_sample_count_and_label_order(self):
        rng = np.random.default_rng(4)
        e = random_election(rng, 4, 60)
        chain = gibbs_fit(e, 3, "fulliam", 80, 40, np.random.default_rng(5))
        assert len(chain.samples) == 80
        assert len(chain.retained) == 40
        for state in chain.samples:
            assert np.all(np.diff(state.weights) <= 1e-15)

    def test_fixed_seed_gives_identical_chain(self):
        e = random_election(np.random.default_rng(6), 3, 40)
        dumps = []
        for _ in range(2):
            chain = gibbs_fit(e, 2, "resampling", 50, 20, np.random.default_rng(42))
            dumps.append(chain_to_jsonl(chain))
        assert dumps[0] == dumps[1]

    def test_jsonl_dump_round_trips(self):
        e = random_election(np.random.default_rng(7), 3, 30)
        chain = gibbs_fit(e, 2, "hamming", 30, 10, np.random.default_rng(8))
        lines = chain_to_jsonl(chain).strip().split("\n")
        assert len(lines) == 20
        for line in lines:
            state = culture_from_json(line)
            assert isinstance(state, Mixture) and state.k == 2
            assert json.loads(line)["kind"] == "mixture"


class TestPosteriorMean:
    def _chain_of(self, states, family="fulliam", k=2):
        return PosteriorChain(tuple(states), 0, family, k)

    def test_mean_of_constant_chain_is_that_state(self):
        state = Mixture([0.7, 0.3], (FullIam([0.2, 0.9]), FullIam([0.5, 0.5])))
        mean = posterior_mean(self._chain_of([state, state, state]))
        assert mean.weights.tolist() == pytest.approx([0.7, 0.3], abs=1e-12)
        assert mean.components[0].probs.tolist() == pytest.approx([0.2, 0.9], abs=1e-12)

    def test_weights_average(self):
        a = Mixture([0.6, 0.4], (FullIam([0.1]), FullIam([0.2])))
        b = Mixture([0.8, 0.2], (FullIam([0.3]), FullIam([0.4])))
        mean = posterior_mean(self._chain_of([a, b]))
        assert mean.weights.tolist() == pytest.approx([0.7, 0.3])
        assert mean.components[0].probs.tolist() == pytest.approx([0.2])

    def test_central_bits_by_majority_with_ties_approved(self):
        from approvalmix import HammingNoise

        states = [
            Mixture([1.0], (HammingNoise(0.2, [1, 1, 0]),)),
            Mixture([1.0], (HammingNoise(0.4, [1, 0, 0]),)),
        ]
        mean = posterior_mean(self._chain_of(states, family="hamming", k=1))
        assert mean.components[0].central.tolist() == [1, 1, 0]  # tie on bit 2 -> approved
        assert mean.components[0].phi == pytest.approx(0.3)

    def test_empty_chain(self):
        chain = PosteriorChain((), 0, "fulliam", 1)
        with pytest.raises(EmptyChain):
            posterior_mean(chain)
