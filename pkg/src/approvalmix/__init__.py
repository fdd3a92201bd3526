"""approvalmix: learn, sample and evaluate models of approval elections.

The package covers the full loop: parse real participatory-budgeting
ballots, fit single models (closed forms and a dynamic program over
probability groups) or mixtures (EM and Gibbs sampling), draw synthetic
elections from any fitted model, and compare elections to models with
assignment-based distances.
"""

from .bayes import PosteriorChain, chain_to_jsonl, gibbs_fit, posterior_mean
from .cultures import (
    Culture,
    FullIam,
    GroupedIam,
    HammingNoise,
    ImpartialCulture,
    Mixture,
    Resampling,
    clamp_probabilities,
    culture_from_dict,
    culture_from_json,
    culture_to_dict,
    culture_to_json,
    hamming_to_2iam,
    resampling_to_2iam,
    sample_election,
    twoiam_to_resampling,
)
from .elections import (
    Candidate,
    Election,
    approval_fraction,
    restrict,
    sample_disjoint_pair,
    split_learn_eval,
)
from .em import EmTrace, SoftAssignment, e_step, em_fit, m_step
from .harness import (
    ExperimentConfig,
    ReportRow,
    load_config,
    pearson,
    rows_to_csv,
    run_experiment,
    run_instance,
    t_sweep,
)
from .likelihood import log_prob_election, log_prob_vote, log_prob_votes
from .metrics import DistanceReport, absolute_distance, baseline, hamming, va_ham
from .mle import FitReport, brute_force_t_iam, fit_full_iam, fit_hamming, fit_ic, fit_t_iam
from .pabulib import parse_pabulib

__version__ = "0.1.0"
