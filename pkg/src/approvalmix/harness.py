"""End-to-end experiment pipeline over directories of ballot files.

For each eligible election the pipeline repeats ``t_try`` times: split
off an evaluation election, fit every algorithm in the grid on the
learning part, and score each fitted model by evaluation log-likelihood
(raw and with a clamping guard), absolute distance, and distance
relative to the election's baseline diversity. Rows come out in a fixed
order and all randomness derives from one master seed, so a rerun
produces identical output.

Seeding scheme
--------------
Stream ``s`` of repetition ``r`` on instance ``i`` uses
``numpy.random.default_rng([master_seed, i, r, s])`` with

* s = 0: learn/eval split,
* s = 1: baseline sub-election pairs,
* s = 2*a + 2: fitting algorithm a,
* s = 2*a + 3: sampling for algorithm a's absolute distance.

Instances are indexed by sorted file name; ``t_sweep`` reuses the same
streams with the grouped-model parameter count as the algorithm index.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import sys
import time
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from .bayes import DEFAULT_BURN_IN, DEFAULT_TOTAL_SAMPLES, gibbs_fit, posterior_mean
from .cultures import Culture, clamp_probabilities, twoiam_to_resampling
from .elections import Election, split_learn_eval
from .em import em_fit
from .errors import BadConfig, DegenerateInput, TooFewVoters
from .likelihood import log_prob_election
from .metrics import DEFAULT_BASELINE_PAIRS, absolute_distance, baseline
from .mle import fit_full_iam, fit_hamming, fit_ic, fit_t_iam
from .pabulib import parse_pabulib

__all__ = [
    "ExperimentConfig",
    "ReportRow",
    "CSV_COLUMNS",
    "run_instance",
    "t_sweep",
    "run_experiment",
    "rows_to_csv",
    "pearson",
    "load_config",
]

log = logging.getLogger(__name__)

# Single-model learners plus the mixture grid used in the reference
# protocol: Bayesian mixtures of 2-4 Hamming / resampling / per-candidate
# components and EM mixtures of 2-4 per-candidate components.
DEFAULT_GRID = (
    "mle:ic",
    "mle:hamming",
    "mle:resampling",
    "mle:fulliam",
    *(f"bayes:mix:{fam}:{k}" for fam in ("hamming", "resampling", "fulliam") for k in (2, 3, 4)),
    *(f"em:mix:fulliam:{k}" for k in (2, 3, 4)),
)


@dataclass(frozen=True)
class ExperimentConfig:
    """Protocol parameters; the defaults follow the reference setup."""

    n_eval: int = 1000
    n_sample_cap: int = 20000
    t_try: int = 5
    baseline_pairs: int = DEFAULT_BASELINE_PAIRS
    algorithms: tuple[str, ...] = DEFAULT_GRID
    master_seed: int = 0
    em_restarts: int = 5
    em_max_iter: int = 300
    em_tol: float = 1e-6
    bayes_samples: int = DEFAULT_TOTAL_SAMPLES
    bayes_burn_in: int = DEFAULT_BURN_IN

    def __post_init__(self):
        if self.t_try < 1:
            raise BadConfig("t_try must be at least 1")
        if self.n_eval < 1:
            raise BadConfig("n_eval must be at least 1")


@dataclass(frozen=True)
class ReportRow:
    """One fitted model's scores on one repetition of one instance."""

    instance: str
    algorithm: str
    run: int
    train_ll: float
    eval_ll: float
    eval_ll_raw: float
    absolute: float
    baseline: float
    relative: float | None
    wall_time: float


CSV_COLUMNS = (
    "instance",
    "algorithm",
    "run",
    "train_ll",
    "eval_ll",
    "eval_ll_raw",
    "absolute",
    "baseline",
    "relative",
)


def _stream(cfg: ExperimentConfig, instance_index: int, rep: int, stream: int):
    return np.random.default_rng([cfg.master_seed, instance_index, rep, stream])


def _parse_model_spec(spec: str) -> tuple:
    parts = spec.split(":")
    if parts[0] in ("ic", "hamming", "resampling", "fulliam") and len(parts) == 1:
        return (parts[0],)
    if parts[0] == "tiam" and len(parts) == 2:
        return ("tiam", int(parts[1]))
    if parts[0] == "mix" and len(parts) == 3:
        return ("mix", parts[1], int(parts[2]))
    raise BadConfig(f"cannot parse model spec {spec!r}")


def fit_algorithm(
    algorithm: str, learn: Election, rng: np.random.Generator, cfg: ExperimentConfig
) -> tuple[Culture, float]:
    """Fit one grid entry; returns the model and its training log-likelihood."""
    estimator, _, model_spec = algorithm.partition(":")
    spec = _parse_model_spec(model_spec)

    if estimator == "mle":
        if spec[0] == "ic":
            report = fit_ic(learn)
        elif spec[0] == "hamming":
            report = fit_hamming(learn)
        elif spec[0] == "fulliam":
            report = fit_full_iam(learn)
        elif spec[0] == "resampling":
            if learn.m < 2:
                report = fit_ic(learn)  # one candidate: resampling reduces to IC
            else:
                fitted = fit_t_iam(learn, 2)
                model = twoiam_to_resampling(fitted.model)
                return model, log_prob_election(model, learn)
        elif spec[0] == "tiam":
            report = fit_t_iam(learn, spec[1])
        else:
            raise BadConfig(f"estimator mle cannot fit {model_spec!r}")
        return report.model, report.train_log_likelihood

    if spec[0] != "mix":
        raise BadConfig(f"estimator {estimator!r} needs a mix:<family>:<K> model")
    _, family, k = spec
    if estimator == "em":
        report, _ = em_fit(
            learn, k, family, cfg.em_restarts, cfg.em_max_iter, cfg.em_tol, rng
        )
        return report.model, report.train_log_likelihood
    if estimator == "bayes":
        chain = gibbs_fit(learn, k, family, cfg.bayes_samples, cfg.bayes_burn_in, rng)
        model = posterior_mean(chain)
        return model, log_prob_election(model, learn)
    raise BadConfig(f"unknown estimator {estimator!r}")


def _score_model(
    model: Culture,
    train_ll: float,
    e_eval: Election,
    base: float,
    dist_rng: np.random.Generator,
    instance: str,
    algorithm: str,
    run: int,
    started: float,
) -> ReportRow:
    eval_ll = log_prob_election(clamp_probabilities(model), e_eval)
    eval_ll_raw = log_prob_election(model, e_eval)
    absolute = absolute_distance(model, e_eval, dist_rng)
    relative = absolute / base if base > 0 else None
    return ReportRow(
        instance=instance,
        algorithm=algorithm,
        run=run,
        train_ll=train_ll,
        eval_ll=eval_ll,
        eval_ll_raw=eval_ll_raw,
        absolute=absolute,
        baseline=base,
        relative=relative,
        wall_time=time.perf_counter() - started,
    )


def _check_eligible(e: Election, cfg: ExperimentConfig, instance: str) -> None:
    needed = max(cfg.n_eval + 1, 2 * cfg.n_eval)
    if e.n < needed:
        raise TooFewVoters(f"instance {instance}: n={e.n} < required {needed}")


def run_instance(
    e: Election,
    cfg: ExperimentConfig,
    instance: str = "instance",
    instance_index: int = 0,
) -> list[ReportRow]:
    """All grid algorithms on one instance, ``t_try`` repetitions each.

    The baseline is recomputed under each repetition's seed stream; the
    per-instance mean is logged for convenience.
    """
    _check_eligible(e, cfg, instance)
    rows: list[ReportRow] = []
    baselines = []
    for rep in range(cfg.t_try):
        learn, e_eval = split_learn_eval(
            e, cfg.n_eval, cfg.n_sample_cap, _stream(cfg, instance_index, rep, 0)
        )
        base = baseline(e, cfg.n_eval, cfg.baseline_pairs, _stream(cfg, instance_index, rep, 1))
        baselines.append(base)
        for a_idx, algorithm in enumerate(cfg.algorithms):
            started = time.perf_counter()
            model, train_ll = fit_algorithm(
                algorithm, learn, _stream(cfg, instance_index, rep, 2 * a_idx + 2), cfg
            )
            rows.append(
                _score_model(
                    model, train_ll, e_eval, base,
                    _stream(cfg, instance_index, rep, 2 * a_idx + 3),
                    instance, algorithm, rep, started,
                )
            )
    log.info("instance %s: mean baseline %.6f over %d repetitions",
             instance, float(np.mean(baselines)), cfg.t_try)
    _log_variance_sanity(rows, cfg, instance)
    return rows


def _log_variance_sanity(rows: list[ReportRow], cfg: ExperimentConfig, instance: str) -> None:
    """Per-algorithm variance of each finite metric across repetitions.

    Only sanity: the variance must be finite; its size relative to the
    squared mean is logged, not asserted.
    """
    for algorithm in cfg.algorithms:
        values = [r for r in rows if r.algorithm == algorithm]
        for metric in ("train_ll", "eval_ll", "absolute"):
            samples = np.array([getattr(r, metric) for r in values])
            variance = float(samples.var())
            if not np.isfinite(variance):
                raise AssertionError(
                    f"instance {instance}, {algorithm}: non-finite {metric} variance"
                )
            mean = float(samples.mean())
            ratio = variance / (mean * mean) if mean != 0.0 else float("inf")
            log.debug(
                "instance %s, %s: %s variance %.3e (var/mean^2 %.3e)",
                instance, algorithm, metric, variance, ratio,
            )


def t_sweep(
    e: Election,
    cfg: ExperimentConfig,
    instance: str = "instance",
    instance_index: int = 0,
) -> list[ReportRow]:
    """Grouped-model fits for every parameter count t in [1, m].

    Emits the data behind an absolute-distance-versus-t curve:
    m * t_try rows with algorithm ids ``mle:tiam:<t>``.
    """
    _check_eligible(e, cfg, instance)
    rows: list[ReportRow] = []
    for rep in range(cfg.t_try):
        learn, e_eval = split_learn_eval(
            e, cfg.n_eval, cfg.n_sample_cap, _stream(cfg, instance_index, rep, 0)
        )
        base = baseline(e, cfg.n_eval, cfg.baseline_pairs, _stream(cfg, instance_index, rep, 1))
        for t in range(1, e.m + 1):
            started = time.perf_counter()
            report = fit_t_iam(learn, t)
            rows.append(
                _score_model(
                    report.model, report.train_log_likelihood, e_eval, base,
                    _stream(cfg, instance_index, rep, 2 * t + 3),
                    instance, f"mle:tiam:{t}", rep, started,
                )
            )
    return rows


def run_experiment(directory: str | Path, cfg: ExperimentConfig) -> list[ReportRow]:
    """Run the grid over every ``.pb`` file in a directory (sorted order).

    Instances with too few voters are skipped with a logged reason.
    """
    directory = Path(directory)
    paths = sorted(directory.glob("*.pb"))
    rows: list[ReportRow] = []
    for index, path in enumerate(paths):
        e = parse_pabulib(path.read_text(encoding="utf-8"))
        try:
            rows.extend(run_instance(e, cfg, path.stem, index))
        except TooFewVoters as err:
            log.warning("skipping %s: %s", path.name, err)
    return rows


def rows_to_csv(rows: list[ReportRow], include_timings: bool = False) -> str:
    """Render rows as CSV ('.' decimals, LF line endings, header row).

    Floats use Python's shortest round-trip repr; an undefined relative
    distance becomes an empty cell. Wall times are nondeterministic, so
    the column is opt-in to keep default output byte-reproducible.
    """
    columns = CSV_COLUMNS + (("wall_time",) if include_timings else ())
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        record = []
        for col in columns:
            value = getattr(row, col)
            record.append("" if value is None else (repr(value) if isinstance(value, float) else value))
        writer.writerow(record)
    return out.getvalue()


def pearson(xs, ys) -> float:
    """Sample Pearson correlation coefficient of two equal-length sequences."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if xs.shape != ys.shape or xs.ndim != 1 or xs.size < 2:
        raise DegenerateInput("need two equal-length sequences of at least 2 values")
    dx = xs - xs.mean()
    dy = ys - ys.mean()
    sxx = float((dx * dx).sum())
    syy = float((dy * dy).sum())
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInput("zero variance")
    return float(np.clip((dx * dy).sum() / np.sqrt(sxx * syy), -1.0, 1.0))


def load_config(path: str | Path) -> ExperimentConfig:
    """Read an ExperimentConfig from a TOML or JSON file.

    The format is chosen by extension (``.toml`` vs anything else =
    JSON). Keys must match ExperimentConfig field names; unknown keys
    are rejected.
    """
    path = Path(path)
    raw = path.read_bytes()
    if path.suffix.lower() == ".toml":
        if sys.version_info >= (3, 11):
            import tomllib
        else:
            import tomli as tomllib
        data = tomllib.loads(raw.decode("utf-8"))
    else:
        data = json.loads(raw.decode("utf-8"))
    known = {f.name for f in fields(ExperimentConfig)}
    unknown = set(data) - known
    if unknown:
        raise BadConfig(f"unknown config keys: {sorted(unknown)}")
    if "algorithms" in data:
        data["algorithms"] = tuple(data["algorithms"])
    return ExperimentConfig(**data)
