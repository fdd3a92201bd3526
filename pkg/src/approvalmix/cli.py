"""Command line interface.

Subcommands::

    parse <file>                          ballot file -> election JSON
    learn --model M --estimator E <file>  fit a model, JSON to stdout
    sample --model M.json --n N           draw an election from a model
    loglik --model M.json <file>          log-likelihood of an election
    distance --model M.json --eval <file> absolute distance to a model
    baseline <file> --n-eval N            internal diversity of an election
    experiment --dir D --config C --out O full pipeline -> CSV
    tsweep <file> --out O                 grouped-model sweep -> CSV
    stats --x COL --y COL <csv>           Pearson correlation of two columns

Model specs for ``learn``: ``ic``, ``hamming``, ``resampling``,
``tiam:<t>``, ``fulliam``, or ``mix:<family>:<K>`` with estimator ``em``
or ``bayes``. Election files ending in ``.json`` are read as the
internal JSON dump, anything else as Pabulib text.
"""

from __future__ import annotations

import argparse
import csv
import logging
import sys
from pathlib import Path

import numpy as np

from .bayes import chain_to_jsonl, gibbs_fit, posterior_mean
from .cultures import culture_from_json, culture_to_json, sample_election
from .elections import Election
from .harness import (
    ExperimentConfig,
    fit_algorithm,
    load_config,
    pearson,
    rows_to_csv,
    run_experiment,
    t_sweep,
)
from .likelihood import log_prob_election
from .metrics import absolute_distance, baseline
from .pabulib import parse_pabulib


def _read_election(path: str) -> Election:
    text = Path(path).read_text(encoding="utf-8")
    if path.endswith(".json"):
        return Election.from_json(text)
    return parse_pabulib(text)


def _read_model(path: str):
    text = sys.stdin.read() if path == "-" else Path(path).read_text(encoding="utf-8")
    return culture_from_json(text)


def _cmd_parse(args) -> None:
    print(_read_election(args.file).to_json())


def _cmd_learn(args) -> None:
    e = _read_election(args.file)
    cfg = ExperimentConfig(
        n_eval=1,  # unused by fitting; keep validation happy
        em_restarts=args.restarts,
        em_max_iter=args.max_iter,
        em_tol=args.tol,
        bayes_samples=args.samples,
        bayes_burn_in=args.burn_in,
    )
    algorithm = f"{args.estimator}:{args.model}"
    rng = np.random.default_rng(args.seed)
    if args.chain_out and args.estimator == "bayes":
        _, family, k = args.model.split(":")
        chain = gibbs_fit(e, int(k), family, args.samples, args.burn_in, rng)
        Path(args.chain_out).write_text(chain_to_jsonl(chain), encoding="utf-8")
        model = posterior_mean(chain)
    else:
        model, _ = fit_algorithm(algorithm, e, rng, cfg)
    print(culture_to_json(model))


def _cmd_sample(args) -> None:
    model = _read_model(args.model)
    rng = np.random.default_rng(args.seed)
    print(sample_election(model, args.n, rng).to_json())


def _cmd_loglik(args) -> None:
    model = _read_model(args.model)
    print(repr(log_prob_election(model, _read_election(args.file))))


def _cmd_distance(args) -> None:
    model = _read_model(args.model)
    rng = np.random.default_rng(args.seed)
    print(repr(absolute_distance(model, _read_election(args.eval), rng)))


def _cmd_baseline(args) -> None:
    e = _read_election(args.file)
    rng = np.random.default_rng(args.seed)
    print(repr(baseline(e, args.n_eval, args.pairs, rng)))


def _cmd_experiment(args) -> None:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    rows = run_experiment(args.dir, cfg)
    Path(args.out).write_text(rows_to_csv(rows, include_timings=args.timings), encoding="utf-8")


def _cmd_tsweep(args) -> None:
    e = _read_election(args.file)
    cfg = ExperimentConfig(
        n_eval=args.n_eval,
        n_sample_cap=args.cap,
        t_try=args.t_try,
        master_seed=args.seed,
        algorithms=(),
    )
    rows = t_sweep(e, cfg, instance=Path(args.file).stem)
    Path(args.out).write_text(rows_to_csv(rows, include_timings=args.timings), encoding="utf-8")


def _cmd_stats(args) -> None:
    with open(args.file, newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        xs, ys = [], []
        for record in reader:
            if record[args.x] == "" or record[args.y] == "":
                continue
            xs.append(float(record[args.x]))
            ys.append(float(record[args.y]))
    print(repr(pearson(xs, ys)))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="approvalmix", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("parse", help="ballot file to election JSON")
    p.add_argument("file")
    p.set_defaults(func=_cmd_parse)

    p = sub.add_parser("learn", help="fit a model and print its JSON")
    p.add_argument("file")
    p.add_argument("--model", required=True)
    p.add_argument("--estimator", default="mle", choices=["mle", "em", "bayes"])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--restarts", type=int, default=5)
    p.add_argument("--max-iter", type=int, default=300)
    p.add_argument("--tol", type=float, default=1e-6)
    p.add_argument("--samples", type=int, default=2000)
    p.add_argument("--burn-in", type=int, default=1000)
    p.add_argument("--chain-out", help="also dump retained posterior samples (JSON lines)")
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("sample", help="draw an election from a model JSON")
    p.add_argument("--model", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_sample)

    p = sub.add_parser("loglik", help="log-likelihood of an election under a model")
    p.add_argument("file")
    p.add_argument("--model", required=True)
    p.set_defaults(func=_cmd_loglik)

    p = sub.add_parser("distance", help="absolute distance from a model to an election")
    p.add_argument("--model", required=True)
    p.add_argument("--eval", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_distance)

    p = sub.add_parser("baseline", help="internal diversity of an election")
    p.add_argument("file")
    p.add_argument("--n-eval", type=int, default=1000)
    p.add_argument("--pairs", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=_cmd_baseline)

    p = sub.add_parser("experiment", help="full pipeline over a directory of .pb files")
    p.add_argument("--dir", required=True)
    p.add_argument("--config", help="TOML or JSON ExperimentConfig")
    p.add_argument("--out", required=True)
    p.add_argument("--timings", action="store_true", help="include the wall_time column")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("tsweep", help="grouped-model sweep over t = 1..m")
    p.add_argument("file")
    p.add_argument("--out", required=True)
    p.add_argument("--n-eval", type=int, default=1000)
    p.add_argument("--cap", type=int, default=20000)
    p.add_argument("--t-try", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--timings", action="store_true")
    p.set_defaults(func=_cmd_tsweep)

    p = sub.add_parser("stats", help="Pearson correlation of two CSV columns")
    p.add_argument("file")
    p.add_argument("--x", required=True)
    p.add_argument("--y", required=True)
    p.set_defaults(func=_cmd_stats)

    return parser


def main(argv: list[str] | None = None) -> None:
    logging.basicConfig(level=logging.INFO, stream=sys.stderr, format="%(message)s")
    args = build_parser().parse_args(argv)
    args.func(args)


if __name__ == "__main__":
    main()
