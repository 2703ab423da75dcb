"""Command-line entry points: serve the API, run experiments, build corpora."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np


def _cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .roguelike import load_corpus
    from .service import ServiceConfig, create_app

    corpus = load_corpus(args.corpus) if args.corpus else None
    config = ServiceConfig(
        policies=tuple(p.strip() for p in args.policies.split(",") if p.strip()),
        seed=args.seed,
        log_path=args.log,
        corpus=corpus,
    )
    uvicorn.run(create_app(config), host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    from .engine import roguelike_domain, sudoku_domain
    from .harness import (
        fit_population_model,
        parse_config,
        population_curve_csv,
        records_to_jsonl,
        report_to_csv,
        run_experiment,
    )
    from .roguelike import build_corpus

    config = parse_config(Path(args.config).read_text())
    corpus = None
    if config.domain == "roguelike":
        corpus = build_corpus(rng=np.random.default_rng(config.corpus_seed))
    report = run_experiment(config, corpus=corpus)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "mae_report.csv").write_text(report_to_csv(report))
    (out / "playtraces.jsonl").write_text(records_to_jsonl(report.records))

    domain = sudoku_domain() if config.domain == "sudoku" else roguelike_domain(corpus)
    from .harness import filter_outliers

    kept = filter_outliers(list(report.records), config.domain)
    model = fit_population_model(
        kept, domain.prior, domain.base_kernel, domain.space,
        rng=np.random.default_rng(config.seed), maxfev=200,
    )
    (out / "population_model.csv").write_text(population_curve_csv(model, domain.space))
    print(f"wrote mae_report.csv, playtraces.jsonl, population_model.csv to {out}")
    return 0


def _cmd_corpus(args: argparse.Namespace) -> int:
    from .roguelike import build_corpus, save_corpus

    corpus = build_corpus(n=args.size, rng=np.random.default_rng(args.seed))
    save_corpus(corpus, args.out)
    print(f"wrote {len(corpus.levels)} levels to {args.out}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="goaltime",
        description="Serve and evaluate goal-time content adaptation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    serve = sub.add_parser("serve", help="run the HTTP session service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--policies", default="bayes,binary,linreg,random")
    serve.add_argument("--corpus", default=None, help="level corpus JSON file")
    serve.add_argument("--log", default=None, help="append-only playtrace JSONL")
    serve.add_argument("--seed", type=int, default=0)
    serve.set_defaults(func=_cmd_serve)

    experiment = sub.add_parser("experiment", help="run a batch policy comparison")
    experiment.add_argument("--config", required=True, help="key = value config file")
    experiment.add_argument("--out", required=True, help="output directory")
    experiment.set_defaults(func=_cmd_experiment)

    corpus = sub.add_parser("corpus", help="build and save a level corpus")
    corpus.add_argument("--size", type=int, default=399)
    corpus.add_argument("--seed", type=int, default=7)
    corpus.add_argument("--out", required=True)
    corpus.set_defaults(func=_cmd_corpus)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
