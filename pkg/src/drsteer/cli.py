"""Command line entry points: fit, bench, serve."""

from __future__ import annotations

import argparse
import os
import sys

from . import evaluation
from .autoencoder import TrainConfig, train_autoencoder
from .dataset import load_csv
from .pca import fit_pca


def _cmd_fit(args) -> int:
    with open(args.csv, "rb") as fh:
        data = load_csv(fh.read(), id_column=args.id_column)
    if args.method == "pca":
        model = fit_pca(data, standardize=not args.no_standardize)
    else:
        config = TrainConfig(
            epochs=args.epochs,
            batch_size=min(args.batch_size, data.n),
            learning_rate=args.learning_rate,
            seed=args.seed,
        )
        model = train_autoencoder(data, config)
    positions = model.project_batch(data.values)
    out = sys.stdout
    out.write("id,x,y\n")
    for pid, pos in zip(data.ids, positions):
        # plain-float repr keeps every float64 exact on re-parse
        out.write(f"{pid},{float(pos[0])!r},{float(pos[1])!r}\n")
    return 0


def _parse_counts(text: str) -> tuple[int, ...]:
    return tuple(int(v) for v in text.split(",") if v.strip()) if text else ()


def _cmd_bench(args) -> int:
    config = evaluation.BenchConfig(
        sample_counts=_parse_counts(args.samples),
        dimension_counts=_parse_counts(args.dims),
        fixed_d=args.fixed_d,
        fixed_n=args.fixed_n,
        k=args.k,
        repeats=args.repeats,
        seed=args.seed,
        models=tuple(args.models.split(",")),
    )
    rows = evaluation.run_benchmark(config)
    evaluation.write_report(rows, args.out)
    print(f"wrote {len(rows)} rows to {args.out}")
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import app

    port = int(os.environ.get("PORT", args.port))
    uvicorn.run(app, host=args.host, port=port, log_level=args.log_level)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drsteer")
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a model and print plane positions as CSV")
    fit.add_argument("csv", help="path to the input CSV file")
    fit.add_argument("--method", choices=["pca", "autoencoder"], default="pca")
    fit.add_argument("--id-column", default=None)
    fit.add_argument("--no-standardize", action="store_true", help="pca: skip z-scoring")
    fit.add_argument("--epochs", type=int, default=200)
    fit.add_argument("--batch-size", type=int, default=64)
    fit.add_argument("--learning-rate", type=float, default=1e-3)
    fit.add_argument("--seed", type=int, default=0)
    fit.set_defaults(func=_cmd_fit)

    bench = sub.add_parser("bench", help="run the interaction benchmark, write a CSV report")
    bench.add_argument("--out", default="bench_report.csv")
    bench.add_argument("--samples", default="100,1000,10000", help="comma-separated sample counts")
    bench.add_argument("--dims", default="10,50,100", help="comma-separated dimensionalities")
    bench.add_argument("--fixed-d", type=int, default=10)
    bench.add_argument("--fixed-n", type=int, default=100)
    bench.add_argument("--k", type=int, default=10)
    bench.add_argument("--repeats", type=int, default=10)
    bench.add_argument("--seed", type=int, default=0)
    bench.add_argument("--models", default="pca,autoencoder")
    bench.set_defaults(func=_cmd_bench)

    serve = sub.add_parser("serve", help="run the HTTP service (env PORT overrides --port)")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--log-level", default="info")
    serve.set_defaults(func=_cmd_serve)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    raise SystemExit(main())
