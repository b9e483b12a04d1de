"""Command-line front end: synth, fit, project, eval, compare.

Exit codes: 0 success, 2 input/config validation failure, 3 numeric failure.
Every command is deterministic given its flags and input files; the only
randomness lives in ``synth`` behind an explicit seed.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from .dataset import center, load_dataset, save_dataset, write_matrix_csv
from .errors import ConfigError, NumericError, ValidationError
from .evaluation import EvalConfig, compare_methods, evaluate, write_report
from .models import METHODS, fit, load_model, project, save_model
from . import synth

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated integers, got {text!r}"
        ) from None
    return dims


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corrfusion",
        description="Multimodal correlation-fusion toolkit: generate data, "
        "fit projection models, and evaluate them with a nearest-neighbour "
        "classifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("synth", help="generate a seeded synthetic dataset")
    sp.add_argument("--preset", choices=["standard"], help="start from a fixed preset")
    sp.add_argument("--modality-dims", type=_parse_dims,
                    help="comma-separated feature counts, one per modality")
    sp.add_argument("--classes", type=int, help="number of classes")
    sp.add_argument("--n-train", type=int)
    sp.add_argument("--n-eval", type=int)
    sp.add_argument("--signal-dim", type=int)
    sp.add_argument("--snr", type=float, help="linear signal-to-noise power ratio")
    sp.add_argument("--seed", type=int)
    sp.add_argument("--out-dir", required=True)
    sp.set_defaults(func=cmd_synth)

    fp = sub.add_parser("fit", help="fit a projection model and save it as JSON")
    fp.add_argument("--method", required=True, choices=METHODS)
    fp.add_argument("--modality", action="append", required=True,
                    help="modality CSV (one sample per row); repeat per modality")
    fp.add_argument("--labels", required=True, help="labels file, one integer per line")
    fp.add_argument("--out", required=True, help="output model JSON path")
    fp.add_argument("--dim", type=int, help="projection dimension override")
    fp.add_argument("--ridge", type=float, help="fixed ridge (default: automatic)")
    fp.add_argument("--scale-variance", action="store_true",
                    help="also scale features to unit variance (off by default)")
    fp.add_argument("--header", action="store_true",
                    help="modality CSVs carry a header row")
    fp.set_defaults(func=cmd_fit)

    pp = sub.add_parser("project", help="project raw data with a saved model")
    pp.add_argument("--model", required=True)
    pp.add_argument("--modality", action="append", required=True)
    pp.add_argument("--labels", required=True)
    pp.add_argument("--out", required=True, help="output CSV (one sample per row)")
    pp.add_argument("--dim", type=int, help="truncate to the leading dimensions")
    pp.add_argument("--header", action="store_true")
    pp.set_defaults(func=cmd_project)

    ep = sub.add_parser("eval", help="fit on train data, evaluate on held-out data")
    ep.add_argument("--method", required=True, choices=METHODS)
    ep.add_argument("--train-modality", action="append", required=True)
    ep.add_argument("--train-labels", required=True)
    ep.add_argument("--eval-modality", action="append", required=True)
    ep.add_argument("--eval-labels", required=True)
    ep.add_argument("--out-dir", required=True)
    ep.add_argument("--dim", type=int, help="fixed dimension (skips the sweep)")
    ep.add_argument("--ridge", type=float)
    ep.add_argument("--scale-variance", action="store_true")
    ep.add_argument("--metric", choices=["euclidean"], default="euclidean")
    ep.add_argument("--header", action="store_true")
    ep.set_defaults(func=cmd_eval)

    cp = sub.add_parser("compare", help="evaluate several methods on the same data")
    cp.add_argument("--method", action="append", choices=METHODS,
                    help="method to include; repeat (default: all)")
    cp.add_argument("--train-modality", action="append", required=True)
    cp.add_argument("--train-labels", required=True)
    cp.add_argument("--eval-modality", action="append", required=True)
    cp.add_argument("--eval-labels", required=True)
    cp.add_argument("--out-dir", required=True)
    cp.add_argument("--dim", type=int)
    cp.add_argument("--ridge", type=float)
    cp.add_argument("--scale-variance", action="store_true")
    cp.add_argument("--metric", choices=["euclidean"], default="euclidean")
    cp.add_argument("--header", action="store_true")
    cp.set_defaults(func=cmd_compare)

    return parser


def cmd_synth(args) -> None:
    if args.preset == "standard":
        config = synth.standard_benchmark()
        overrides = {}
        if args.modality_dims is not None:
            overrides["dims"] = args.modality_dims
            overrides["n_modalities"] = len(args.modality_dims)
        for flag, name in [
            ("classes", "n_classes"),
            ("n_train", "n_train"),
            ("n_eval", "n_eval"),
            ("signal_dim", "signal_dim"),
            ("snr", "snr"),
            ("seed", "seed"),
        ]:
            value = getattr(args, flag)
            if value is not None:
                overrides[name] = value
        config = dataclasses.replace(config, **overrides)
    else:
        missing = [
            flag
            for flag, value in [
                ("--modality-dims", args.modality_dims),
                ("--classes", args.classes),
                ("--n-train", args.n_train),
                ("--n-eval", args.n_eval),
                ("--signal-dim", args.signal_dim),
                ("--snr", args.snr),
                ("--seed", args.seed),
            ]
            if value is None
        ]
        if missing:
            raise ConfigError(
                "without --preset, these flags are required: " + ", ".join(missing)
            )
        config = synth.SynthConfig(
            n_modalities=len(args.modality_dims),
            dims=args.modality_dims,
            n_classes=args.classes,
            n_train=args.n_train,
            n_eval=args.n_eval,
            signal_dim=args.signal_dim,
            snr=args.snr,
            seed=args.seed,
        )

    train, eval_ds = synth.generate(config)
    out_dir = Path(args.out_dir)
    paths = save_dataset(train, out_dir, "train") + save_dataset(eval_ds, out_dir, "eval")
    print(
        "generated: modalities="
        + ",".join(str(m) for m in config.dims)
        + f" classes={config.n_classes} n_train={config.n_train}"
        + f" n_eval={config.n_eval} signal_dim={config.signal_dim}"
        + f" snr={config.snr} seed={config.seed}"
    )
    for path in paths:
        print(f"wrote {path}")


def cmd_fit(args) -> None:
    dataset = load_dataset(args.modality, args.labels, header=args.header)
    centered = center(dataset, scale_variance=args.scale_variance)
    model = fit(centered, args.method, d=args.dim, ridge=args.ridge)
    save_model(model, args.out)

    head = np.array2string(
        model.eigenvalues[: min(8, model.d)], precision=6, separator=", "
    )
    print(f"method={model.method} modalities={len(model.weights)} "
          f"total_features={model.total_features} classes={model.c}")
    print(f"leading eigenvalues: {head}")
    print(f"positive eigenvalues: {model.n_positive}")
    print(f"projection dimension d={model.d}")
    print(f"wrote {args.out}")


def cmd_project(args) -> None:
    model = load_model(args.model)
    dataset = load_dataset(args.modality, args.labels, header=args.header)
    projected = project(model, dataset, d=args.dim)
    write_matrix_csv(args.out, projected.y)
    print(f"projected {projected.y.shape[1]} samples to {projected.y.shape[0]} "
          f"dimensions; wrote {args.out}")


def _eval_config(args) -> EvalConfig:
    return EvalConfig(
        dim=args.dim,
        metric=args.metric,
        scale_variance=args.scale_variance,
        ridge=args.ridge,
    )


def _load_pair(args):
    train = load_dataset(args.train_modality, args.train_labels, header=args.header)
    eval_ds = load_dataset(args.eval_modality, args.eval_labels, header=args.header)
    return train, eval_ds


def cmd_eval(args) -> None:
    train, eval_ds = _load_pair(args)
    report = evaluate(train, eval_ds, args.method, _eval_config(args))
    paths = write_report(report, args.out_dir)
    print(f"{report.method}, {report.optimal_accuracy * 100:.2f}%, {report.optimal_dim}")
    for path in paths:
        print(f"wrote {path}")


def cmd_compare(args) -> None:
    train, eval_ds = _load_pair(args)
    methods = args.method if args.method else list(METHODS)
    rows = compare_methods(train, eval_ds, methods, _eval_config(args))

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    table_path = out_dir / "comparison.csv"
    with open(table_path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["method", "optimal_accuracy", "optimal_dim"])
        for row in rows:
            if row["error"] is None:
                report = row["report"]
                writer.writerow(
                    [row["method"], repr(report.optimal_accuracy), report.optimal_dim]
                )
            else:
                writer.writerow([row["method"], f"error: {row['error']}", ""])

    for row in rows:
        if row["error"] is None:
            report = row["report"]
            print(f"{row['method']}, {report.optimal_accuracy * 100:.2f}%, "
                  f"{report.optimal_dim}")
        else:
            print(f"{row['method']}, error: {row['error']}")
    print(f"wrote {table_path}")

    if all(row["error"] is not None for row in rows):
        raise ConfigError("every requested method failed")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
