"""Command-line entry point.

Every experiment flag may also come from a flat ``key = value`` config file
(``--config``); values given on the command line win. Keys are the
ExperimentConfig field names (``svd_rank`` or ``svd-rank``).
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from .errors import IdsError
from .experiment import (
    METHODS,
    PRESETS,
    ExperimentConfig,
    ExperimentError,
    prepare,
    run_experiment,
    train_method,
    write_reports,
)
from .features import encode, fit_encoder
from .ingest import load_split, stratified_sample
from .knn import KnnModel
from .metrics import evaluate
from .modelio import load_model, save_model
from .report import comparison_deltas

logger = logging.getLogger("svdsvm_ids")

# flag dest -> ExperimentConfig field
FLAG_FIELDS = {
    "train": "train_path",
    "test": "test_path",
    "train_sample_size": "train_sample_size",
    "test_sample_size": "test_sample_size",
    "seed": "seed",
    "svd_rank": "svd_rank",
    "kernel": "kernel",
    "sigma_sq": "sigma_sq",
    "degree": "degree",
    "kappa1": "kappa1",
    "kappa2": "kappa2",
    "c": "penalty_c",
    "tol": "kkt_tolerance",
    "max_passes": "max_passes",
    "knn_k": "knn_k",
    "methods": "methods",
    "out": "out_dir",
    "n_jobs": "n_jobs",
}

ALIASES = {"c": "penalty_c", "tol": "kkt_tolerance", "out": "out_dir",
           "train": "train_path", "test": "test_path"}

INT_FIELDS = {"train_sample_size", "test_sample_size", "seed", "svd_rank", "degree",
              "knn_k", "n_jobs", "max_passes"}
FLOAT_FIELDS = {"kappa1", "kappa2", "penalty_c", "kkt_tolerance"}


def read_config_file(path) -> dict[str, str]:
    values = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"{path}:{lineno}: expected 'key = value'")
        key = key.strip().replace("-", "_")
        values[ALIASES.get(key, key)] = value.strip()
    return values


def _convert(field: str, value):
    if not isinstance(value, str):
        return value
    if field in INT_FIELDS:
        return None if field == "max_passes" and value.lower() in ("", "none") else int(value)
    if field in FLOAT_FIELDS:
        return float(value)
    if field == "sigma_sq":
        return None if value.lower() == "auto" else float(value)
    if field == "methods":
        return tuple(m.strip() for m in value.split(",") if m.strip())
    return value


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    values: dict = {}
    preset = getattr(args, "preset", None)
    file_values = read_config_file(args.config) if getattr(args, "config", None) else {}
    preset = preset or file_values.pop("preset", None)
    if preset:
        values.update(PRESETS[preset])
    unknown = set(file_values) - set(ExperimentConfig.field_names())
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(sorted(unknown))}")
    values.update(file_values)
    for dest, field in FLAG_FIELDS.items():
        value = getattr(args, dest, None)
        if value is not None:
            values[field] = value
    return ExperimentConfig(**{k: _convert(k, v) for k, v in values.items()})


def _add_experiment_flags(p: argparse.ArgumentParser, methods: bool = True) -> None:
    p.add_argument("--config", help="flat key = value file supplying any flag")
    p.add_argument("--preset", choices=sorted(PRESETS), help="sample-size preset")
    p.add_argument("--train", help="KDDTrain+ style file")
    p.add_argument("--test", help="KDDTest+ style file")
    p.add_argument("--train-sample-size", type=int)
    p.add_argument("--test-sample-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--svd-rank", type=int)
    p.add_argument("--kernel", choices=("linear", "polynomial", "rbf", "sigmoid"))
    p.add_argument("--sigma-sq", help="RBF width sigma^2, or 'auto' for half the input dimension")
    p.add_argument("--degree", type=int)
    p.add_argument("--kappa1", type=float)
    p.add_argument("--kappa2", type=float)
    p.add_argument("--c", type=float, help="soft-margin penalty")
    p.add_argument("--tol", type=float, help="KKT tolerance")
    p.add_argument("--max-passes", type=int)
    p.add_argument("--knn-k", type=int)
    if methods:
        p.add_argument("--methods", help=f"comma-separated subset of {','.join(METHODS)}")
    p.add_argument("--out", help="output directory")
    p.add_argument("--n-jobs", type=int)


def cmd_prepare(args) -> int:
    cfg = build_config(args)
    data = prepare(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    np.savez(out / "prepared.npz",
             x_train=data.x_train, y_train=np.array([str(c) for c in data.y_train]),
             x_test=data.x_test, y_test=np.array([str(c) for c in data.y_test]),
             columns=np.array(data.encoder.column_names))
    print(f"train {data.x_train.shape}, test {data.x_test.shape} -> {out / 'prepared.npz'}")
    return 0


def cmd_train(args) -> int:
    cfg = build_config(args)
    train = stratified_sample(load_split(cfg.train_path, "train"), cfg.train_sample_size, cfg.seed)
    encoder = fit_encoder(train)
    matrix, labels = encode(train, encoder)
    model = train_method(args.method, encoder, matrix.values, labels, cfg)
    save_model(model, args.model)
    print(f"{args.method} model written to {args.model}")
    return 0


def cmd_evaluate(args) -> int:
    model = load_model(args.model)
    method = model.config.get("method", "model")
    split = load_split(args.test, "test")
    seed = args.seed if args.seed is not None else int(model.config.get("seed", 0)) + 1
    if args.test_sample_size and args.test_sample_size < len(split):
        split = stratified_sample(split, args.test_sample_size, seed)
    matrix, labels = encode(split, model.encoder)
    report = evaluate(labels, model.predict_matrix(matrix.values))
    csv_path, txt_path = write_reports({method: report}, args.out or ".")
    print(txt_path.read_text(encoding="utf-8"), end="")
    return 0


def cmd_experiment(args) -> int:
    cfg = build_config(args)
    reports = run_experiment(cfg, save_models=args.save_models)
    print((Path(cfg.out_dir) / "report.txt").read_text(encoding="utf-8"), end="")
    deltas = comparison_deltas(reports)
    for variant, d in deltas.items():
        logger.info("macro-F delta SVM - KNN (%s): %+.4f", variant, d)
    return 0


def cmd_inspect(args) -> int:
    model = load_model(args.model)
    print(f"format      v{model.format_version}")
    print(f"checksum    {model.checksum}")
    print(f"method      {model.config.get('method', '?')}")
    print(f"encoder     {model.encoder.n_columns} columns, vocab sizes "
          f"{[len(v) for v in model.encoder.vocabularies]}")
    if model.svd is not None:
        sv = model.svd.singular_values
        print(f"svd         rank {model.svd.k} of {model.svd.p}, sigma[0]={sv[0]:.6g} sigma[-1]={sv[-1]:.6g}")
    clf = model.classifier
    if isinstance(clf, KnnModel):
        print(f"knn         k={clf.k}, {clf.train_matrix.shape[0]} stored rows")
    else:
        print(f"svm         kernel {clf.kernel.to_text()}")
        for cls, m in zip(clf.class_order, clf.models):
            print(f"  {str(cls):<7} {m.n_support:6d} support vectors, bias {m.bias:+.6f}"
                  f"{'' if m.converged else '  (not converged)'}")
    for key in sorted(model.config):
        print(f"config      {key} = {model.config[key]}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="svdsvm-ids", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("prepare", help="sample and encode both splits, write prepared.npz")
    _add_experiment_flags(p, methods=False)
    p.set_defaults(func=cmd_prepare)

    p = sub.add_parser("train", help="train one method and write a model file")
    _add_experiment_flags(p, methods=False)
    p.add_argument("--method", choices=METHODS, default="svm-svd")
    p.add_argument("--model", required=True, help="model file to write")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("evaluate", help="evaluate a saved model on a test file")
    p.add_argument("--model", required=True)
    p.add_argument("--test", required=True)
    p.add_argument("--test-sample-size", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="run the SVM/KNN x full/SVD comparison")
    _add_experiment_flags(p)
    p.add_argument("--save-models", action="store_true", help="also write <method>.model files")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("inspect-model", help="summarize a model file")
    p.add_argument("model")
    p.set_defaults(func=cmd_inspect)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except ExperimentError as exc:
        print(f"error in method {exc}", file=sys.stderr)
    except (IdsError, OSError, ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
    return 1


if __name__ == "__main__":
    sys.exit(main())
