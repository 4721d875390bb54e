"""Command-line entry point: ``gtgaug {synth,propagate,eval,experiment}``.

Exit codes: 0 success, 1 runtime or input failure, 2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import asdict
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    ClassCatalog,
    read_features,
    read_label_map,
    read_labels,
    read_source_map,
    write_features,
    write_labels,
    write_pseudo_labels,
    write_report,
)
from .errors import GtgError, MalformedRow
from .evaluation import accuracy, confusion, macro_f1
from .experiment import METHODS, run_experiment, summary_rows
from .gtg import GtgConfig, propagate
from .similarity import similarity_graph
from .synthetic import BlobSpec, class_names, gaussian_blobs

log = logging.getLogger("gtgaug")


def _positive_float(text):
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _int_at_least(lo):
    def parse(text):
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
        if value < lo:
            raise argparse.ArgumentTypeError(f"must be >= {lo}, got {value}")
        return value

    return parse


def _fraction_list(text):
    try:
        values = [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad fraction list: {text!r}") from None
    if not values or not all(0 < v <= 1 for v in values):
        raise argparse.ArgumentTypeError("fractions must lie in (0, 1]")
    return values


def _method_list(text):
    methods = [v.strip() for v in text.split(",") if v.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown or not methods:
        raise argparse.ArgumentTypeError(
            f"unknown method(s) {unknown}; choose from {','.join(METHODS)}"
        )
    return methods


def _add_gtg_flags(p):
    p.add_argument("--scale-k", type=_int_at_least(1), default=7)
    p.add_argument("--knn", type=_int_at_least(0), default=0, help="kNN sparsification, 0 = dense")
    p.add_argument("--eps", type=_positive_float, default=1e-5)
    p.add_argument("--max-iter", type=_int_at_least(1), default=100)


def _config(args) -> GtgConfig:
    return GtgConfig(
        epsilon=args.eps,
        max_iterations=args.max_iter,
        scale_k=args.scale_k,
        sparsify_k=args.knn,
    )


def _timestamp():
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    when = datetime.fromtimestamp(int(epoch), timezone.utc) if epoch else datetime.now(timezone.utc)
    return when.isoformat(timespec="seconds")


def write_manifest(path, command, settings) -> None:
    manifest = {
        "tool": "gtgaug",
        "version": __version__,
        "timestamp": _timestamp(),
        "command": command,
        "settings": settings,
    }
    Path(path).write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def cmd_synth(args) -> int:
    spec = BlobSpec(args.n, args.d, args.m, args.separation, args.seed)
    features, truth = gaussian_blobs(spec)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    names = class_names(spec.m)
    write_features(features, out / "features.csv")
    write_labels(features.ids, [names[h] for h in truth], out / "truth.csv")
    return 0


def _read_mask(path, catalog: ClassCatalog) -> dict[str, set]:
    """``id,allowed`` rows; `allowed` is a ``;``-separated list of class names."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        if next(reader, None) != ["id", "allowed"]:
            raise MalformedRow(0, "expected header id,allowed")
        mask = {}
        for rowno, row in enumerate(reader, start=1):
            if not row:
                continue
            if len(row) != 2:
                raise MalformedRow(rowno, f"expected 2 fields, got {len(row)}")
            mask[row[0]] = {catalog.index(name) for name in row[1].split(";") if name}
    return mask


def cmd_propagate(args) -> int:
    config = _config(args)
    features = read_features(args.features)
    classes = [c for c in args.classes.split(",") if c] if args.classes else None
    labeling = read_labels(args.labels, features, classes)
    mask = _read_mask(args.mask, labeling.catalog) if args.mask else None

    graph = similarity_graph(features, config.scale_k, config.sparsify_k)
    if args.dump_weights:
        dense = graph.toarray() if hasattr(graph, "toarray") else graph
        np.savetxt(args.dump_weights, dense, delimiter=",", fmt="%.17g")
    result, res = propagate(features, labeling, config, prior_mask=mask, graph=graph)
    write_pseudo_labels(result, labeling.catalog, args.out)

    if args.trace:
        with open(args.trace, "w", encoding="utf-8") as fh:
            fh.write("iter,residual\n")
            for t, r in enumerate(res.trace, start=1):
                fh.write(f"{t},{r!r}\n")

    out = Path(args.out)
    report_path = Path(args.report) if args.report else out.with_suffix(".report.json")
    manifest_path = report_path.with_name(out.stem + ".manifest.json")
    settings = {
        "gtg": asdict(config),
        "features": str(args.features),
        "labels": str(args.labels),
        "classes": list(labeling.catalog.names),
        "mask": args.mask,
        "out": str(args.out),
        "trace": args.trace,
    }
    write_manifest(manifest_path, "propagate", settings)
    sources = {s: result.source.count(s) for s in ("given", "propagated", "unpropagated")}
    write_report(
        {
            "method": "gtg",
            "labeled_fraction": len(labeling.labeled) / features.n,
            "accuracy": None,
            "macro_f1": None,
            "iterations": res.iterations,
            "converged": res.converged,
            "residual": res.residual,
            "config": asdict(config),
            "sources": sources,
            "manifest": manifest_path.name,
        },
        report_path,
    )
    if not res.converged:
        log.warning("no convergence after %d iterations (residual %.3g)", res.iterations, res.residual)
    return 0


def cmd_eval(args) -> int:
    truth = read_label_map(args.truth)
    pred = read_label_map(args.pred)
    if set(truth) != set(pred):
        raise GtgError(
            f"id mismatch: {len(set(pred) - set(truth))} ids only in pred, "
            f"{len(set(truth) - set(pred))} only in truth"
        )
    ids = list(truth)
    if args.restrict == "unlabeled":
        sources = read_source_map(args.pred)
        ids = [i for i in ids if sources[i] != "given"]
    catalog = ClassCatalog.from_names(set(truth.values()) | set(pred.values()))
    t = np.array([catalog.index(truth[i]) for i in ids], dtype=np.int64)
    p = np.array([catalog.index(pred[i]) for i in ids], dtype=np.int64)
    write_report(
        {
            "method": "eval",
            "labeled_fraction": None,
            "accuracy": accuracy(p, t),
            "macro_f1": macro_f1(p, t, catalog.m),
            "confusion": confusion(p, t, catalog.m),
            "classes": list(catalog.names),
            "n_evaluated": len(ids),
            "iterations": None,
            "converged": None,
            "config": {"restrict": args.restrict, "pred": args.pred, "truth": args.truth},
        },
        args.out,
    )
    return 0


def cmd_experiment(args) -> int:
    config = _config(args)
    features = read_features(args.features)
    truth_map = read_label_map(args.truth)
    missing = [i for i in features.ids if i not in truth_map]
    if missing or len(truth_map) != features.n:
        raise GtgError(f"truth file does not match features ({len(missing)} ids without truth)")
    catalog = ClassCatalog.from_names(truth_map.values())
    truth = np.array([catalog.index(truth_map[i]) for i in features.ids], dtype=np.int64)

    cells = run_experiment(
        features,
        truth,
        catalog,
        fractions=args.fractions,
        methods=args.methods,
        seed=args.seed,
        config=config,
        knn_k=args.knn_k,
        test_fraction=args.test_fraction,
    )
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_manifest(
        out / "manifest.json",
        "experiment",
        {
            "features": str(args.features),
            "truth": str(args.truth),
            "fractions": args.fractions,
            "methods": args.methods,
            "seed": args.seed,
            "knn_k": args.knn_k,
            "test_fraction": args.test_fraction,
            "gtg": asdict(config),
        },
    )
    for cell in cells:
        cell = dict(cell, manifest="manifest.json")
        write_report(cell, out / f"report_{cell['labeled_fraction']!r}_{cell['method']}.json")
    with open(out / "summary.csv", "w", encoding="utf-8", newline="") as fh:
        fh.write("fraction,method,accuracy,macro_f1\n")
        for fraction, method, acc, f1 in summary_rows(cells):
            fh.write(f"{fraction!r},{method},{acc!r},{f1!r}\n")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gtgaug", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"gtgaug {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a Gaussian blob dataset")
    p.add_argument("--n", type=_int_at_least(2), required=True)
    p.add_argument("--d", type=_int_at_least(1), required=True)
    p.add_argument("--m", type=_int_at_least(2), required=True)
    p.add_argument("--separation", type=_positive_float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("propagate", help="pseudo-label unlabeled objects with GTG")
    p.add_argument("--features", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--classes", help="comma-separated class names to add to the catalog")
    _add_gtg_flags(p)
    p.add_argument("--mask", help="id,allowed file restricting initial strategies")
    p.add_argument("--out", required=True)
    p.add_argument("--trace", help="write per-iteration residuals here")
    p.add_argument("--report", help="report path (default: OUT with .report.json)")
    p.add_argument("--dump-weights", help="write the similarity matrix as CSV")
    p.set_defaults(func=cmd_propagate)

    p = sub.add_parser("eval", help="score predictions against truth")
    p.add_argument("--pred", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--restrict", choices=("unlabeled", "all"), default="all")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("experiment", help="labeled-fraction sweep over all methods")
    p.add_argument("--features", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--fractions", type=_fraction_list, default=[0.02, 0.05, 0.10])
    p.add_argument("--methods", type=_method_list, default=list(METHODS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--knn-k", type=_int_at_least(1), default=1, help="neighbours for the knn baseline")
    p.add_argument("--test-fraction", type=_positive_float, default=0.30)
    _add_gtg_flags(p)
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except (GtgError, OSError, ValueError) as exc:
        print(f"gtgaug {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
