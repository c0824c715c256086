"""Command-line interface: describe, extract, evaluate, synth, scan.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 resource limit exceeded.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .classify import (
    FeatureMatrix,
    confusion_to_csv,
    evaluate,
    features_from_csv,
    features_to_csv,
    fit_lda,
    rank_features,
    select_mld,
    stratified_holdout,
)
from .config import METHODS, RunConfig
from .descriptors import bm_descriptors, descriptors_to_csv, estimate_fd
from .dilation import achievable_distances, curve_to_csv, dilation_curve
from .errors import DatasetError, ImageError, MemoryBudgetError
from .imagery import load_grayscale, manifest_to_csv, scan_dataset
from .multilevel import build_efv, efv_header
from .synth import generate_synthetic

MEBI = 1024 * 1024


def _feature_names(cfg):
    radii = achievable_distances(cfg.r_max)
    if cfg.method == "bm":
        return [f"d_squared_{int(d2)}" for d2 in radii.d2]
    return efv_header(len(radii)).split(",")


def _extract_one(task):
    path, method, r_max, levels, min_cell_side, memory_budget = task
    img = load_grayscale(path)
    if method == "bm":
        return bm_descriptors(img, r_max, memory_budget).values
    return build_efv(img, r_max, levels, min_cell_side, memory_budget).efv


def extract_features(manifest, cfg):
    """Feature matrix for every manifest entry, in manifest order."""
    tasks = [
        (entry.path, cfg.method, cfg.r_max, cfg.levels, cfg.min_cell_side,
         cfg.memory_budget)
        for entry in manifest.entries
    ]
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            rows = list(pool.map(_extract_one, tasks))
    else:
        rows = [_extract_one(task) for task in tasks]
    labels = [entry.label for entry in manifest.entries]
    return FeatureMatrix(np.stack(rows), np.array(labels), _feature_names(cfg))


def evaluate_features(features, cfg):
    """Hold-out evaluation; method mld ranks and selects on train first.

    Returns (report, nd, selection_or_None).
    """
    if len(set(features.labels.tolist())) < 2:
        raise DatasetError("evaluation needs >= 2 classes in the feature table")
    train, test = stratified_holdout(features, cfg.holdout, cfg.seed)
    selection = None
    if cfg.method == "mld":
        ranked = rank_features(train, cfg.seed, cfg.ridge)
        selection = select_mld(train, ranked, cfg.seed, cfg.ridge)
        keep = selection.selected.tolist()
        train = train.take_features(keep)
        test = test.take_features(keep)
    model = fit_lda(train, cfg.ridge)
    report = evaluate(model, test)
    return report, train.n_features, selection


def metrics_json(report, nd, cfg, selection=None):
    payload = report.to_dict()
    payload["nd"] = int(nd)
    payload["config"] = cfg.to_dict()
    if selection is not None:
        payload["selection"] = {
            "n_star": int(selection.n_star),
            "ranked": selection.ranked.tolist(),
            "prefix_accuracies": [float(a) for a in selection.accuracies],
        }
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def _emit(text, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, newline="\n")


def run_scan(args, cfg):
    manifest = scan_dataset(args.root)
    _emit(manifest_to_csv(manifest), args.out)
    return 0


def run_describe(args, cfg):
    img = load_grayscale(args.image)
    curve = dilation_curve(img, cfg.r_max, cfg.memory_budget)
    vector = bm_descriptors(img, cfg.r_max, cfg.memory_budget)
    fd = estimate_fd(curve)
    blocks = {
        "curve": curve_to_csv(curve),
        "descriptors": descriptors_to_csv(vector, curve.radii),
        "fd": f"fd,residual\n{fd.fd:.12g},{fd.residual:.12g}\n",
    }
    if cfg.method == "mld":
        efv = build_efv(img, cfg.r_max, cfg.levels, cfg.min_cell_side,
                        cfg.memory_budget).efv
        row = ",".join(format(v, ".12g") for v in efv)
        blocks["efv"] = f"{efv_header(len(vector))}\n{row}\n"
    if args.out is None:
        for text in blocks.values():
            sys.stdout.write(text)
    else:
        for name, text in blocks.items():
            Path(f"{args.out}.{name}.csv").write_text(text, newline="\n")
    return 0


def run_extract(args, cfg):
    manifest = scan_dataset(args.root)
    features = extract_features(manifest, cfg)
    _emit(features_to_csv(features), args.out)
    return 0


def run_evaluate(args, cfg):
    path = Path(args.features)
    if not path.is_file():
        raise FileNotFoundError(f"no such feature CSV: {path}")
    features = features_from_csv(path.read_text())
    report, nd, selection = evaluate_features(features, cfg)
    if args.out is None:
        sys.stdout.write(metrics_json(report, nd, cfg, selection))
        sys.stdout.write(confusion_to_csv(report))
    else:
        Path(f"{args.out}.metrics.json").write_text(
            metrics_json(report, nd, cfg, selection), newline="\n"
        )
        Path(f"{args.out}.confusion.csv").write_text(
            confusion_to_csv(report), newline="\n"
        )
    return 0


def run_synth(args, cfg):
    generate_synthetic(args.out_dir, args.classes, args.samples, args.size, cfg.seed)
    return 0


# ---------------------------------------------------------------------------
# Argument parsing
# ---------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    # usage problems exit 1, not argparse's default 2
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _add_config_flags(sub):
    sub.add_argument("--config", help="JSON config file (flags take precedence)")
    sub.add_argument("--rmax", type=int, dest="r_max", help="maximum dilation radius")
    sub.add_argument("--levels", type=int, help="decomposition levels")
    sub.add_argument("--min-cell", type=int, dest="min_cell_side",
                     help="smallest allowed cell side")
    sub.add_argument("--method", choices=METHODS, help="feature method")
    sub.add_argument("--holdout", type=float, help="training fraction in (0,1)")
    sub.add_argument("--ridge", type=float, help="covariance ridge factor")
    sub.add_argument("--seed", type=int, help="random seed")
    sub.add_argument("--workers", type=int, help="parallel image workers")
    sub.add_argument("--mem-budget", type=int, dest="mem_budget_mib",
                     help="voxel storage budget in MiB")


def build_parser():
    parser = _Parser(prog="fractex", description=__doc__.splitlines()[0])
    commands = parser.add_subparsers(dest="command", required=True)

    scan = commands.add_parser("scan", help="list a dataset tree as a manifest CSV")
    scan.add_argument("root")
    scan.add_argument("--out", help="output file (default stdout)")
    _add_config_flags(scan)
    scan.set_defaults(func=run_scan)

    describe = commands.add_parser("describe", help="descriptors of one image")
    describe.add_argument("image")
    describe.add_argument("--out", help="output file prefix (default stdout)")
    _add_config_flags(describe)
    describe.set_defaults(func=run_describe)

    extract = commands.add_parser("extract", help="feature CSV for a dataset tree")
    extract.add_argument("root")
    extract.add_argument("--out", help="output file (default stdout)")
    _add_config_flags(extract)
    extract.set_defaults(func=run_extract)

    evaluate_cmd = commands.add_parser("evaluate", help="hold-out metrics for a feature CSV")
    evaluate_cmd.add_argument("features")
    evaluate_cmd.add_argument("--out", help="output prefix (default stdout)")
    _add_config_flags(evaluate_cmd)
    evaluate_cmd.set_defaults(func=run_evaluate)

    synth = commands.add_parser("synth", help="generate a synthetic dataset tree")
    synth.add_argument("out_dir")
    synth.add_argument("--classes", type=int, default=5)
    synth.add_argument("--samples", type=int, default=10)
    synth.add_argument("--size", type=int, default=64)
    _add_config_flags(synth)
    synth.set_defaults(func=run_synth)

    return parser


def _build_config(args):
    cfg = RunConfig()
    if getattr(args, "config", None):
        cfg = RunConfig.from_file(args.config)
    overrides = {
        key: getattr(args, key, None)
        for key in ("r_max", "levels", "min_cell_side", "method", "holdout",
                    "ridge", "seed", "workers")
    }
    mib = getattr(args, "mem_budget_mib", None)
    if mib is not None:
        overrides["memory_budget"] = mib * MEBI
    return cfg.with_overrides(**overrides)


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = _build_config(args)
    except ValueError as exc:
        print(f"fractex: config error: {exc}", file=sys.stderr)
        return 1
    try:
        return args.func(args, cfg)
    except MemoryBudgetError as exc:
        print(f"fractex: resource limit: {exc}", file=sys.stderr)
        return 3
    except (FileNotFoundError, ImageError, DatasetError, ValueError, OSError) as exc:
        print(f"fractex: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
