"""Command-line interface: build, query, evaluate, debug.

Configuration precedence is built-in defaults, then a flat ``key =
value`` config file (``--config`` flag or the ``LEAF_CONFIG`` environment
variable), then command-line flags. Exit codes: 0 success, 1 data or
pipeline error, 2 usage error.

Progress and timing go to stderr; results (tables, reports) go to
stdout so they stay byte-deterministic.
"""

import argparse
import logging
import os
import sys
import time
from pathlib import Path

import numpy as np
from PIL import Image

from . import imaging, ranking, segmentation
from .appearance import vein_image
from .config import PipelineConfig, Weights, parse_config_file
from .errors import LeafSearchError
from .index import (
    build_index,
    extract_batch,
    extract_features,
    ingest_dataset,
    layout_for,
    load_index,
    normalize_vector,
    save_index,
    split_dataset,
)

log = logging.getLogger("leafsearch")

_FLAG_KEYS = [
    ("nbins", "seg.nbins"),
    ("median_kernel", "seg.median_kernel"),
    ("pft_m", "pft.m"),
    ("pft_n", "pft.n"),
    ("vein_tau", "vein.tau"),
    ("ws", "weights.ws"),
    ("wc", "weights.wc"),
    ("wv", "weights.wv"),
    ("seed", "split.seed"),
]


def _add_config_flags(parser, split_flags=True):
    parser.add_argument("--config", help="flat key=value config file")
    parser.add_argument("--nbins", type=int, help="histogram bins for thresholding")
    parser.add_argument("--median-kernel", type=int, help="binary median window size")
    parser.add_argument("--pft-m", type=int, help="radial frequency count")
    parser.add_argument("--pft-n", type=int, help="angular frequency count")
    parser.add_argument("--vein-tau", type=float, help="opening-residue threshold")
    parser.add_argument("--ws", type=float, help="shape distance weight")
    parser.add_argument("--wc", type=float, help="color distance weight")
    parser.add_argument("--wv", type=float, help="vein distance weight")
    if split_flags:
        parser.add_argument("--seed", type=int, help="split shuffle seed")
        parser.add_argument("--n-ref", type=int, default=40, help="reference images per species")
        parser.add_argument("--n-test", type=int, default=10, help="test images per species")
        parser.add_argument(
            "--permissive-split",
            action="store_true",
            help="scale the split down for species with too few images",
        )
    parser.add_argument(
        "--jobs", type=int, default=os.cpu_count() or 1, help="parallel extraction workers"
    )


def resolve_config(args):
    """defaults < config file < flags, returned as a PipelineConfig."""
    cfg = PipelineConfig()
    path = getattr(args, "config", None) or os.environ.get("LEAF_CONFIG")
    if path:
        cfg = cfg.with_pairs(parse_config_file(path))
    flag_pairs = {}
    for attr, key in _FLAG_KEYS:
        value = getattr(args, attr, None)
        if value is not None:
            flag_pairs[key] = str(value)
    return cfg.with_pairs(flag_pairs)


def cmd_build(args):
    cfg = resolve_config(args)
    started = time.perf_counter()
    entries = ingest_dataset(args.root)
    split = split_dataset(entries, args.n_ref, args.n_test, cfg.split_seed,
                          permissive=args.permissive_split)
    index, failures = build_index(args.root, split.reference_entries(), cfg, jobs=args.jobs)
    save_index(index, args.index)
    elapsed = time.perf_counter() - started
    print(f"indexed {len(index.records)} records ({len(failures)} failures) "
          f"to {args.index} in {elapsed:.1f}s")
    for f in failures:
        print(f"  failed: {f.path} ({f.stage})", file=sys.stderr)
    return 0


def cmd_query(args):
    index = load_index(args.index)
    weights = _query_weights(args, index.config.weights)
    features = extract_features(imaging.load_image(args.image), index.config)
    q = normalize_vector(features, index.stats)
    matches = ranking.query_top_n(index, q, args.top_n, weights)
    by_id = {r.id: r for r in index.records}
    print(f"{'rank':>4}  {'distance':>10}  species / matched file")
    for m in matches:
        print(f"{m.rank:>4}  {m.distance:>10.6f}  {m.species}  {by_id[m.record_id].path}")
    return 0


def cmd_evaluate(args):
    cfg = resolve_config(args)
    started = time.perf_counter()
    entries = ingest_dataset(args.root)
    split = split_dataset(entries, args.n_ref, args.n_test, cfg.split_seed,
                          permissive=args.permissive_split)
    index, ref_failures = build_index(args.root, split.reference_entries(), cfg, jobs=args.jobs)
    print(f"indexed {len(index.records)} references "
          f"({len(ref_failures)} failures)", file=sys.stderr)
    successes, test_failures = extract_batch(args.root, split.test_entries(), cfg, jobs=args.jobs)
    if not successes:
        raise LeafSearchError("no test image could be processed")
    tests = [(species, features) for species, _path, features in successes]
    report = ranking.evaluate(
        index, tests, ns=(1, 3, 5), weights=cfg.weights,
        failures=[f.path for f in test_failures],
    )
    print(ranking.format_report(report))
    for path in report.failures:
        print(f"  test image excluded: {path}", file=sys.stderr)
    if args.report:
        lines = ranking.report_lines(report, config_pairs=cfg.config_pairs())
        Path(args.report).write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"report written to {args.report}", file=sys.stderr)
    print(f"evaluated {report.query_count} queries in "
          f"{time.perf_counter() - started:.1f}s", file=sys.stderr)
    return 0


def _query_weights(args, base):
    values = {
        "ws": args.ws if args.ws is not None else base.ws,
        "wc": args.wc if args.wc is not None else base.wc,
        "wv": args.wv if args.wv is not None else base.wv,
    }
    return Weights(**values)


def _save_gray(path, values):
    Image.fromarray(np.round(values * 255).astype(np.uint8), mode="L").save(path)


def _save_mask(path, mask):
    _save_gray(path, mask.astype(np.float64))


def cmd_debug(args):
    cfg = resolve_config(args)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    img = imaging.load_image(args.image)
    stages = segmentation.segment_stages(img, cfg.seg)
    region = stages["region"]
    _save_gray(out / "01_gray.png", stages["gray"])
    _save_mask(out / "02_binary.png", stages["binary"])
    _save_mask(out / "03_median.png", stages["median"])
    _save_mask(out / "04_filled.png", stages["filled"])
    _save_mask(out / "05_largest.png", stages["largest"])
    for radius in cfg.vein.radii:
        veins = vein_image(region.gray, region.mask, radius, cfg.vein)
        _save_mask(out / f"vein_r{radius}.png", veins)
    features = extract_features(img, cfg)
    layout = layout_for(cfg)
    lines = [f"threshold {stages['threshold']!r}", f"area {region.area}"]
    groups = [
        ("shape", features[layout.shape_slice]),
        ("color", features[layout.color_slice]),
        ("vein", features[layout.vein_slice]),
    ]
    for name, block in groups:
        lines.extend(f"{name}[{i}] {v!r}" for i, v in enumerate(block))
    (out / "features.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {5 + len(cfg.vein.radii)} images and features.txt to {out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="leafsearch",
        description="Content-based leaf image retrieval over a species-labeled corpus.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="index the reference side of a corpus")
    p.add_argument("root", help="corpus root (root/<species>/<image>)")
    p.add_argument("index", help="output index file")
    _add_config_flags(p)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="rank index species against one image")
    p.add_argument("index", help="index file from 'build'")
    p.add_argument("image", help="query image (PNG or JPEG)")
    p.add_argument("--top-n", type=int, default=5, help="distinct species to return")
    p.add_argument("--ws", type=float, help="shape distance weight")
    p.add_argument("--wc", type=float, help="color distance weight")
    p.add_argument("--wv", type=float, help="vein distance weight")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("evaluate", help="reference/test split accuracy report")
    p.add_argument("root", help="corpus root (root/<species>/<image>)")
    p.add_argument("--report", help="also write the machine-readable report here")
    _add_config_flags(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("debug", help="dump per-stage images and the feature vector")
    p.add_argument("image", help="input image")
    p.add_argument("out_dir", help="directory for the stage dumps")
    _add_config_flags(p, split_flags=False)
    p.set_defaults(func=cmd_debug)

    return parser


def main(argv=None):
    logging.basicConfig(stream=sys.stderr, format="%(levelname)s %(message)s")
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except LeafSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
