"""Feature assembly, corpus ingestion, and the persisted search index.

A feature vector is the concatenation [shape | color | vein] (24 + 9 + 4
= 37 values at the default configuration). The index holds one labeled
record per reference image plus per-dimension min/max statistics used to
normalize features before distances are taken.

Index file format (UTF-8 text):

    LEAFIDX 1 <dims>
    STATS <min_1> ... <min_dims> <max_1> ... <max_dims>
    CONFIG <key>=<value> ...
    REC\t<id>\t<species>\t<path>\t<f_1>\t...\t<f_dims>

Reals are written as shortest round-trip decimals, so save/load is an
exact round trip.
"""

import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from functools import partial
from pathlib import Path

import numpy as np

from .appearance import color_moments, vein_features
from .config import PipelineConfig
from .errors import (
    CorpusError,
    ExtractionError,
    LeafSearchError,
    MalformedIndexError,
    SplitError,
    VersionMismatchError,
)
from .imaging import load_image
from .segmentation import segment_leaf
from .shape import shape_descriptor

log = logging.getLogger("leafsearch")

IMAGE_EXTENSIONS = (".png", ".jpg", ".jpeg")

COLOR_DIM = 9
VEIN_DIM = 4

_MAGIC = "LEAFIDX"
_VERSION = "1"


@dataclass(frozen=True)
class FeatureLayout:
    """Group boundaries of a combined feature vector."""

    shape_dim: int

    @property
    def total(self):
        return self.shape_dim + COLOR_DIM + VEIN_DIM

    @property
    def shape_slice(self):
        return slice(0, self.shape_dim)

    @property
    def color_slice(self):
        return slice(self.shape_dim, self.shape_dim + COLOR_DIM)

    @property
    def vein_slice(self):
        return slice(self.shape_dim + COLOR_DIM, self.total)


def layout_for(cfg):
    return FeatureLayout(shape_dim=cfg.pft.m * cfg.pft.n)


@dataclass(eq=False)
class IndexRecord:
    id: int
    species: str
    path: str
    features: np.ndarray


@dataclass(eq=False)
class NormalizationStats:
    mins: np.ndarray
    maxs: np.ndarray


@dataclass(eq=False)
class Index:
    records: list
    stats: NormalizationStats
    config: PipelineConfig
    _normalized: np.ndarray = field(default=None, repr=False, compare=False)

    @property
    def dims(self):
        return self.stats.mins.size

    @property
    def layout(self):
        return layout_for(self.config)

    def normalized_matrix(self):
        """Records-by-dims matrix of normalized features (cached)."""
        if self._normalized is None:
            raw = np.stack([r.features for r in self.records])
            self._normalized = normalize_vector(raw, self.stats)
        return self._normalized


@dataclass
class ExtractionFailure:
    species: str
    path: str
    stage: str
    message: str


@dataclass
class SpeciesSplit:
    reference: list
    test: list


@dataclass
class DatasetSplit:
    by_species: dict

    def reference_entries(self):
        return [
            (species, path)
            for species in sorted(self.by_species)
            for path in self.by_species[species].reference
        ]

    def test_entries(self):
        return [
            (species, path)
            for species in sorted(self.by_species)
            for path in self.by_species[species].test
        ]


def extract_features(img, cfg=PipelineConfig()):
    """Segment the image and concatenate [shape | color | vein] features."""
    region = segment_leaf(img, cfg.seg)
    return np.concatenate(
        [
            shape_descriptor(region.mask, cfg.pft),
            color_moments(region.color, region.mask),
            vein_features(region.gray, region.mask, cfg.vein),
        ]
    )


def extract_features_from_file(root, relpath, cfg=PipelineConfig()):
    """Load one corpus image and extract its features.

    Pipeline errors are re-raised as ``ExtractionError`` carrying the
    offending path and failing stage.
    """
    path = Path(root) / relpath
    try:
        return extract_features(load_image(path), cfg)
    except LeafSearchError as exc:
        raise ExtractionError(relpath, exc) from exc
    except (OSError, ValueError) as exc:  # unreadable or undecodable file
        raise ExtractionError(relpath, exc) from exc


def ingest_dataset(root):
    """List a corpus laid out as ``root/<species>/<image>``.

    Returns (species, relative path) pairs, species sorted
    lexicographically and paths sorted within each species. Extensions
    are matched case-insensitively against .png/.jpg/.jpeg; other files
    are ignored.
    """
    root = Path(root)
    if not root.is_dir():
        raise CorpusError(f"corpus root does not exist: {root}")
    entries = []
    species_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    for sdir in species_dirs:
        files = sorted(
            f.name
            for f in sdir.iterdir()
            if f.is_file() and f.suffix.lower() in IMAGE_EXTENSIONS
        )
        if not files:
            raise CorpusError(f"species directory has no images: {sdir}")
        entries.extend((sdir.name, f"{sdir.name}/{name}") for name in files)
    if not entries:
        raise CorpusError(f"corpus root contains no species directories: {root}")
    return entries


def split_dataset(entries, n_ref, n_test, seed, permissive=False):
    """Per-species shuffled split into reference and test images.

    Each species is shuffled by its own deterministic generator (derived
    from ``seed`` and the species name), then the first ``n_ref`` paths
    become references and the next ``n_test`` become tests. Species with
    too few images raise ``SplitError``, or are scaled down
    proportionally (with a warning) when ``permissive`` is set.
    """
    if n_ref < 1 or n_test < 0:
        raise ValueError(f"need n_ref >= 1 and n_test >= 0, got {n_ref}/{n_test}")
    groups = {}
    for species, path in entries:
        groups.setdefault(species, []).append(path)
    by_species = {}
    total = n_ref + n_test
    for species in sorted(groups):
        paths = sorted(groups[species])
        rng = random.Random(f"{seed}\x1f{species}")
        rng.shuffle(paths)
        k = len(paths)
        take_ref, take_test = n_ref, n_test
        if k < total:
            if not permissive:
                raise SplitError(
                    f"species {species!r} has {k} images, fewer than "
                    f"n_ref + n_test = {total}"
                )
            take_ref = max(1, min(k - 1, round(k * n_ref / total))) if k > 1 else 1
            take_test = k - take_ref
            log.warning(
                "species %r has %d images; scaling split down to %d/%d",
                species, k, take_ref, take_test,
            )
        by_species[species] = SpeciesSplit(
            reference=paths[:take_ref],
            test=paths[take_ref : take_ref + take_test],
        )
    return DatasetSplit(by_species=by_species)


def _extract_entry(entry, root, cfg):
    species, relpath = entry
    try:
        return species, relpath, extract_features_from_file(root, relpath, cfg), None
    except ExtractionError as exc:
        return species, relpath, None, (exc.stage, str(exc))


def extract_batch(root, entries, cfg=PipelineConfig(), jobs=1):
    """Extract features for many corpus entries, isolating failures.

    Returns ``(successes, failures)`` where successes are (species, path,
    features) triples in input order. Failures are logged and collected,
    never raised.
    """
    worker = partial(_extract_entry, root=root, cfg=cfg)
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(worker, entries, chunksize=4))
    else:
        results = [worker(e) for e in entries]
    successes, failures = [], []
    for species, relpath, features, err in results:
        if err is not None:
            stage, message = err
            failures.append(ExtractionFailure(species, relpath, stage, message))
            log.warning("excluding %s (%s)", relpath, message)
        else:
            successes.append((species, relpath, features))
    return successes, failures


def build_index(root, entries, cfg=PipelineConfig(), jobs=1):
    """Extract features for every reference entry and assemble the index.

    Images that fail to segment are excluded and reported in the returned
    failure list (and logged); they never abort the build unless every
    image fails. Records are sorted by (species, path) and ids assigned
    after sorting, so rebuilds are deterministic regardless of ``jobs``.

    Returns ``(index, failures)``.
    """
    if not entries:
        raise CorpusError("no reference entries to index")
    ordered = sorted(entries, key=lambda e: (e[0], e[1]))
    successes, failures = extract_batch(root, ordered, cfg, jobs)
    if not successes:
        raise CorpusError(f"feature extraction failed for all {len(ordered)} images")
    records = [
        IndexRecord(id=i, species=species, path=relpath, features=features)
        for i, (species, relpath, features) in enumerate(successes)
    ]
    matrix = np.stack([r.features for r in records])
    stats = NormalizationStats(mins=matrix.min(axis=0), maxs=matrix.max(axis=0))
    return Index(records=records, stats=stats, config=cfg), failures


def normalize_vector(v, stats):
    """Min-max normalize feature values into [0, 1] per dimension.

    Dimensions with max == min map to 0; out-of-range query values are
    clamped. Accepts a single vector or a (records, dims) matrix.
    """
    v = np.asarray(v, dtype=np.float64)
    if v.shape[-1] != stats.mins.size:
        raise ValueError(
            f"vector has {v.shape[-1]} dimensions, stats have {stats.mins.size}"
        )
    span = stats.maxs - stats.mins
    safe = np.where(span > 0, span, 1.0)
    out = (v - stats.mins) / safe
    out = np.where(span > 0, out, 0.0)
    return np.clip(out, 0.0, 1.0)


def _fmt(x):
    return repr(float(x))


def save_index(index, path):
    """Write the index in the documented text format."""
    dims = index.dims
    lines = [f"{_MAGIC} {_VERSION} {dims}"]
    stats_vals = [_fmt(x) for x in index.stats.mins] + [_fmt(x) for x in index.stats.maxs]
    lines.append("STATS " + " ".join(stats_vals))
    lines.append("CONFIG " + " ".join(f"{k}={v}" for k, v in index.config.config_pairs()))
    for rec in index.records:
        for text, label in ((rec.species, "species"), (rec.path, "path")):
            if not text or "\t" in text or "\n" in text:
                raise ValueError(f"record {label} not representable in index format: {text!r}")
        fields = ["REC", str(rec.id), rec.species, rec.path]
        fields.extend(_fmt(x) for x in rec.features)
        lines.append("\t".join(fields))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def load_index(path):
    """Read an index file, validating magic, dimensions, and field counts."""
    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if len(lines) < 3:
        raise MalformedIndexError(f"{path}: truncated header ({len(lines)} lines)")
    head = lines[0].split()
    if len(head) != 3 or head[0] != _MAGIC or head[1] != _VERSION:
        raise VersionMismatchError(f"{path}:1: expected '{_MAGIC} {_VERSION} <dims>' header")
    try:
        dims = int(head[2])
    except ValueError:
        raise MalformedIndexError(f"{path}:1: bad dimension field {head[2]!r}") from None
    stats_parts = lines[1].split()
    if len(stats_parts) != 1 + 2 * dims or stats_parts[0] != "STATS":
        raise MalformedIndexError(
            f"{path}:2: expected STATS with {2 * dims} values, got {len(stats_parts) - 1}"
        )
    try:
        stats_vals = np.array([float(x) for x in stats_parts[1:]])
    except ValueError:
        raise MalformedIndexError(f"{path}:2: unparseable STATS value") from None
    stats = NormalizationStats(mins=stats_vals[:dims], maxs=stats_vals[dims:])
    config_parts = lines[2].split()
    if not config_parts or config_parts[0] != "CONFIG":
        raise MalformedIndexError(f"{path}:3: expected CONFIG line")
    pairs = {}
    for item in config_parts[1:]:
        if "=" not in item:
            raise MalformedIndexError(f"{path}:3: bad CONFIG item {item!r}")
        key, value = item.split("=", 1)
        pairs[key] = value
    try:
        cfg = PipelineConfig().with_pairs(pairs)
    except ValueError as exc:
        raise MalformedIndexError(f"{path}:3: {exc}") from None
    records = []
    seen_ids = set()
    for lineno, line in enumerate(lines[3:], start=4):
        if not line:
            continue
        fields = line.split("\t")
        if fields[0] != "REC":
            raise MalformedIndexError(f"{path}:{lineno}: expected REC line")
        if len(fields) != 4 + dims:
            raise MalformedIndexError(
                f"{path}:{lineno}: expected {4 + dims} fields, got {len(fields)}"
            )
        try:
            rid = int(fields[1])
            features = np.array([float(x) for x in fields[4:]])
        except ValueError:
            raise MalformedIndexError(f"{path}:{lineno}: unparseable REC field") from None
        if rid in seen_ids:
            raise MalformedIndexError(f"{path}:{lineno}: duplicate record id {rid}")
        seen_ids.add(rid)
        records.append(IndexRecord(id=rid, species=fields[2], path=fields[3], features=features))
    if layout_for(cfg).total != dims:
        raise MalformedIndexError(
            f"{path}: CONFIG implies {layout_for(cfg).total} dimensions, header says {dims}"
        )
    records.sort(key=lambda r: r.id)
    return Index(records=records, stats=stats, config=cfg)
