"""Weighted distance ranking and the retrieval evaluation report.

The dissimilarity between two normalized feature vectors is a weighted
mean of three Euclidean distances, one per feature group:

    d = (ws * d_shape + wc * d_color + wv * d_vein) / (ws + wc + wv)

A query returns the n closest distinct species (first-matching record
per species); a query counts as answered at top-n when its true species
appears among them.
"""

from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal, localcontext

import numpy as np

from .config import Weights
from .errors import EmptyIndexError
from .index import normalize_vector

__all__ = [
    "Weights",
    "RankedMatch",
    "EvaluationReport",
    "group_distance",
    "combined_distance",
    "rank_records",
    "query_top_n",
    "evaluate",
    "percent_text",
    "format_report",
    "report_lines",
]


@dataclass
class RankedMatch:
    rank: int
    record_id: int
    species: str
    distance: float


@dataclass
class EvaluationReport:
    """Per-species and aggregate top-n retrieval accuracy.

    ``per_species[species][n]`` and ``aggregate[n]`` hold (relevant,
    total) query counts.
    """

    per_species: dict
    aggregate: dict
    query_count: int
    failures: list


def group_distance(q, t):
    """Euclidean distance between two equal-length value lists."""
    q = np.asarray(q, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    if q.shape != t.shape:
        raise ValueError(f"length mismatch: {q.shape} vs {t.shape}")
    return float(np.sqrt(((q - t) ** 2).sum()))


def combined_distance(q, t, weights, layout):
    """Weighted mean of the shape, color, and vein group distances."""
    ds = group_distance(q[layout.shape_slice], t[layout.shape_slice])
    dc = group_distance(q[layout.color_slice], t[layout.color_slice])
    dv = group_distance(q[layout.vein_slice], t[layout.vein_slice])
    w = weights
    return (w.ws * ds + w.wc * dc + w.wv * dv) / (w.ws + w.wc + w.wv)


def _distances_to_records(index, q, weights):
    matrix = index.normalized_matrix()
    layout = index.layout
    out = np.zeros(matrix.shape[0])
    for w, sl in (
        (weights.ws, layout.shape_slice),
        (weights.wc, layout.color_slice),
        (weights.wv, layout.vein_slice),
    ):
        out += w * np.sqrt(((matrix[:, sl] - q[sl]) ** 2).sum(axis=1))
    return out / (weights.ws + weights.wc + weights.wv)


def rank_records(index, q, weights=None):
    """All records ordered by combined distance to the normalized query.

    Ties are broken by ascending record id. Returns a list of
    ``RankedMatch`` covering the whole index.
    """
    if not index.records:
        raise EmptyIndexError("cannot rank against an index with no records")
    weights = weights if weights is not None else index.config.weights
    dist = _distances_to_records(index, np.asarray(q, dtype=np.float64), weights)
    order = np.argsort(dist, kind="stable")  # records are id-sorted
    return [
        RankedMatch(
            rank=i + 1,
            record_id=index.records[j].id,
            species=index.records[j].species,
            distance=float(dist[j]),
        )
        for i, j in enumerate(order)
    ]


def query_top_n(index, q, n=5, weights=None):
    """The ``n`` closest distinct species for a normalized query vector.

    The record ranking is collapsed to species in first-occurrence order;
    each returned row is the best-ranked record of its species.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    ranked = rank_records(index, q, weights)
    out, seen = [], set()
    for match in ranked:
        if match.species in seen:
            continue
        seen.add(match.species)
        out.append(
            RankedMatch(
                rank=len(out) + 1,
                record_id=match.record_id,
                species=match.species,
                distance=match.distance,
            )
        )
        if len(out) == n:
            break
    return out


def evaluate(index, tests, ns=(1, 3, 5), weights=None, failures=()):
    """Score labeled test vectors against the index.

    ``tests`` holds (species, raw feature vector) pairs; vectors are
    normalized against the index statistics here. A query is relevant at
    top-n when its true species is among the n closest distinct species.
    """
    if not tests:
        raise ValueError("no test queries to evaluate")
    ns = tuple(ns)
    deepest = max(ns)
    per_species = {}
    aggregate = {n: [0, 0] for n in ns}
    for species, raw in tests:
        q = normalize_vector(np.asarray(raw, dtype=np.float64), index.stats)
        top = query_top_n(index, q, deepest, weights)
        found_at = next(
            (m.rank for m in top if m.species == species), deepest + 1
        )
        rows = per_species.setdefault(species, {n: [0, 0] for n in ns})
        for n in ns:
            hit = found_at <= n
            rows[n][0] += hit
            rows[n][1] += 1
            aggregate[n][0] += hit
            aggregate[n][1] += 1
    return EvaluationReport(
        per_species={
            s: {n: tuple(v) for n, v in rows.items()}
            for s, rows in sorted(per_species.items())
        },
        aggregate={n: tuple(v) for n, v in aggregate.items()},
        query_count=len(tests),
        failures=list(failures),
    )


def percent_text(relevant, total):
    """Percentage with two decimals, rounded half up (93.125 -> '93.13')."""
    with localcontext() as ctx:
        ctx.prec = 50
        pct = Decimal(relevant) * 100 / Decimal(total)
        return str(pct.quantize(Decimal("0.01"), rounding=ROUND_HALF_UP))


def _row(name, cells, widths):
    return "  ".join([name.ljust(widths[0])] + [c.rjust(w) for c, w in zip(cells, widths[1:])])


def format_report(report, ns=(1, 3, 5)):
    """Human-readable accuracy table, one row per species plus aggregate."""
    widths = [max([len("AGGREGATE")] + [len(s) for s in report.per_species])]
    widths += [7] * len(ns) + [7]
    header = _row("species", [f"top-{n}" for n in ns] + ["queries"], widths)
    lines = [header, "-" * len(header)]
    for species, rows in report.per_species.items():
        cells = [percent_text(*rows[n]) for n in ns]
        cells.append(str(rows[ns[0]][1]))
        lines.append(_row(species, cells, widths))
    lines.append("-" * len(header))
    agg = [percent_text(*report.aggregate[n]) for n in ns]
    agg.append(str(report.query_count))
    lines.append(_row("AGGREGATE", agg, widths))
    return "\n".join(lines)


def report_lines(report, config_pairs=None, ns=(1, 3, 5)):
    """Machine-readable report: one line per species, then AGGREGATE.

    The resolved configuration rides along as a leading ``#`` comment.
    """
    lines = []
    if config_pairs:
        lines.append("# CONFIG " + " ".join(f"{k}={v}" for k, v in config_pairs))
    for species, rows in report.per_species.items():
        cells = " ".join(percent_text(*rows[n]) for n in ns)
        lines.append(f"{species} {cells}")
    agg = " ".join(percent_text(*report.aggregate[n]) for n in ns)
    lines.append(f"AGGREGATE {agg}")
    return lines
