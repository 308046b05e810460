"""Resolved pipeline configuration and its on-disk key=value form.

The nine keys written to index headers (and accepted from config files)
are: pft.m, pft.n, seg.nbins, seg.median_kernel, vein.tau, weights.ws,
weights.wc, weights.wv, split.seed.
"""

from dataclasses import dataclass, field, replace

from .appearance import VeinConfig
from .segmentation import SegmentationConfig
from .shape import PftConfig


@dataclass(frozen=True)
class Weights:
    """Relative importance of the shape, color, and vein distances."""

    ws: float = 0.55
    wc: float = 0.25
    wv: float = 0.20

    def __post_init__(self):
        if min(self.ws, self.wc, self.wv) < 0 or self.ws + self.wc + self.wv <= 0:
            raise ValueError(
                f"weights must be non-negative with a positive sum, "
                f"got ({self.ws}, {self.wc}, {self.wv})"
            )


@dataclass(frozen=True)
class PipelineConfig:
    seg: SegmentationConfig = field(default_factory=SegmentationConfig)
    pft: PftConfig = field(default_factory=PftConfig)
    vein: VeinConfig = field(default_factory=VeinConfig)
    weights: Weights = field(default_factory=Weights)
    split_seed: int = 0

    def config_pairs(self):
        """The documented header keys, in a fixed order."""
        return [
            ("pft.m", str(self.pft.m)),
            ("pft.n", str(self.pft.n)),
            ("seg.nbins", str(self.seg.nbins)),
            ("seg.median_kernel", str(self.seg.median_kernel)),
            ("vein.tau", repr(self.vein.tau)),
            ("weights.ws", repr(self.weights.ws)),
            ("weights.wc", repr(self.weights.wc)),
            ("weights.wv", repr(self.weights.wv)),
            ("split.seed", str(self.split_seed)),
        ]

    def with_pairs(self, pairs):
        """A copy updated from ``{key: value-string}`` pairs.

        Unknown keys raise ``ValueError``; keys not present keep their
        current values.
        """
        cfg = self
        for key, value in pairs.items():
            try:
                if key == "pft.m":
                    cfg = replace(cfg, pft=replace(cfg.pft, m=int(value)))
                elif key == "pft.n":
                    cfg = replace(cfg, pft=replace(cfg.pft, n=int(value)))
                elif key == "seg.nbins":
                    cfg = replace(cfg, seg=replace(cfg.seg, nbins=int(value)))
                elif key == "seg.median_kernel":
                    cfg = replace(cfg, seg=replace(cfg.seg, median_kernel=int(value)))
                elif key == "vein.tau":
                    cfg = replace(cfg, vein=replace(cfg.vein, tau=float(value)))
                elif key == "weights.ws":
                    cfg = replace(cfg, weights=replace(cfg.weights, ws=float(value)))
                elif key == "weights.wc":
                    cfg = replace(cfg, weights=replace(cfg.weights, wc=float(value)))
                elif key == "weights.wv":
                    cfg = replace(cfg, weights=replace(cfg.weights, wv=float(value)))
                elif key == "split.seed":
                    cfg = replace(cfg, split_seed=int(value))
                else:
                    raise ValueError(f"unknown configuration key {key!r}")
            except (TypeError, ValueError) as exc:
                if "unknown configuration key" in str(exc):
                    raise
                raise ValueError(f"bad value for {key}: {value!r}") from exc
        return cfg


def parse_config_file(path):
    """Read a flat ``key = value`` file; ``#`` starts a comment."""
    pairs = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
            key, value = line.split("=", 1)
            pairs[key.strip()] = value.strip()
    return pairs
