"""Synthetic leaf images for tests and the acceptance suite.

Each species is a parameter set (silhouette, base color, vein layout);
each image adds seeded per-image jitter (pose, size, color, noise, a few
dark background speckles). Intensities are kept bimodal: leaf body below
0.6, background near 0.93, so the adaptive threshold always has a clear
valley.
"""

import numpy as np
from PIL import Image


def leaf_geometry(h, w, cx, cy, size, aspect, lobes, lobe_depth, tip, angle):
    """Leaf silhouette plus the rotated (u, v) frame used for veins."""
    yy, xx = np.mgrid[0:h, 0:w]
    dx, dy = xx - cx, yy - cy
    ca, sa = np.cos(angle), np.sin(angle)
    u = dx * ca + dy * sa
    v = -dx * sa + dy * ca
    s = np.hypot(u / (size * aspect), v / size)
    th = np.arctan2(v, u)
    rim = 1 + lobe_depth * np.cos(lobes * th) + tip * np.cos(th)
    return s <= rim, u, v, np.where(s > 0, s / np.maximum(rim, 1e-9), 0.0)


def species_params(i):
    """Deterministic parameter set for species index ``i``."""
    rng = np.random.default_rng(1000 + i)
    hues = [
        (0.18, 0.38, 0.16),
        (0.10, 0.30, 0.12),
        (0.30, 0.42, 0.14),
        (0.36, 0.26, 0.18),
        (0.16, 0.32, 0.30),
        (0.26, 0.36, 0.10),
        (0.12, 0.22, 0.20),
        (0.33, 0.35, 0.24),
    ]
    return {
        "aspect": 1.3 + 0.22 * (i % 5),
        "lobes": (0, 3, 5, 7)[i % 4],
        "lobe_depth": (0.0, 0.05, 0.09)[i % 3],
        "tip": 0.06 + 0.03 * (i % 3),
        "color": hues[i % len(hues)],
        "vein_spacing": (6.0, 9.0, 12.0, 7.5)[i % 4],
        "vein_delta": (0.05, 0.08, 0.065)[i % 3],
        "size_frac": 0.30 + 0.02 * (i % 3),
        "wiggle": rng.uniform(0, np.pi),
    }


def leaf_image(h, w, params, rng):
    """One (H, W, 3) float image in [0, 1] for a species parameter set."""
    angle = params["wiggle"] + rng.uniform(-0.3, 0.3)
    size = params["size_frac"] * min(h, w) * rng.uniform(0.9, 1.1)
    cx = w / 2 + rng.uniform(-4, 4)
    cy = h / 2 + rng.uniform(-4, 4)
    mask, u, v, s = leaf_geometry(
        h, w, cx, cy, size, params["aspect"], params["lobes"],
        params["lobe_depth"], params["tip"], angle,
    )
    img = np.full((h, w, 3), 0.93) + rng.normal(0.0, 0.008, (h, w, 3))
    shading = 1.0 - 0.30 * s
    veins = np.abs(v) < 0.7
    spacing = params["vein_spacing"]
    phase = rng.uniform(0, spacing)
    lateral = np.mod(u * 0.8 + np.abs(v) * 0.9 + phase, spacing) < 0.8
    veins |= lateral
    base = np.array(params["color"]) + rng.uniform(-0.02, 0.02, 3)
    body = base[None, None, :] * shading[:, :, None]
    body = body + params["vein_delta"] * veins[:, :, None]
    body = np.clip(body, 0.04, 0.58)
    img = np.where(mask[:, :, None], body, img)
    # a few dark single-pixel speckles in the background
    for _ in range(rng.integers(2, 6)):
        sy, sx = rng.integers(2, h - 2), rng.integers(2, w - 2)
        if not mask[max(0, sy - 2) : sy + 3, max(0, sx - 2) : sx + 3].any():
            img[sy, sx] = 0.2
    return np.clip(img, 0.0, 1.0)


def write_corpus(root, n_species=8, per_species=8, hw=(96, 128), seed=0):
    """Write a species-labeled PNG corpus; returns the species names."""
    h, w = hw
    names = []
    for i in range(n_species):
        species = f"sp{i:02d}"
        names.append(species)
        sdir = root / species
        sdir.mkdir(parents=True, exist_ok=True)
        params = species_params(i)
        for j in range(per_species):
            rng = np.random.default_rng((seed, i, j))
            img = leaf_image(h, w, params, rng)
            arr = np.round(img * 255).astype(np.uint8)
            Image.fromarray(arr, mode="RGB").save(sdir / f"img_{j:02d}.png")
    return names
