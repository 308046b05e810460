import numpy as np
import pytest

from synthleaf import write_corpus


@pytest.fixture(scope="session")
def synth_corpus(tmp_path_factory):
    """A written-to-disk synthetic corpus: (root, species names, per-species count)."""
    root = tmp_path_factory.mktemp("corpus")
    names = write_corpus(root, n_species=8, per_species=8, seed=7)
    return root, names, 8


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """A smaller corpus for CLI round trips: 4 species x 4 images."""
    root = tmp_path_factory.mktemp("small_corpus")
    names = write_corpus(root, n_species=4, per_species=4, seed=11)
    return root, names, 4


def square_canvas(hole=True, specks=()):
    """64x64 bright canvas with a dark 20x20 square at rows/cols 22..41.

    ``hole`` cuts a 2x2 background-colored hole in the middle of the
    square; ``specks`` is an iterable of single dark background pixels.
    """
    img = np.full((64, 64, 3), 0.95)
    img[22:42, 22:42] = 0.2
    if hole:
        img[30:32, 30:32] = 0.95
    for y, x in specks:
        img[y, x] = 0.2
    return img


def solid_square_mask():
    mask = np.zeros((64, 64), dtype=bool)
    mask[22:42, 22:42] = True
    return mask


@pytest.fixture
def leaf_fixture_mask():
    """A leaf-like silhouette used by the shape-invariance tests."""
    from synthleaf import leaf_geometry

    mask, _, _, _ = leaf_geometry(
        200, 260, cx=130, cy=100, size=55, aspect=2.0,
        lobes=5, lobe_depth=0.08, tip=0.12, angle=0.4,
    )
    return mask
