import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from complexity import dataset_stats  # noqa: E402
from image_core import GrayImage  # noqa: E402
from model.watermark_task import EmbedConfig  # noqa: E402


def make_textured(seed: int, size: int = 128) -> GrayImage:
    """Smooth shading, a periodic pattern and a noisy quadrant, kept away from 0 and 255."""
    rng = np.random.default_rng(seed)
    r, c = np.mgrid[0:size, 0:size].astype(np.float64)
    base = 128 + 35 * np.sin(2 * np.pi * r / (13 + seed)) * np.cos(2 * np.pi * c / 29) + 0.15 * (r - c)
    noisy = (r >= size // 2) & (c < size // 2)
    base = base + np.where(noisy, rng.normal(0, 14, size=(size, size)), rng.normal(0, 3, size=(size, size)))
    return GrayImage(np.clip(np.rint(base), 40, 215).astype(np.uint8))


@pytest.fixture(scope="session")
def textured_images():
    return [make_textured(seed) for seed in range(4)]


@pytest.fixture(scope="session")
def cover(textured_images):
    return textured_images[0]


@pytest.fixture(scope="session")
def stats(textured_images):
    return dataset_stats(textured_images)


@pytest.fixture
def config():
    return EmbedConfig()
