import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from codec import Watermark
from errors import InputError
from image_core import GrayImage
from metrics import detect, psnr, similarity, ssim


def _flat(value, size=16):
    return GrayImage(np.full((size, size), value, dtype=np.uint8))


def test_psnr_examples(cover):
    assert psnr(cover, cover) == math.inf
    shifted = GrayImage(cover.samples + 1)
    assert psnr(cover, shifted) == pytest.approx(48.1308, abs=1e-3)
    assert psnr(_flat(0), _flat(255)) == pytest.approx(0.0)


def test_psnr_rejects_size_mismatch():
    with pytest.raises(InputError):
        psnr(_flat(0, 16), _flat(0, 32))


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 60), st.integers(1, 60))
def test_psnr_decreases_with_error(d1, d2):
    base = _flat(100)
    assume(d1 != d2)
    low, high = sorted((d1, d2))
    assert psnr(base, _flat(100 + low)) > psnr(base, _flat(100 + high))


def test_ssim_examples(cover):
    assert ssim(cover, cover) == pytest.approx(1.0)
    c1 = (0.01 * 255) ** 2
    assert ssim(_flat(0), _flat(255)) == pytest.approx(c1 / (255 ** 2 + c1), rel=1e-6)
    jitter = np.random.default_rng(0).integers(-20, 21, cover.samples.shape)
    noisy = GrayImage(np.clip(cover.samples.astype(int) + jitter, 0, 255).astype(np.uint8))
    assert ssim(cover, noisy) == pytest.approx(ssim(noisy, cover))
    assert ssim(cover, noisy) < 1.0


def test_ssim_rejects_small_images():
    with pytest.raises(InputError):
        ssim(_flat(0, 10), _flat(0, 10))


def test_similarity_examples():
    bits = Watermark.from_text("10110010")
    assert similarity(bits, bits).nc == pytest.approx(1.0)
    assert similarity(bits, bits).ber == 0
    flipped = Watermark(1 - bits.bits)
    assert similarity(bits, flipped).ber == 1
    assert similarity(bits, flipped).nc == 0
    half = bits.bits.copy()
    half[:4] ^= 1
    assert similarity(bits, half).ber == 0.5


def test_similarity_zero_streams():
    zeros = [0, 0, 0, 0]
    assert similarity(zeros, zeros).nc == 1.0
    assert similarity(zeros, [0, 1, 0, 0]).nc == 0.0


def test_similarity_rejects_length_mismatch():
    with pytest.raises(InputError):
        similarity([0, 1], [0, 1, 1])


def test_detect_threshold():
    assert detect(similarity([1, 0, 1, 1, 0], [1, 0, 1, 1, 1]))
    assert not detect(similarity([1, 0, 1, 1, 0], [0, 1, 0, 1, 0]))
    assert detect(similarity([1, 0, 1, 1, 0], [0, 1, 0, 1, 0]), threshold=0.6)


bit_lists = st.integers(1, 64).flatmap(lambda n: st.tuples(*[st.lists(st.integers(0, 1), min_size=n, max_size=n)] * 3))


@settings(max_examples=100, deadline=None)
@given(bit_lists)
def test_ber_is_a_metric(triple):
    a, b, c = triple
    assert similarity(a, a).ber == 0
    assert similarity(a, b).ber == similarity(b, a).ber
    assert similarity(a, c).ber <= similarity(a, b).ber + similarity(b, c).ber + 1e-12
    assert -1.0 <= similarity(a, b).nc <= 1.0
