import numpy as np
import pytest

from attacks import ATTACK_SUITES, apply_attack, attack_classes, build_attack, expand_attacks, parse_attack
from attacks.geometric import CROP_FILL, Crop
from errors import InputError
from image_core import GrayImage
from metrics import psnr
from model.watermark_task import AttackSpec

ALL_FAMILIES = ["jpeg", "rotate", "crop", "resize", "gn", "sp", "median", "histeq", "gamma", "sharpen"]


def test_registry_knows_every_family():
    assert sorted(attack_classes) == sorted(ALL_FAMILIES)


@pytest.mark.parametrize("spec", ATTACK_SUITES["all"])
def test_dimensions_are_preserved(cover, spec):
    attacked = apply_attack(cover, spec)
    assert attacked.samples.shape == cover.samples.shape
    assert attacked.samples.dtype == np.uint8


@pytest.mark.parametrize("spec", ["gamma:1", "rotate:0", "rotate:360", "sharpen:0"])
def test_identity_parameters(cover, spec):
    np.testing.assert_array_equal(apply_attack(cover, spec).samples, cover.samples)


def test_median_of_constant_image_is_identity():
    flat = GrayImage(np.full((32, 32), 77, dtype=np.uint8))
    for window in (3, 5, 7):
        np.testing.assert_array_equal(apply_attack(flat, "median:{}".format(window)).samples, flat.samples)


@pytest.mark.parametrize("family", ["gn", "sp"])
def test_noise_is_deterministic_per_seed(cover, family):
    first = apply_attack(cover, parse_attack(family, seed=3))
    second = apply_attack(cover, parse_attack(family, seed=3))
    other = apply_attack(cover, parse_attack(family, seed=4))
    np.testing.assert_array_equal(first.samples, second.samples)
    assert not np.array_equal(first.samples, other.samples)


def test_salt_pepper_density():
    gray = GrayImage(np.full((512, 512), 128, dtype=np.uint8))
    attacked = apply_attack(gray, parse_attack("sp:0.01", seed=11))
    changed = np.count_nonzero(attacked.samples != 128) / attacked.samples.size
    assert 0.008 <= changed <= 0.012
    assert set(np.unique(attacked.samples)) <= {0, 128, 255}


def test_crop_changes_only_the_border(cover):
    crop = Crop(0.25)
    top, left, keep_h, keep_w = crop.retained_window(cover.height, cover.width)
    assert keep_h * keep_w == pytest.approx(0.75 * cover.width * cover.height, rel=0.02)
    attacked = crop.apply(cover).samples
    inside = np.zeros(attacked.shape, dtype=bool)
    inside[top:top + keep_h, left:left + keep_w] = True
    np.testing.assert_array_equal(attacked[inside], cover.samples[inside])
    assert np.all(attacked[~inside] == CROP_FILL)


def test_jpeg_quality_100_is_near_lossless(textured_images):
    for image in textured_images:
        assert psnr(image, apply_attack(image, "jpeg:100")) >= 40


def test_lower_jpeg_quality_loses_more(cover):
    assert psnr(cover, apply_attack(cover, "jpeg:90")) > psnr(cover, apply_attack(cover, "jpeg:10"))


def test_histeq_spreads_the_range(cover):
    attacked = apply_attack(cover, "histeq").samples
    assert attacked.min() == 0 and attacked.max() == 255


def test_gamma_below_one_brightens(cover):
    assert apply_attack(cover, "gamma:0.5").samples.mean() > cover.samples.mean()


def test_parse_attack():
    assert parse_attack("jpeg:70") == AttackSpec(name="jpeg", value=70)
    assert parse_attack(" HistEq ").label() == "histeq"
    assert parse_attack("crop:0.10").label() == "crop:0.1"
    assert build_attack(parse_attack("rotate")).value == 20


@pytest.mark.parametrize("text", ["blur:3", "jpeg:abc", "jpeg:0", "jpeg:50.5", "median:4", "crop:1",
                                  "resize:5", "gamma:0", "sp:2", "gn:-0.1", "sharpen:-1", "histeq:5"])
def test_parse_attack_rejects_bad_specs(text):
    with pytest.raises(InputError):
        parse_attack(text)


def test_suites_expand_and_deduplicate():
    assert len(expand_attacks("table")) == 12
    everything = expand_attacks("all")
    assert len(everything) == 21
    assert len({a.label() for a in everything}) == 21
    assert [a.label() for a in expand_attacks("jpeg:70, median, jpeg:70")] == ["jpeg:70", "median:3", "median:5",
                                                                              "median:7"]
    assert expand_attacks("") == []
