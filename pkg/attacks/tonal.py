import numpy as np

from attacks.base import Attack, to_gray
from image_core import GrayImage


class HistogramEqualization(Attack):
    """Global 256-bin equalization."""
    attack_name = "histeq"

    def validate(self):
        self.require(self.value is None, "takes no parameter")

    def apply(self, image: GrayImage) -> GrayImage:
        counts = np.bincount(image.samples.ravel(), minlength=256)
        cdf = np.cumsum(counts)
        lowest = cdf[np.flatnonzero(counts)[0]]
        total = cdf[-1]
        if total == lowest:
            return GrayImage(image.samples)
        lut = np.clip(np.rint((cdf - lowest) * 255.0 / (total - lowest)), 0, 255).astype(np.uint8)
        return GrayImage(lut[image.samples])


class Gamma(Attack):
    attack_name = "gamma"
    default_value = 0.8

    def validate(self):
        self.require(self.value > 0, "exponent must be positive")

    def apply(self, image: GrayImage) -> GrayImage:
        return to_gray(255.0 * (image.as_float() / 255.0) ** self.value)
