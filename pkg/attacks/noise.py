import numpy as np

from attacks.base import Attack, to_gray
from image_core import GrayImage


class GaussianNoise(Attack):
    """Additive zero-mean noise; the variance is given on the [0, 1] intensity scale."""
    attack_name = "gn"
    default_value = 0.005

    def validate(self):
        self.require(0 <= self.value <= 1, "variance must lie in [0, 1]")

    def apply(self, image: GrayImage) -> GrayImage:
        rng = np.random.default_rng(self.seed)
        noise = rng.normal(0.0, np.sqrt(self.value) * 255.0, size=image.samples.shape)
        return to_gray(image.as_float() + noise)


class SaltPepper(Attack):
    attack_name = "sp"
    default_value = 0.01

    def validate(self):
        self.require(0 <= self.value <= 1, "density must lie in [0, 1]")

    def apply(self, image: GrayImage) -> GrayImage:
        rng = np.random.default_rng(self.seed)
        draw = rng.random(image.samples.shape)
        out = np.array(image.samples)
        out[draw < self.value / 2] = 0
        out[(draw >= self.value / 2) & (draw < self.value)] = 255
        return GrayImage(out)
