import numpy as np
from scipy import ndimage

from attacks.base import Attack, to_gray
from image_core import GrayImage

# separable 3x3 binomial approximation of a Gaussian
_SMOOTH_3 = np.array([1.0, 2.0, 1.0]) / 4.0


class Median(Attack):
    attack_name = "median"
    default_value = 3

    def validate(self):
        self.require(self.value in (3, 5, 7), "window must be 3, 5 or 7")

    def apply(self, image: GrayImage) -> GrayImage:
        return GrayImage(ndimage.median_filter(image.samples, size=int(self.value), mode="mirror"))


class Sharpen(Attack):
    """Unsharp mask: in + amount * (in - smooth(in))."""
    attack_name = "sharpen"
    default_value = 1.0

    def validate(self):
        self.require(0 <= self.value, "amount must be non-negative")

    def apply(self, image: GrayImage) -> GrayImage:
        values = image.as_float()
        smooth = ndimage.convolve1d(values, _SMOOTH_3, axis=0, mode="mirror")
        smooth = ndimage.convolve1d(smooth, _SMOOTH_3, axis=1, mode="mirror")
        return to_gray(values + self.value * (values - smooth))
