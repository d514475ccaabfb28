import math

import numpy as np
from PIL import Image
from scipy import ndimage

from attacks.base import Attack, to_gray
from image_core import GrayImage

CROP_FILL = 128


class Rotate(Attack):
    """Bilinear rotation about the centre and back again; only the interpolation damage remains."""
    attack_name = "rotate"
    default_value = 20

    def validate(self):
        self.require(math.isfinite(self.value), "angle must be finite")

    def apply(self, image: GrayImage) -> GrayImage:
        if self.value % 360 == 0:
            return GrayImage(image.samples)
        turned = ndimage.rotate(image.as_float(), self.value, reshape=False, order=1, mode="nearest")
        return to_gray(ndimage.rotate(turned, -self.value, reshape=False, order=1, mode="nearest"))


class Crop(Attack):
    """Keep the centred region holding (1 - ratio) of the area; the rest becomes mid-gray."""
    attack_name = "crop"
    default_value = 0.25

    def validate(self):
        self.require(0 < self.value < 1, "ratio must lie in (0, 1)")

    def retained_window(self, height: int, width: int):
        side = math.sqrt(1.0 - self.value)
        keep_h, keep_w = round(height * side), round(width * side)
        top, left = (height - keep_h) // 2, (width - keep_w) // 2
        return top, left, keep_h, keep_w

    def apply(self, image: GrayImage) -> GrayImage:
        top, left, keep_h, keep_w = self.retained_window(image.height, image.width)
        out = np.full(image.samples.shape, CROP_FILL, dtype=np.uint8)
        out[top:top + keep_h, left:left + keep_w] = image.samples[top:top + keep_h, left:left + keep_w]
        return GrayImage(out)


class Resize(Attack):
    """Bilinear scaling by the factor and back to the original size."""
    attack_name = "resize"
    default_value = 0.5

    def validate(self):
        self.require(0 < self.value <= 4, "scale must lie in (0, 4]")

    def apply(self, image: GrayImage) -> GrayImage:
        size = (max(1, round(image.width * self.value)), max(1, round(image.height * self.value)))
        scaled = Image.fromarray(np.array(image.samples)).resize(size, Image.Resampling.BILINEAR)
        restored = scaled.resize((image.width, image.height), Image.Resampling.BILINEAR)
        return GrayImage(np.asarray(restored, dtype=np.uint8))
