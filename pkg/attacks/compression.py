import io

import numpy as np
from PIL import Image

from attacks.base import Attack
from image_core import GrayImage, image_from_bytes


class Jpeg(Attack):
    """Baseline JPEG round trip through Pillow's IJG quality scaling."""
    attack_name = "jpeg"
    default_value = 70

    def validate(self):
        self.require(1 <= self.value <= 100 and self.value == int(self.value), "quality must be an integer in 1..100")

    def apply(self, image: GrayImage) -> GrayImage:
        buffer = io.BytesIO()
        Image.fromarray(np.array(image.samples)).save(buffer, format="JPEG", quality=int(self.value))
        return image_from_bytes(buffer.getvalue())
