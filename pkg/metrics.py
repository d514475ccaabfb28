import math

import numpy as np
from scipy import ndimage

from errors import InputError
from image_core import GrayImage
from model.watermark_task import SimilarityResult

PEAK = 255.0
SSIM_K1 = 0.01
SSIM_K2 = 0.03
SSIM_SIGMA = 1.5
# 11x11 support: scipy uses radius int(truncate * sigma + 0.5) = 5
_SSIM_TRUNCATE = 3.5
_SSIM_RADIUS = 5

DEFAULT_DETECTION_THRESHOLD = 0.2


def _pair(a: GrayImage, b: GrayImage):
    if a.samples.shape != b.samples.shape:
        raise InputError("Images differ in size: {}x{} vs {}x{}".format(a.width, a.height, b.width, b.height))
    return a.as_float(), b.as_float()


def psnr(a: GrayImage, b: GrayImage) -> float:
    """PSNR in dB; identical images give math.inf."""
    x, y = _pair(a, b)
    mse = float(np.mean((x - y) ** 2))
    if mse == 0:
        return math.inf
    return 10.0 * math.log10(PEAK ** 2 / mse)


def ssim(a: GrayImage, b: GrayImage) -> float:
    """Mean SSIM over all positions where the 11x11 Gaussian window fits."""
    x, y = _pair(a, b)
    if min(x.shape) < 2 * _SSIM_RADIUS + 1:
        raise InputError("SSIM needs images of at least 11x11, got {}x{}".format(a.width, a.height))
    c1 = (SSIM_K1 * PEAK) ** 2
    c2 = (SSIM_K2 * PEAK) ** 2

    def blur(values):
        return ndimage.gaussian_filter(values, SSIM_SIGMA, truncate=_SSIM_TRUNCATE, mode="reflect")

    mu_x, mu_y = blur(x), blur(y)
    var_x = blur(x * x) - mu_x ** 2
    var_y = blur(y * y) - mu_y ** 2
    cov = blur(x * y) - mu_x * mu_y
    ssim_map = ((2 * mu_x * mu_y + c1) * (2 * cov + c2)) / ((mu_x ** 2 + mu_y ** 2 + c1) * (var_x + var_y + c2))
    r = _SSIM_RADIUS
    return float(ssim_map[r:-r, r:-r].mean())


def similarity(original, extracted) -> SimilarityResult:
    """NC and BER between two bit streams (Watermark objects or 0/1 sequences)."""
    w = np.asarray(getattr(original, "bits", original), dtype=np.float64)
    v = np.asarray(getattr(extracted, "bits", extracted), dtype=np.float64)
    if w.shape != v.shape or w.ndim != 1 or w.size == 0:
        raise InputError("Bit streams differ in length: {} vs {}".format(w.size, v.size))
    ber = float(np.count_nonzero(w != v)) / w.size
    norm = math.sqrt(float(np.dot(w, w)) * float(np.dot(v, v)))
    if norm == 0:
        nc = 1.0 if not w.any() and not v.any() else 0.0
    else:
        nc = float(np.dot(w, v)) / norm
    return SimilarityResult(nc=min(nc, 1.0), ber=ber)


def detect(result: SimilarityResult, threshold: float = DEFAULT_DETECTION_THRESHOLD) -> bool:
    """True when the extracted stream is close enough to claim the key's watermark is present."""
    return result.ber <= threshold
