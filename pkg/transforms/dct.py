import numpy as np
from scipy import fft

from errors import DimensionError
from image_core import CoeffGrid


def _square_blocks(blocks) -> np.ndarray:
    blocks = np.asarray(blocks, dtype=np.float64)
    if blocks.ndim < 2 or blocks.shape[-1] != blocks.shape[-2] or blocks.shape[-1] == 0:
        raise DimensionError("DCT input", blocks.shape, "the last two axes must form a non-empty square block")
    return blocks


def dct2(block: CoeffGrid) -> CoeffGrid:
    """Orthonormal 2-D DCT-II over the last two axes, so stacks of blocks work too."""
    return fft.dctn(_square_blocks(block), type=2, norm="ortho", axes=(-2, -1))


def idct2(coeffs: CoeffGrid) -> CoeffGrid:
    return fft.idctn(_square_blocks(coeffs), type=2, norm="ortho", axes=(-2, -1))
