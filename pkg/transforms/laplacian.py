"""
One-level Laplacian pyramid with the 9-7 biorthogonal pair.

Reconstruction uses the dual-frame rule x = G(c - H d) + d rather than the
plain x = G c + d, so a modified coarse band reappears unchanged when the
result is decomposed again.
"""
import logging
from typing import Tuple

import numpy as np
from scipy import ndimage

from errors import DimensionError
from image_core import CoeffGrid, require_multiple
from transforms.base import SubbandTransform
from transforms.filters import CDF_9_7, FilterPair

logger = logging.getLogger(__name__)


def _separable(grid: CoeffGrid, taps: np.ndarray) -> CoeffGrid:
    # whole-sample symmetric extension keeps the symmetric filters aligned with the 2:1 lattice
    out = ndimage.convolve1d(grid, taps, axis=0, mode="mirror")
    return ndimage.convolve1d(out, taps, axis=1, mode="mirror")


class LaplacianPyramid(SubbandTransform):
    transform_name = "LaplacianPyramid"

    def __init__(self, filters: FilterPair = CDF_9_7):
        self.filters = filters

    def analyze(self, grid: CoeffGrid) -> CoeffGrid:
        """Lowpass then keep every second row and column."""
        return _separable(grid, self.filters.analysis)[::2, ::2]

    def synthesize(self, coarse: CoeffGrid) -> CoeffGrid:
        """Zero-insertion upsampling then lowpass."""
        up = np.zeros((coarse.shape[0] * 2, coarse.shape[1] * 2))
        up[::2, ::2] = coarse
        return _separable(up, self.filters.synthesis)

    def decompose(self, grid: CoeffGrid) -> Tuple[CoeffGrid, CoeffGrid]:
        grid = np.asarray(grid, dtype=np.float64)
        require_multiple("Laplacian pyramid input", grid.shape, 2)
        coarse = self.analyze(grid)
        return coarse, grid - self.synthesize(coarse)

    def reconstruct(self, subbands: Tuple[CoeffGrid, CoeffGrid]) -> CoeffGrid:
        coarse, bandpass = (np.asarray(s, dtype=np.float64) for s in subbands)
        if bandpass.shape != (coarse.shape[0] * 2, coarse.shape[1] * 2):
            raise DimensionError("bandpass", bandpass.shape,
                                 "must be twice the coarse band {}x{}".format(*coarse.shape))
        return self.synthesize(coarse - self.analyze(bandpass)) + bandpass


_DEFAULT = LaplacianPyramid()


def lp_decompose(grid: CoeffGrid) -> Tuple[CoeffGrid, CoeffGrid]:
    return _DEFAULT.decompose(grid)


def lp_reconstruct(coarse: CoeffGrid, bandpass: CoeffGrid) -> CoeffGrid:
    return _DEFAULT.reconstruct((coarse, bandpass))
