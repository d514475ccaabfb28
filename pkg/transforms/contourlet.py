import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Union

import numpy as np

from errors import DimensionError
from image_core import CoeffGrid, GrayImage, normalized_view, require_multiple, save_image
from transforms.base import SubbandTransform
from transforms.dfb import SUBBAND_COUNT, DirectionalFilterBank
from transforms.laplacian import LaplacianPyramid

logger = logging.getLogger(__name__)


@dataclass
class SubbandSet:
    """One pyramid level: coarse band (M/2 x N/2) and four directional bands (M/2 x N/2 each)."""
    approximate: CoeffGrid
    details: List[CoeffGrid] = field(default_factory=list)

    def copy(self) -> "SubbandSet":
        return SubbandSet(self.approximate.copy(), [d.copy() for d in self.details])

    def named(self):
        """(name, grid) pairs, approximate first."""
        yield "approximate", self.approximate
        for k, band in enumerate(self.details):
            yield "detail_{}".format(k), band


class ContourletTransform(SubbandTransform):
    transform_name = "ContourletTransform"

    def __init__(self, pyramid: LaplacianPyramid = None, bank: DirectionalFilterBank = None):
        self.pyramid = pyramid or LaplacianPyramid()
        self.bank = bank or DirectionalFilterBank()

    def decompose(self, grid: Union[CoeffGrid, GrayImage]) -> SubbandSet:
        values = grid.as_float() if isinstance(grid, GrayImage) else np.asarray(grid, dtype=np.float64)
        require_multiple("contourlet input", values.shape, 4)
        coarse, bandpass = self.pyramid.decompose(values)
        return SubbandSet(coarse, self.bank.decompose(bandpass))

    def reconstruct(self, subbands: SubbandSet) -> CoeffGrid:
        if len(subbands.details) != SUBBAND_COUNT:
            raise DimensionError("detail subbands", (len(subbands.details),),
                                 "expected {}".format(SUBBAND_COUNT))
        bandpass = self.bank.reconstruct(subbands.details)
        return self.pyramid.reconstruct((subbands.approximate, bandpass))


_DEFAULT = ContourletTransform()


def ct_decompose(image: Union[GrayImage, CoeffGrid]) -> SubbandSet:
    return _DEFAULT.decompose(image)


def ct_reconstruct(subbands: SubbandSet) -> CoeffGrid:
    return _DEFAULT.reconstruct(subbands)


def dump_subbands(subbands: SubbandSet, directory: Union[str, Path], prefix: str = "") -> List[Path]:
    """Write every subband as a normalized 8-bit PGM for inspection."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for name, band in subbands.named():
        path = directory / "{}{}.pgm".format(prefix, name)
        save_image(normalized_view(band), path)
        written.append(path)
    logger.info("Wrote %d subband views to %s", len(written), directory)
    return written
