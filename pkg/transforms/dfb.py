"""
Four-band directional filter bank.

Two lifting levels run in place on the full grid. Level one splits the
quincunx lattice (r + c even / odd) with a fan-shaped neighbourhood, level
two splits each quincunx coset by column parity with a diagonal
neighbourhood. Both use the 9-7 lifting steps, so each level is the 1-D 9-7
bank mapped onto a 2-D frequency variable, and the four polyphase
components of the result are the four wedge subbands.

Subband k collects the sites

    k = 0: even rows, even columns      k = 2: odd rows, even columns
    k = 1: odd rows, odd columns        k = 3: even rows, odd columns

and its synthesis basis functions oscillate in one of the four 45 degree
orientation wedges.
"""
import logging
from typing import Callable, List, Sequence

import numpy as np

from errors import DimensionError
from image_core import CoeffGrid, require_multiple
from transforms.base import SubbandTransform
from transforms.filters import CDF_9_7_LIFTING, LiftingSteps

logger = logging.getLogger(__name__)

SUBBAND_COUNT = 4

_PHASES = ((0, 0), (1, 1), (1, 0), (0, 1))


def _fan(grid: CoeffGrid) -> CoeffGrid:
    p = np.pad(grid, 1, mode="reflect")
    return ((p[1:-1, :-2] + p[1:-1, 2:]) - (p[:-2, 1:-1] + p[2:, 1:-1])) / 2.0


def _diagonal(grid: CoeffGrid) -> CoeffGrid:
    p = np.pad(grid, 1, mode="reflect")
    return ((p[2:, 2:] + p[:-2, :-2]) - (p[2:, :-2] + p[:-2, 2:])) / 2.0


def _quincunx_mask(shape) -> np.ndarray:
    rows, cols = np.indices(shape)
    return (rows + cols) % 2 == 1


def _odd_column_mask(shape) -> np.ndarray:
    return np.broadcast_to(np.arange(shape[1]) % 2 == 1, shape)


class DirectionalFilterBank(SubbandTransform):
    transform_name = "DirectionalFilterBank"

    def __init__(self, steps: LiftingSteps = CDF_9_7_LIFTING):
        self.steps = steps

    def _levels(self, shape):
        return ((_quincunx_mask(shape), _fan), (_odd_column_mask(shape), _diagonal))

    def _forward(self, grid: CoeffGrid, odd: np.ndarray, neighbours: Callable) -> CoeffGrid:
        s = self.steps
        x = grid
        for coeff, target in ((s.predict1, odd), (s.update1, ~odd), (s.predict2, odd), (s.update2, ~odd)):
            x = x + coeff * np.where(target, neighbours(x), 0.0)
        return np.where(odd, x / s.scale, x * s.scale)

    def _inverse(self, grid: CoeffGrid, odd: np.ndarray, neighbours: Callable) -> CoeffGrid:
        s = self.steps
        x = np.where(odd, grid * s.scale, grid / s.scale)
        for coeff, target in ((s.update2, ~odd), (s.predict2, odd), (s.update1, ~odd), (s.predict1, odd)):
            x = x - coeff * np.where(target, neighbours(x), 0.0)
        return x

    def decompose(self, grid: CoeffGrid) -> List[CoeffGrid]:
        x = np.asarray(grid, dtype=np.float64)
        require_multiple("directional filter bank input", x.shape, 4)
        for odd, neighbours in self._levels(x.shape):
            x = self._forward(x, odd, neighbours)
        return [x[r::2, c::2].copy() for r, c in _PHASES]

    def reconstruct(self, subbands: Sequence[CoeffGrid]) -> CoeffGrid:
        if len(subbands) != SUBBAND_COUNT:
            raise DimensionError("subband list", (len(subbands),), "expected {} subbands".format(SUBBAND_COUNT))
        shape = np.shape(subbands[0])
        for band in subbands:
            if np.shape(band) != shape:
                raise DimensionError("directional subband", np.shape(band),
                                     "all subbands must be {}x{}".format(*shape))
        x = np.empty((shape[0] * 2, shape[1] * 2))
        for (r, c), band in zip(_PHASES, subbands):
            x[r::2, c::2] = band
        for odd, neighbours in reversed(self._levels(x.shape)):
            x = self._inverse(x, odd, neighbours)
        return x


_DEFAULT = DirectionalFilterBank()


def dfb_decompose(grid: CoeffGrid) -> List[CoeffGrid]:
    return _DEFAULT.decompose(grid)


def dfb_reconstruct(subbands: Sequence[CoeffGrid]) -> CoeffGrid:
    return _DEFAULT.reconstruct(subbands)
