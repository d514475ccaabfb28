"""
Two-level complexity hierarchy.

Pixel complexity is the summed absolute luminance difference to the eight
neighbours. Averaged over an image it ranks the image inside a dataset
(inter-image strength); averaged over a block it drives the per-block
strength along the scan (intra-image strength).
"""
import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple, Union

import numpy as np

from errors import DimensionError, InputError
from image_core import CoeffGrid, GrayImage
from model.watermark_task import DatasetStats, StrengthParams

logger = logging.getLogger(__name__)

GUARD_EPS = 1e-9

_NEIGHBOUR_OFFSETS = [(dr, dc) for dr in (-1, 0, 1) for dc in (-1, 0, 1) if (dr, dc) != (0, 0)]


def _activity(values: np.ndarray) -> np.ndarray:
    """Pixel complexity of the interior of the last two axes."""
    h, w = values.shape[-2], values.shape[-1]
    centre = values[..., 1:h - 1, 1:w - 1]
    total = np.zeros_like(centre)
    for dr, dc in _NEIGHBOUR_OFFSETS:
        total += np.abs(centre - values[..., 1 + dr:h - 1 + dr, 1 + dc:w - 1 + dc])
    return total


def _as_values(grid: Union[CoeffGrid, GrayImage]) -> np.ndarray:
    if isinstance(grid, GrayImage):
        return grid.as_float()
    return np.asarray(grid, dtype=np.float64)


def complexity_map(grid: Union[CoeffGrid, GrayImage]) -> np.ndarray:
    values = _as_values(grid)
    if values.ndim != 2 or values.shape[0] < 3 or values.shape[1] < 3:
        raise DimensionError("complexity input", values.shape, "needs at least 3x3 samples")
    return _activity(values)


def block_complexity(block: CoeffGrid) -> float:
    return float(complexity_map(block).mean())


def block_complexities(stack: np.ndarray) -> np.ndarray:
    """block_complexity over a stack of blocks shaped (n, L, L)."""
    stack = np.asarray(stack, dtype=np.float64)
    if stack.ndim != 3 or stack.shape[1] < 3 or stack.shape[2] < 3:
        raise DimensionError("block stack", stack.shape, "needs blocks of at least 3x3 samples")
    return _activity(stack).mean(axis=(1, 2))


def image_mean_complexity(image: Union[GrayImage, CoeffGrid]) -> float:
    return float(complexity_map(image).mean())


def dataset_stats(images: Iterable[GrayImage]) -> DatasetStats:
    means = [image_mean_complexity(image) for image in images]
    if not means:
        raise InputError("dataset_stats needs at least one image")
    return DatasetStats(mu_D=float(np.mean(means)), sigma_D=float(np.std(means)), image_count=len(means))


def initial_alpha(mu_i: float, stats: DatasetStats, alpha0: float) -> float:
    if alpha0 <= 0:
        raise InputError("alpha0 must be positive, got {}".format(alpha0))
    if stats.mu_D <= 0:
        return alpha0
    # two-sided: images more than one sigma away from the dataset mean in either direction
    if abs(mu_i - stats.mu_D) <= stats.sigma_D:
        return alpha0
    return alpha0 * (mu_i / stats.mu_D)


@dataclass(frozen=True)
class StrengthState:
    alpha_i: float
    alpha_m: float
    prev_block_complexity: float

    @classmethod
    def start(cls, alpha_i: float, first_complexity: float) -> "StrengthState":
        return cls(alpha_i=alpha_i, alpha_m=alpha_i, prev_block_complexity=first_complexity)


def relative_change(prev: float, current: float) -> float:
    if prev <= GUARD_EPS and current <= GUARD_EPS:
        return 0.0
    return (current - prev) / max(prev, GUARD_EPS)


def next_alpha(state: StrengthState, C_m: float, params: StrengthParams) -> StrengthState:
    gamma = relative_change(state.prev_block_complexity, C_m)
    if gamma < 0:
        alpha = max((1.0 + gamma) * state.alpha_m / params.S, params.T1 * state.alpha_i)
    else:
        alpha = min(params.S * (1.0 + gamma) * state.alpha_m, params.T2 * state.alpha_i)
    return StrengthState(alpha_i=state.alpha_i, alpha_m=alpha, prev_block_complexity=C_m)


def alpha_sequence(complexities: Sequence[float], alpha_i: float,
                   params: StrengthParams) -> Tuple[np.ndarray, int]:
    """
    Fold next_alpha along a scan. The first block uses alpha_i.

    :return: per-block strengths and the number of blocks whose predecessor was flat
    """
    complexities = np.asarray(complexities, dtype=np.float64)
    alphas = np.empty(len(complexities))
    if len(complexities) == 0:
        return alphas, 0
    state = StrengthState.start(alpha_i, float(complexities[0]))
    alphas[0] = state.alpha_m
    guarded = 0
    for m in range(1, len(complexities)):
        if state.prev_block_complexity <= GUARD_EPS:
            guarded += 1
        state = next_alpha(state, float(complexities[m]), params)
        alphas[m] = state.alpha_m
    if guarded:
        logger.debug("flat-predecessor guard engaged on %d of %d blocks", guarded, len(complexities))
    return alphas, guarded
