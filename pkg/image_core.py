import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Tuple, Union

import numpy as np
from PIL import Image

from errors import DimensionError, InputError

logger = logging.getLogger(__name__)

# Row-major real coefficients (subband or DCT data).
CoeffGrid = np.ndarray


@dataclass(frozen=True)
class GrayImage:
    """8-bit luminance image, samples[row, col]."""
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples)
        if samples.ndim != 2 or samples.size == 0:
            raise DimensionError("GrayImage", samples.shape, "expected a non-empty 2-D grid")
        if samples.dtype != np.uint8:
            if np.any(samples < 0) or np.any(samples > 255) or np.any(samples != np.round(samples)):
                raise InputError("GrayImage samples must be integers in [0, 255]")
            samples = samples.astype(np.uint8)
        samples = samples.copy()
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def width(self) -> int:
        return self.samples.shape[1]

    @property
    def height(self) -> int:
        return self.samples.shape[0]

    def as_float(self) -> CoeffGrid:
        return self.samples.astype(np.float64)


@dataclass(frozen=True)
class BlockGrid:
    block_side: int
    rows: int
    cols: int
    # shape (rows, cols, block_side, block_side)
    blocks: np.ndarray

    def in_order(self, order: List[Tuple[int, int]]) -> np.ndarray:
        """Stack of blocks, shape (len(order), L, L), following a scan order."""
        idx = np.asarray(order, dtype=np.intp).reshape(-1, 2)
        return self.blocks[idx[:, 0], idx[:, 1]]

    def replaced(self, order: List[Tuple[int, int]], stack: np.ndarray) -> "BlockGrid":
        idx = np.asarray(order, dtype=np.intp).reshape(-1, 2)
        blocks = self.blocks.copy()
        blocks[idx[:, 0], idx[:, 1]] = stack
        return BlockGrid(self.block_side, self.rows, self.cols, blocks)


def require_multiple(what: str, shape, multiple: int):
    if len(shape) != 2 or shape[0] % multiple or shape[1] % multiple or shape[0] == 0 or shape[1] == 0:
        raise DimensionError(what, shape, "both sides must be positive multiples of {}".format(multiple))


def partition(grid: CoeffGrid, block_side: int) -> BlockGrid:
    grid = np.asarray(grid, dtype=np.float64)
    if block_side < 1:
        raise InputError("block_side must be positive, got {}".format(block_side))
    require_multiple("grid", grid.shape, block_side)
    rows, cols = grid.shape[0] // block_side, grid.shape[1] // block_side
    blocks = grid.reshape(rows, block_side, cols, block_side).swapaxes(1, 2).copy()
    return BlockGrid(block_side, rows, cols, blocks)


def retile(blocks: BlockGrid) -> CoeffGrid:
    side = blocks.block_side
    return blocks.blocks.swapaxes(1, 2).reshape(blocks.rows * side, blocks.cols * side).copy()


def serpentine_order(rows: int, cols: int) -> List[Tuple[int, int]]:
    """Row 0 left to right, row 1 right to left, and so on."""
    if rows < 1 or cols < 1:
        raise InputError("serpentine_order needs rows, cols >= 1, got {}x{}".format(rows, cols))
    order = []
    for r in range(rows):
        columns = range(cols) if r % 2 == 0 else range(cols - 1, -1, -1)
        order.extend((r, c) for c in columns)
    return order


def quantize(grid: CoeffGrid) -> Tuple[GrayImage, int]:
    """Round to nearest and clamp into [0, 255]; also returns how many samples were clipped."""
    rounded = np.rint(np.asarray(grid, dtype=np.float64))
    clipped = int(np.count_nonzero((rounded < 0) | (rounded > 255)))
    if clipped:
        logger.warning("Clamped %d samples into [0, 255] on write-back", clipped)
    return GrayImage(np.clip(rounded, 0, 255).astype(np.uint8)), clipped


def _to_luminance(img: Image.Image) -> GrayImage:
    if img.mode in ("I;16", "I;16B", "I"):
        arr = np.asarray(img, dtype=np.float64)
        peak = 65535.0 if arr.max() > 255 else 255.0
        return GrayImage(np.clip(np.rint(arr * 255.0 / peak), 0, 255).astype(np.uint8))
    if img.mode != "L":
        # PIL's "L" conversion uses the ITU-R BT.601 luma weights
        img = img.convert("RGB").convert("L")
    return GrayImage(np.asarray(img, dtype=np.uint8))


def load_image(path: Union[str, Path]) -> GrayImage:
    with Image.open(path) as img:
        img.load()
        return _to_luminance(img)


def save_image(image: GrayImage, path: Union[str, Path]):
    path = Path(path)
    fmt = "PPM" if path.suffix.lower() in (".pgm", ".pnm") else None
    Image.fromarray(np.array(image.samples)).save(path, format=fmt)


def image_from_bytes(data: bytes) -> GrayImage:
    with Image.open(io.BytesIO(data)) as img:
        img.load()
        return _to_luminance(img)


def image_to_png_bytes(image: GrayImage) -> bytes:
    buffer = io.BytesIO()
    Image.fromarray(np.array(image.samples)).save(buffer, format="PNG")
    return buffer.getvalue()


def normalized_view(grid: CoeffGrid) -> GrayImage:
    """Affine map of a real grid onto [0, 255] for inspection."""
    grid = np.asarray(grid, dtype=np.float64)
    lo, hi = float(grid.min()), float(grid.max())
    if hi - lo < 1e-12:
        return GrayImage(np.full(grid.shape, 128, dtype=np.uint8))
    return GrayImage(np.rint((grid - lo) * (255.0 / (hi - lo))).astype(np.uint8))
