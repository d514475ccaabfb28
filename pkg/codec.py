"""
Blind embedding and extraction.

The payload is replicated cyclically over the serpentine block scan of every
subband (bit index = scan position mod L_w). Each block carries one bit in
the sign of the difference between two DCT coefficients; the extractor
reads every block and takes a weighted majority per payload index.
"""
import logging
from dataclasses import dataclass
from typing import List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from complexity import alpha_sequence, block_complexities, image_mean_complexity, initial_alpha
from errors import CapacityError, InputError
from image_core import CoeffGrid, GrayImage, partition, quantize, require_multiple, retile, serpentine_order
from model.watermark_task import (BitConfidences, DatasetStats, EmbedConfig, EmbedReport, Position,
                                  ReplicationPlan, ScaleStrength)
from transforms import SubbandSet, ct_decompose, ct_reconstruct, dct2, idct2

logger = logging.getLogger(__name__)

SecretKey = int

_MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class Watermark:
    bits: np.ndarray

    def __post_init__(self):
        bits = np.asarray(self.bits)
        if bits.ndim != 1 or bits.size == 0:
            raise InputError("A watermark needs at least one bit")
        if np.any((bits != 0) & (bits != 1)):
            raise InputError("Watermark bits must be 0 or 1")
        bits = bits.astype(np.uint8)
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    def __len__(self):
        return int(self.bits.size)

    def __eq__(self, other):
        return isinstance(other, Watermark) and np.array_equal(self.bits, other.bits)

    def __hash__(self):
        return hash(self.bits.tobytes())

    def to_text(self) -> str:
        return "".join("1" if b else "0" for b in self.bits)

    @classmethod
    def from_text(cls, text: str) -> "Watermark":
        """Parse ASCII '0'/'1' characters; whitespace is ignored."""
        chars = "".join(text.split())
        if not chars or set(chars) - {"0", "1"}:
            raise InputError("Payload text must contain only '0' and '1' characters")
        return cls(np.frombuffer(chars.encode("ascii"), dtype=np.uint8) - ord("0"))


class ExtractionVote(NamedTuple):
    bit: int
    weight: float


def parse_key(text: Union[str, int]) -> SecretKey:
    if isinstance(text, int):
        key = text
    else:
        try:
            digits = text.strip().lower()
            key = int(digits[2:] if digits.startswith("0x") else digits, 16)
        except ValueError:
            raise InputError("Key must be hexadecimal, got {!r}".format(text)) from None
    if not 0 <= key <= _MASK64:
        raise InputError("Key must fit in 64 bits")
    return key


def format_key(key: SecretKey) -> str:
    return "{:016x}".format(key)


def _splitmix64(state: int):
    while True:
        state = (state + _GOLDEN) & _MASK64
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        yield z ^ (z >> 31)


def keystream(key: SecretKey, L_w: int) -> Watermark:
    if L_w < 1:
        raise InputError("L_w must be at least 1, got {}".format(L_w))
    words = _splitmix64(parse_key(key))
    chunks = [next(words).to_bytes(8, "big") for _ in range((L_w + 63) // 64)]
    bits = np.unpackbits(np.frombuffer(b"".join(chunks), dtype=np.uint8))
    return Watermark(bits[:L_w])


def scramble(payload: Union[Watermark, Sequence[int]], key: SecretKey) -> Watermark:
    """XOR with the key stream; applying it twice gives the payload back."""
    payload = payload if isinstance(payload, Watermark) else Watermark(np.asarray(payload))
    return Watermark(payload.bits ^ keystream(key, len(payload)).bits)


def replication_plan(M: int, N: int, L_w: int, config: EmbedConfig) -> ReplicationPlan:
    if L_w < 1:
        raise InputError("L_w must be at least 1, got {}".format(L_w))
    rho = M * N / L_w
    blocks_approx = (M // 2 // config.L_AB) * (N // 2 // config.L_AB)
    blocks_detail = (M // 2 // config.L_DB) * (N // 2 // config.L_DB)
    largest = max(blocks_approx, blocks_detail)
    if largest < L_w:
        raise CapacityError(L_w, largest)
    return ReplicationPlan(
        rho=rho,
        blocks_approx=blocks_approx,
        blocks_per_detail_subband=blocks_detail,
        redundancy_approx=rho / (4 * config.L_AB ** 2),
        redundancy_detail=rho / config.L_DB ** 2,
    )


def _push_apart(a, c, alpha, bits):
    """Vectorized pair update; returns the new pair and a mask of pairs left as they were."""
    a = np.asarray(a, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    alpha = np.asarray(alpha, dtype=np.float64)
    one = np.asarray(bits) == 1
    holds = np.where(one, a > c + alpha, a + alpha < c)
    mean = (a + c) / 2.0
    half = np.where(one, alpha, -alpha) / 2.0
    return np.where(holds, a, mean + half), np.where(holds, c, mean - half), holds


def _read_pairs(a, c):
    diff = np.asarray(a, dtype=np.float64) - np.asarray(c, dtype=np.float64)
    return (diff > 0).astype(np.uint8), np.abs(diff)


def _zero_based(positions: Tuple[Position, Position]):
    (u, v), (w, z) = positions
    return (u - 1, v - 1), (w - 1, z - 1)


def embed_bit(coeffs: CoeffGrid, positions: Tuple[Position, Position], alpha_m: float, b: int) -> CoeffGrid:
    if alpha_m <= 0:
        raise InputError("alpha_m must be positive, got {}".format(alpha_m))
    out = np.array(coeffs, dtype=np.float64)
    first, second = _zero_based(positions)
    out[first], out[second], _ = _push_apart(out[first], out[second], alpha_m, b)
    return out


def read_bit(coeffs: CoeffGrid, positions: Tuple[Position, Position]) -> ExtractionVote:
    first, second = _zero_based(positions)
    bits, weights = _read_pairs(coeffs[first], coeffs[second])
    return ExtractionVote(int(bits), float(weights))


def _scales(subbands: SubbandSet, config: EmbedConfig):
    """(name, grid, block side, positions) for every subband, approximate first."""
    for name, grid in subbands.named():
        if name == "approximate":
            yield name, grid, config.L_AB, config.approx_positions
        else:
            yield name, grid, config.L_DB, config.detail_positions


def _block_stack(grid: CoeffGrid, side: int):
    blocks = partition(grid, side)
    order = serpentine_order(blocks.rows, blocks.cols)
    return blocks, order, blocks.in_order(order)


def _embed_subband(name: str, grid: CoeffGrid, side: int, positions, bits: np.ndarray,
                   alpha_i: float, config: EmbedConfig) -> Tuple[CoeffGrid, ScaleStrength]:
    blocks, order, stack = _block_stack(grid, side)
    n = len(order)
    if config.adaptive:
        alphas, guarded = alpha_sequence(block_complexities(stack), alpha_i, config.strength)
    else:
        alphas, guarded = np.full(n, alpha_i), 0
    coeffs = dct2(stack)
    first, second = _zero_based(positions)
    rows = np.arange(n)
    payload = bits[rows % len(bits)]
    new_a, new_c, holds = _push_apart(coeffs[(rows,) + first], coeffs[(rows,) + second], alphas, payload)
    coeffs[(rows,) + first] = new_a
    coeffs[(rows,) + second] = new_c
    if guarded:
        logger.warning("%s: flat-predecessor guard engaged on %d of %d blocks", name, guarded, n)
    strength = ScaleStrength(
        scale=name,
        alpha_i=alpha_i,
        alpha_mean=float(alphas.mean()),
        alpha_min=float(alphas.min()),
        alpha_max=float(alphas.max()),
        guard_engaged=guarded,
        unchanged_blocks=int(np.count_nonzero(holds)),
    )
    return retile(blocks.replaced(order, idct2(coeffs))), strength


def _check_dimensions(image: GrayImage, config: EmbedConfig):
    require_multiple("image", (image.height, image.width), config.dimension_multiple())


def scale_alpha(mu_i: float, stats: DatasetStats, alpha0: float, config: EmbedConfig) -> float:
    """alpha_i of one scale.

    Fixed at alpha0 in non-adaptive mode. Otherwise the dataset ranking is held inside
    [alpha_i_floor, alpha_i_ceiling] * alpha0; the default band collapses onto alpha0.
    """
    if not config.adaptive:
        return alpha0
    params = config.strength
    ranked = initial_alpha(mu_i, stats, alpha0)
    alpha_i = max(ranked, params.alpha_i_floor * alpha0)
    if params.alpha_i_ceiling is not None:
        alpha_i = min(alpha_i, params.alpha_i_ceiling * alpha0)
    if alpha_i != ranked:
        logger.debug("ranked alpha_i %.3f held at %.3f", ranked, alpha_i)
    return alpha_i


def embed_image(image: GrayImage, key: SecretKey, L_w: int, config: EmbedConfig, stats: DatasetStats,
                payload: Optional[Watermark] = None) -> Tuple[GrayImage, EmbedReport]:
    _check_dimensions(image, config)
    plan = replication_plan(image.height, image.width, L_w, config)
    if payload is None:
        bits = keystream(key, L_w).bits
    else:
        if len(payload) != L_w:
            raise InputError("Payload has {} bits but L_w is {}".format(len(payload), L_w))
        bits = scramble(payload, key).bits

    mu_i = image_mean_complexity(image)
    alpha_approx = scale_alpha(mu_i, stats, config.strength.alpha0_approx, config)
    alpha_detail = scale_alpha(mu_i, stats, config.strength.alpha0_detail, config)
    logger.info("Embedding %d bits into %dx%d image, mu_i=%.3f, alpha_i=(%.3f, %.3f), adaptive=%s",
                L_w, image.width, image.height, mu_i, alpha_approx, alpha_detail, config.adaptive)

    subbands = ct_decompose(image)
    marked = SubbandSet(subbands.approximate, [])
    scales: List[ScaleStrength] = []
    for name, grid, side, positions in _scales(subbands, config):
        alpha_i = alpha_approx if name == "approximate" else alpha_detail
        new_grid, strength = _embed_subband(name, grid, side, positions, bits, alpha_i, config)
        scales.append(strength)
        if name == "approximate":
            marked.approximate = new_grid
        else:
            marked.details.append(new_grid)

    watermarked, clamped = quantize(ct_reconstruct(marked))
    report = EmbedReport(
        width=image.width,
        height=image.height,
        payload_len=L_w,
        mean_complexity=mu_i,
        plan=plan,
        scales=scales,
        clamped_pixels=clamped,
        config=config.model_dump(),
    )
    return watermarked, report


def extract_image(image: GrayImage, key: SecretKey, L_w: int, config: EmbedConfig,
                  descramble: bool = False) -> Tuple[Watermark, BitConfidences]:
    """
    Weighted majority over every replica of every payload index across the five subbands.

    Only the watermarked image, the key, L_w and the block layout are used.
    The key is needed only when descramble is set.
    """
    if L_w < 1:
        raise InputError("L_w must be at least 1, got {}".format(L_w))
    _check_dimensions(image, config)
    weight_one = np.zeros(L_w)
    weight_zero = np.zeros(L_w)
    votes = np.zeros(L_w, dtype=np.int64)
    for name, grid, side, positions in _scales(ct_decompose(image), config):
        _, order, stack = _block_stack(grid, side)
        coeffs = dct2(stack)
        first, second = _zero_based(positions)
        rows = np.arange(len(order))
        bits, weights = _read_pairs(coeffs[(rows,) + first], coeffs[(rows,) + second])
        index = rows % L_w
        weight_one += np.bincount(index, weights=weights * bits, minlength=L_w)
        weight_zero += np.bincount(index, weights=weights * (1 - bits), minlength=L_w)
        votes += np.bincount(index, minlength=L_w)

    missing = int(np.count_nonzero(votes == 0))
    if missing:
        logger.warning("%d of %d payload bits have no replica in this image", missing, L_w)
    decided = (weight_one > weight_zero).astype(np.uint8)
    total = weight_one + weight_zero
    margin = np.divide(np.abs(weight_one - weight_zero), total, out=np.zeros(L_w), where=total > 0)
    watermark = Watermark(decided)
    if descramble:
        watermark = scramble(watermark, key)
    confidences = BitConfidences(
        weight_one=weight_one.tolist(),
        weight_zero=weight_zero.tolist(),
        votes=votes.tolist(),
        margin=margin.tolist(),
    )
    return watermark, confidences
