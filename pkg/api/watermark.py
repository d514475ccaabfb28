import asyncio
import base64
import binascii
import logging
from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field
from starlette.concurrency import run_in_threadpool

import bench
from attacks import apply_attack, expand_attacks, parse_attack
from codec import Watermark, embed_image, extract_image, parse_key
from complexity import dataset_stats
from errors import InputError, WatermarkError
from EvaluationMemory import evaluation_memory
from image_core import GrayImage, image_from_bytes, image_to_png_bytes
from model.watermark_task import (BitConfidences, DatasetStats, EmbedConfig, EmbedReport, EvaluationReport,
                                  EvaluationRow)

logger = logging.getLogger(__name__)


class ImageRequest(BaseModel):
    image: str = Field(..., description="Base64-encoded image file (PNG, PGM, JPEG, ...)")


class EmbedReq(ImageRequest):
    key: str = Field(..., description="Secret key as hex")
    payload_len: int = Field(128, ge=1, description="L_w")
    payload: Optional[str] = Field(None, description="Optional ASCII '0'/'1' payload; overrides payload_len")
    config: EmbedConfig = Field(default_factory=EmbedConfig)
    stats: Optional[DatasetStats] = Field(None, description="Dataset statistics; defaults to the image's own")


class EmbedResp(BaseModel):
    is_success: bool = Field(..., description="task completed successfully or not")
    msg: str = Field(..., description="execution message")
    image: Optional[str] = Field(None, description="Base64 PNG of the watermarked image")
    report: Optional[EmbedReport] = None


class ExtractReq(ImageRequest):
    key: str = Field(..., description="Secret key as hex")
    payload_len: int = Field(128, ge=1, description="L_w")
    config: EmbedConfig = Field(default_factory=EmbedConfig)
    descramble: bool = Field(False, description="Undo key scrambling of a file payload")


class ExtractResp(BaseModel):
    is_success: bool = Field(..., description="task completed successfully or not")
    msg: str = Field(..., description="execution message")
    bits: Optional[str] = Field(None, description="Extracted bits as ASCII '0'/'1'")
    confidences: Optional[BitConfidences] = None


class AttackReq(ImageRequest):
    spec: str = Field(..., description='Attack spec, e.g. "jpeg:70"')
    seed: int = Field(0, ge=0)


class AttackResp(BaseModel):
    is_success: bool = Field(..., description="task completed successfully or not")
    msg: str = Field(..., description="execution message")
    image: Optional[str] = Field(None, description="Base64 PNG of the attacked image")


class EvaluateReq(ImageRequest):
    name: str = Field("image", description="Name recorded in the rows")
    keys: List[str] = Field(..., min_length=1, description="Secret keys as hex")
    attacks: List[str] = Field(default_factory=list, description="Attack specs or suite names")
    payload_len: int = Field(128, ge=1, description="L_w")
    config: EmbedConfig = Field(default_factory=EmbedConfig)
    stats: Optional[DatasetStats] = None


class EvaluateResp(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    is_success: bool = Field(..., description="task completed successfully or not")
    msg: str = Field(..., description="execution message")
    report: Optional[EvaluationReport] = None


class EvaluateEvent(BaseModel):
    """One websocket message: a row while running, the full report once done."""
    model_config = ConfigDict(ser_json_inf_nan="constants")

    done: bool = Field(..., description="True on the terminal message")
    is_success: bool = True
    msg: str = ""
    row: Optional[EvaluationRow] = None
    report: Optional[EvaluationReport] = None


def decode_image(data: str) -> GrayImage:
    try:
        raw = base64.b64decode(data, validate=True)
    except (binascii.Error, ValueError):
        raise InputError("Image field is not valid base64") from None
    try:
        return image_from_bytes(raw)
    except OSError as e:
        raise InputError("Image could not be decoded: {}".format(e)) from None


def encode_image(image: GrayImage) -> str:
    return base64.b64encode(image_to_png_bytes(image)).decode("ascii")


def _stats_for(image: GrayImage, stats: Optional[DatasetStats]) -> DatasetStats:
    return stats if stats is not None else dataset_stats([image])


async def embed(req: EmbedReq) -> EmbedResp:
    try:
        image = decode_image(req.image)
        payload = Watermark.from_text(req.payload) if req.payload else None
        payload_len = len(payload) if payload is not None else req.payload_len
        watermarked, report = await run_in_threadpool(
            embed_image, image, parse_key(req.key), payload_len, req.config, _stats_for(image, req.stats), payload)
    except WatermarkError as e:
        return EmbedResp(is_success=False, msg=str(e))
    return EmbedResp(is_success=True, msg="Successfully embedded watermark", image=encode_image(watermarked),
                     report=report)


async def extract(req: ExtractReq) -> ExtractResp:
    try:
        watermark, confidences = await run_in_threadpool(
            extract_image, decode_image(req.image), parse_key(req.key), req.payload_len, req.config,
            req.descramble)
    except WatermarkError as e:
        return ExtractResp(is_success=False, msg=str(e))
    return ExtractResp(is_success=True, msg="Successfully extracted watermark", bits=watermark.to_text(),
                       confidences=confidences)


async def attack(req: AttackReq) -> AttackResp:
    try:
        attacked = await run_in_threadpool(apply_attack, decode_image(req.image), parse_attack(req.spec, req.seed))
    except WatermarkError as e:
        return AttackResp(is_success=False, msg=str(e))
    return AttackResp(is_success=True, msg="Successfully applied {}".format(req.spec), image=encode_image(attacked))


async def evaluate(req: EvaluateReq, result_queue: asyncio.Queue = None) -> EvaluateResp:
    """
    Run the evaluation protocol on one image.

    With a result_queue every row is pushed as soon as its key finishes and a
    terminal EvaluateEvent closes the stream.
    """
    try:
        image = decode_image(req.image)
        keys = [parse_key(k) for k in req.keys]
        attacks = expand_attacks(req.attacks)
        stats = _stats_for(image, req.stats)
        memory = evaluation_memory()
        for key in keys:
            partial = await run_in_threadpool(bench.evaluate, image, [key], attacks, req.config, stats,
                                              req.payload_len, req.name, 1)
            memory.add_rows(partial.rows)
            if result_queue is not None:
                for row in partial.rows:
                    await result_queue.put(EvaluateEvent(done=False, row=row))
        report = bench.assemble_report(memory.get_all_rows(), attacks, keys, req.config, stats, req.payload_len)
    except WatermarkError as e:
        if result_queue is not None:
            await result_queue.put(EvaluateEvent(done=True, is_success=False, msg=str(e)))
        return EvaluateResp(is_success=False, msg=str(e))
    if result_queue is not None:
        await result_queue.put(EvaluateEvent(done=True, msg="Evaluation completed", report=report))
    logger.info("Evaluated %s with %d keys and %d attacks", req.name, len(keys), len(attacks))
    return EvaluateResp(is_success=True, msg="Successfully evaluated", report=report)
