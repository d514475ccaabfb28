from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

Position = Tuple[int, int]


class StrengthParams(BaseModel):
    alpha0_approx: float = Field(11.0, gt=0, description="Initial strength factor for the approximate scale")
    alpha0_detail: float = Field(9.0, gt=0, description="Initial strength factor for the detail subbands")
    S: float = Field(1.1, ge=1.0, description="Scaling factor between complexity change and strength change")
    T1: float = Field(0.5, gt=0.0, le=1.0, description="Lower clamp, alpha_m >= T1 * alpha_i")
    T2: float = Field(1.0, ge=1.0, description="Upper clamp, alpha_m <= T2 * alpha_i")
    alpha_i_floor: float = Field(1.0, gt=0.0, description="alpha_i >= alpha_i_floor * alpha_0 in adaptive mode")
    alpha_i_ceiling: Optional[float] = Field(
        1.0, gt=0.0, description="alpha_i <= alpha_i_ceiling * alpha_0 in adaptive mode, None leaves it unbounded")

    @model_validator(mode="after")
    def check_alpha_i_band(self):
        if self.alpha_i_ceiling is not None and self.alpha_i_ceiling < self.alpha_i_floor:
            raise ValueError("alpha_i_ceiling must not be below alpha_i_floor")
        return self


class EmbedConfig(BaseModel):
    L_AB: int = Field(4, ge=3, description="Block side in the approximate scale")
    L_DB: int = Field(16, ge=3, description="Block side in the detail subbands")
    approx_positions: Tuple[Position, Position] = Field(
        ((3, 4), (4, 3)), description="1-based DCT coordinates (u,v),(w,z) in approximate blocks")
    detail_positions: Tuple[Position, Position] = Field(
        ((14, 15), (15, 14)), description="1-based DCT coordinates (u,v),(w,z) in detail blocks")
    strength: StrengthParams = Field(default_factory=StrengthParams, description="Strength parameters")
    adaptive: bool = Field(True, description="False embeds with the fixed alpha_0 of each scale everywhere")

    @model_validator(mode="after")
    def check_positions(self):
        for side, positions, name in ((self.L_AB, self.approx_positions, "approx_positions"),
                                      (self.L_DB, self.detail_positions, "detail_positions")):
            if positions[0] == positions[1]:
                raise ValueError("{} must name two distinct coefficients".format(name))
            for u, v in positions:
                if not (1 <= u <= side and 1 <= v <= side):
                    raise ValueError("{} entry ({}, {}) lies outside a {}x{} block".format(name, u, v, side, side))
        return self

    def dimension_multiple(self) -> int:
        """Image sides must be multiples of this value."""
        return int(np.lcm.reduce([4, 2 * self.L_AB, 2 * self.L_DB]))

    def with_adaptive(self, adaptive: bool) -> "EmbedConfig":
        return self.model_copy(update={"adaptive": adaptive})


class DatasetStats(BaseModel):
    mu_D: float = Field(..., ge=0, description="Mean of the per-image mean complexities")
    sigma_D: float = Field(..., ge=0, description="Population standard deviation of the per-image mean complexities")
    image_count: int = Field(..., ge=1, description="Number of images the statistics were computed on")


class ReplicationPlan(BaseModel):
    rho: float = Field(..., description="Ratio M*N / L_w")
    blocks_approx: int = Field(..., description="Number of blocks in the approximate scale")
    blocks_per_detail_subband: int = Field(..., description="Number of blocks in each detail subband")
    redundancy_approx: float = Field(..., description="Payload copies in the approximate scale")
    redundancy_detail: float = Field(..., description="Payload copies over the four detail subbands")


class ScaleStrength(BaseModel):
    scale: str = Field(..., description="approximate or detail_<k>")
    alpha_i: float = Field(..., description="Initial strength factor of the scale")
    alpha_mean: float = Field(..., description="Mean block strength")
    alpha_min: float = Field(..., description="Smallest block strength")
    alpha_max: float = Field(..., description="Largest block strength")
    guard_engaged: int = Field(..., description="Blocks whose predecessor was flat")
    unchanged_blocks: int = Field(..., description="Blocks that already carried their bit with margin")


class EmbedReport(BaseModel):
    width: int = Field(..., description="Image width")
    height: int = Field(..., description="Image height")
    payload_len: int = Field(..., description="L_w")
    mean_complexity: float = Field(..., description="mu_i of the cover image")
    plan: ReplicationPlan
    scales: List[ScaleStrength]
    clamped_pixels: int = Field(..., description="Pixels clipped into [0,255] on write-back")
    config: dict = Field(..., description="Resolved EmbedConfig")


class BitConfidences(BaseModel):
    weight_one: List[float] = Field(..., description="Summed vote weight for bit 1 per payload index")
    weight_zero: List[float] = Field(..., description="Summed vote weight for bit 0 per payload index")
    votes: List[int] = Field(..., description="Number of replicas read per payload index")
    margin: List[float] = Field(..., description="|w1 - w0| / (w1 + w0), 0 when no weight")


class SimilarityResult(BaseModel):
    nc: float = Field(..., ge=-1.0, le=1.0, description="Normalized correlation")
    ber: float = Field(..., ge=0.0, le=1.0, description="Bit error rate")


class EvaluationRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    image: str = Field(..., description="Image name")
    key: str = Field(..., description="Secret key as 16 hex digits")
    attack: str = Field(..., description="Attack spec string, 'none' for fidelity rows")
    adaptive: bool = Field(..., description="Embedding mode")
    psnr: float = Field(..., description="PSNR of watermarked vs original")
    ssim: float = Field(..., description="SSIM of watermarked vs original")
    nc: float = Field(..., description="NC of extracted vs embedded payload")
    ber: float = Field(..., description="BER of extracted vs embedded payload")
    alpha_mean_approx: float = Field(..., description="Mean approximate-scale block strength")
    alpha_mean_detail: float = Field(..., description="Mean detail-scale block strength")


class AggregateRow(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    attack: str = Field(..., description="Attack spec string")
    adaptive: bool = Field(..., description="Embedding mode")
    runs: int = Field(..., description="Number of member rows")
    psnr: float = Field(..., description="Mean PSNR")
    ssim: float = Field(..., description="Mean SSIM")
    nc: float = Field(..., description="Mean NC")
    ber: float = Field(..., description="Mean BER")


class ManifestEntry(BaseModel):
    name: str = Field(..., description="File name")
    sha256: str = Field(..., description="Digest of the file bytes")
    width: int
    height: int


class EvaluationReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    config: dict = Field(..., description="Resolved EmbedConfig")
    stats: DatasetStats
    payload_len: int = Field(..., description="L_w")
    keys: List[str] = Field(..., description="Keys used, in run order")
    attacks: List[str] = Field(..., description="Attack specs, in run order")
    manifest: List[ManifestEntry] = Field(default_factory=list, description="Corpus manifest")
    rows: List[EvaluationRow] = Field(default_factory=list)
    aggregates: List[AggregateRow] = Field(default_factory=list)


class ModeDelta(BaseModel):
    attack: str
    delta_psnr: float = Field(..., description="Mean PSNR adaptive minus non-adaptive")
    delta_ber: float = Field(..., description="Mean BER adaptive minus non-adaptive")


class ModeComparison(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    adaptive: EvaluationReport
    non_adaptive: EvaluationReport
    deltas: List[ModeDelta]


class SweepPoint(BaseModel):
    value: float = Field(..., description="Attack parameter value")
    adaptive: bool
    nc: float
    ber: float


class SweepReport(BaseModel):
    model_config = ConfigDict(ser_json_inf_nan="constants")

    family: str = Field(..., description="Attack family name")
    config: dict
    keys: List[str]
    manifest: List[ManifestEntry] = Field(default_factory=list)
    points: List[SweepPoint] = Field(default_factory=list)


class BenchSettings(BaseModel):
    runs: int = Field(20, ge=1, description="Number of keys per image")
    first_key: int = Field(1, ge=0, description="Keys are first_key, first_key+1, ...")
    payload_len: int = Field(128, ge=1, description="L_w")
    attacks: List[str] = Field(default_factory=list, description="Attack specs or suite names")
    compare_modes: bool = Field(False, description="Also run the non-adaptive baseline")
    workers: int = Field(1, ge=1, description="Worker processes")


class AttackSpec(BaseModel):
    name: str = Field(..., description="Attack family, e.g. jpeg, rotate, crop")
    value: Optional[float] = Field(None, description="Family parameter; None uses the family default")
    seed: int = Field(0, ge=0, description="Seed for the noise families")

    def label(self) -> str:
        if self.value is None:
            return self.name
        return "{}:{:g}".format(self.name, self.value)
