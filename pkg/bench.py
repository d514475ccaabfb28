"""
Experiment orchestration: embed, attack, extract and score over a corpus.

Work is split into (image, key) jobs. Jobs run in a process pool when more
than one worker is configured, and results are merged in a fixed order so
the reports do not depend on the worker count.
"""
import csv
import hashlib
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np
from tqdm import tqdm

from attacks import apply_attack, expand_attacks, parse_attack
from codec import SecretKey, embed_image, extract_image, format_key, keystream
from complexity import dataset_stats
from errors import InputError, WatermarkError
from EvaluationMemory import evaluation_memory
from image_core import GrayImage, load_image, require_multiple
from metrics import psnr, similarity, ssim
from model.watermark_task import (AttackSpec, BenchSettings, DatasetStats, EmbedConfig, EvaluationReport,
                                  EvaluationRow, ManifestEntry, ModeComparison, ModeDelta, SweepPoint, SweepReport)

logger = logging.getLogger(__name__)

IMAGE_SUFFIXES = (".png", ".pgm", ".pnm", ".jpg", ".jpeg", ".tif", ".tiff", ".bmp")

SWEEP_GRIDS: Dict[str, List[float]] = {
    "jpeg": [float(q) for q in range(10, 101, 10)],
    "crop": [0.1, 0.2, 0.3, 0.4, 0.5],
    "sp": [0.01, 0.02, 0.03, 0.04, 0.05],
    "gn": [0.001, 0.002, 0.004, 0.006, 0.008, 0.01],
}

CSV_COLUMNS = ["image", "key", "attack", "adaptive", "psnr", "ssim", "nc", "ber",
               "alpha_mean_approx", "alpha_mean_detail"]


class CorpusImage(NamedTuple):
    name: str
    image: GrayImage


def default_workers() -> int:
    return max(1, int(os.getenv("CTWM_WORKERS", "1")))


def load_corpus(directory: Union[str, Path], config: Optional[EmbedConfig] = None
                ) -> Tuple[List[CorpusImage], List[ManifestEntry]]:
    """
    Read every image file in a directory, sorted by name.

    Files whose size the block layout of config cannot tile are skipped with a warning.
    """
    directory = Path(directory)
    if not directory.is_dir():
        raise InputError("Corpus directory {} does not exist".format(directory))
    multiple = (config or EmbedConfig()).dimension_multiple()
    corpus, manifest = [], []
    for path in sorted(p for p in directory.iterdir() if p.suffix.lower() in IMAGE_SUFFIXES):
        image = load_image(path)
        try:
            require_multiple(path.name, (image.height, image.width), multiple)
        except WatermarkError as e:
            logger.warning("Skipping %s: %s", path.name, e)
            continue
        corpus.append(CorpusImage(path.name, image))
        manifest.append(ManifestEntry(name=path.name, sha256=hashlib.sha256(path.read_bytes()).hexdigest(),
                                      width=image.width, height=image.height))
    if not corpus:
        raise InputError("No usable images in {}".format(directory))
    logger.info("Loaded %d images from %s", len(corpus), directory)
    return corpus, manifest


def corpus_stats(corpus: Sequence[CorpusImage]) -> DatasetStats:
    return dataset_stats(item.image for item in corpus)


def _mean_alpha(report, detail: bool) -> float:
    values = [s.alpha_mean for s in report.scales if (s.scale != "approximate") == detail]
    return float(np.mean(values))


def keyed_attack(spec: AttackSpec, key: SecretKey) -> AttackSpec:
    """Same attack with its noise seed mixed with the embedding key, so keys draw independent noise."""
    seed = int(np.random.SeedSequence([spec.seed, key]).generate_state(1, dtype=np.uint32)[0])
    return spec.model_copy(update={"seed": seed})


def _run_job(job) -> List[EvaluationRow]:
    """Embed one key into one image, then score the fidelity row and every attack."""
    name, image, key, attacks, config, stats, payload_len = job
    watermarked, report = embed_image(image, key, payload_len, config, stats)
    expected = keystream(key, payload_len)
    common = dict(
        image=name,
        key=format_key(key),
        adaptive=config.adaptive,
        psnr=psnr(image, watermarked),
        ssim=ssim(image, watermarked),
        alpha_mean_approx=_mean_alpha(report, detail=False),
        alpha_mean_detail=_mean_alpha(report, detail=True),
    )
    rows = []
    attacked_images = [(a.label(), apply_attack(watermarked, keyed_attack(a, key))) for a in attacks]
    for label, attacked in [("none", watermarked)] + attacked_images:
        extracted, _ = extract_image(attacked, key, payload_len, config)
        score = similarity(expected, extracted)
        rows.append(EvaluationRow(attack=label, nc=score.nc, ber=score.ber, **common))
    return rows


def _run_jobs(jobs: List[tuple], workers: int, desc: str) -> List[EvaluationRow]:
    rows: List[EvaluationRow] = []
    progress = tqdm(total=len(jobs), desc=desc, unit="job", disable=len(jobs) < 2)
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for result in pool.map(_run_job, jobs):
                rows.extend(result)
                progress.update()
    else:
        for job in jobs:
            rows.extend(_run_job(job))
            progress.update()
    progress.close()
    return rows


def _as_specs(attacks: Iterable[Union[AttackSpec, str]]) -> List[AttackSpec]:
    return [a if isinstance(a, AttackSpec) else parse_attack(a) for a in attacks]


def assemble_report(rows: List[EvaluationRow], attacks: List[AttackSpec], keys: Sequence[SecretKey],
                    config: EmbedConfig, stats: DatasetStats, payload_len: int,
                    manifest: Sequence[ManifestEntry] = ()) -> EvaluationReport:
    """Sort rows by (image, key, attack) and attach per-attack means."""
    memory = evaluation_memory()
    memory.add_rows(rows)
    ordered = evaluation_memory()
    ordered.add_rows(memory.sorted_rows([a.label() for a in attacks]))
    return EvaluationReport(
        config=config.model_dump(mode="json"),
        stats=stats,
        payload_len=payload_len,
        keys=[format_key(k) for k in keys],
        attacks=[a.label() for a in attacks],
        manifest=list(manifest),
        rows=ordered.get_all_rows(),
        aggregates=ordered.aggregates(),
    )


def evaluate_corpus(corpus: Sequence[CorpusImage], keys: Sequence[SecretKey],
                    attacks: Iterable[Union[AttackSpec, str]], config: EmbedConfig, stats: DatasetStats,
                    payload_len: int = 128, manifest: Sequence[ManifestEntry] = (),
                    workers: Optional[int] = None) -> EvaluationReport:
    if not keys:
        raise InputError("At least one key is required")
    attacks = _as_specs(attacks)
    jobs = [(item.name, item.image, key, attacks, config, stats, payload_len) for item in corpus for key in keys]
    logger.info("Evaluating %d images x %d keys x %d attacks (adaptive=%s)",
                len(corpus), len(keys), len(attacks), config.adaptive)
    rows = _run_jobs(jobs, workers or default_workers(), "adaptive" if config.adaptive else "non-adaptive")
    return assemble_report(rows, attacks, keys, config, stats, payload_len, manifest)


def evaluate(image: GrayImage, keys: Sequence[SecretKey], attacks: Iterable[Union[AttackSpec, str]],
             config: EmbedConfig, stats: DatasetStats, payload_len: int = 128,
             name: str = "image", workers: Optional[int] = None) -> EvaluationReport:
    return evaluate_corpus([CorpusImage(name, image)], keys, attacks, config, stats, payload_len,
                           workers=workers)


def compare_modes(corpus: Sequence[CorpusImage], keys: Sequence[SecretKey],
                  attacks: Iterable[Union[AttackSpec, str]], config: EmbedConfig, stats: DatasetStats,
                  payload_len: int = 128, manifest: Sequence[ManifestEntry] = (),
                  workers: Optional[int] = None) -> ModeComparison:
    attacks = _as_specs(attacks)
    adaptive = evaluate_corpus(corpus, keys, attacks, config.with_adaptive(True), stats,
                               payload_len, manifest, workers)
    baseline = evaluate_corpus(corpus, keys, attacks, config.with_adaptive(False), stats,
                               payload_len, manifest, workers)
    baseline_by_attack = {row.attack: row for row in baseline.aggregates}
    deltas = []
    for row in adaptive.aggregates:
        other = baseline_by_attack[row.attack]
        deltas.append(ModeDelta(attack=row.attack, delta_psnr=row.psnr - other.psnr, delta_ber=row.ber - other.ber))
    return ModeComparison(adaptive=adaptive, non_adaptive=baseline, deltas=deltas)


def sweep(corpus: Sequence[CorpusImage], keys: Sequence[SecretKey], family: str, config: EmbedConfig,
          stats: DatasetStats, values: Optional[Sequence[float]] = None, payload_len: int = 128,
          manifest: Sequence[ManifestEntry] = (), workers: Optional[int] = None) -> SweepReport:
    """Mean NC/BER per parameter value of one attack family, in both modes."""
    if values is None:
        if family not in SWEEP_GRIDS:
            raise InputError("No default grid for {!r}; pass values explicitly".format(family))
        values = SWEEP_GRIDS[family]
    attacks = [parse_attack("{}:{:g}".format(family, v)) for v in values]
    points = []
    for adaptive in (True, False):
        report = evaluate_corpus(corpus, keys, attacks, config.with_adaptive(adaptive), stats,
                                 payload_len, manifest, workers)
        by_attack = {row.attack: row for row in report.aggregates}
        for value, spec in zip(values, attacks):
            row = by_attack[spec.label()]
            points.append(SweepPoint(value=float(value), adaptive=adaptive, nc=row.nc, ber=row.ber))
    return SweepReport(family=family, config=config.model_dump(mode="json"),
                       keys=[format_key(k) for k in keys], manifest=list(manifest), points=points)


def run_keys(runs: int, first_key: int = 1) -> List[SecretKey]:
    return list(range(first_key, first_key + runs))


def run_bench(corpus: Sequence[CorpusImage], settings: BenchSettings, config: EmbedConfig, stats: DatasetStats,
              manifest: Sequence[ManifestEntry] = ()) -> Union[EvaluationReport, ModeComparison]:
    keys = run_keys(settings.runs, settings.first_key)
    attacks = expand_attacks(settings.attacks)
    if settings.compare_modes:
        return compare_modes(corpus, keys, attacks, config, stats, settings.payload_len, manifest, settings.workers)
    return evaluate_corpus(corpus, keys, attacks, config, stats, settings.payload_len, manifest, settings.workers)


def _format(value) -> str:
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows: Sequence[EvaluationRow], path: Union[str, Path]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in rows:
            data = row.model_dump()
            writer.writerow([_format(data[column]) for column in CSV_COLUMNS])


def write_sweep_csv(report: SweepReport, path: Union[str, Path]):
    with open(path, "w", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["family", "value", "adaptive", "nc", "ber"])
        for point in report.points:
            writer.writerow([report.family, _format(point.value), point.adaptive, _format(point.nc),
                             _format(point.ber)])


def write_json(report, path: Union[str, Path]):
    Path(path).write_text(report.model_dump_json(indent=2) + "\n")
