import logging
import os
from functools import wraps
from pathlib import Path

import click
from dotenv import load_dotenv

import bench
from attacks import apply_attack, expand_attacks, parse_attack
from codec import Watermark, embed_image, extract_image, parse_key
from complexity import dataset_stats
from errors import WatermarkError
from image_core import load_image, save_image
from model.watermark_task import BenchSettings, DatasetStats, EmbedConfig
from transforms import ct_decompose, dump_subbands


def _configure_logging():
    logging.basicConfig(level=os.getenv("CTWM_LOG_LEVEL", "INFO").upper(),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def _load_config(path) -> EmbedConfig:
    path = path or os.getenv("CTWM_CONFIG")
    if not path:
        return EmbedConfig()
    return EmbedConfig.model_validate_json(Path(path).read_text())


def _load_stats(path) -> DatasetStats:
    return DatasetStats.model_validate_json(Path(path).read_text())


def _handle_errors(func):
    @wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except (WatermarkError, ValueError) as e:
            raise click.ClickException(str(e))
    return wrapper


def _keys(text: str):
    return [parse_key(part) for part in text.split(",") if part.strip()]


config_option = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                             help="JSON EmbedConfig; defaults to $CTWM_CONFIG or built-in defaults.")
key_option = click.option("--key", required=True, help="Secret key, up to 16 hex digits.")
payload_len_option = click.option("--payload-len", default=128, show_default=True, type=int, help="L_w in bits.")


@click.group()
def cli():
    """Blind adaptive contourlet/DCT image watermarking."""
    load_dotenv()
    _configure_logging()


@cli.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@config_option
@_handle_errors
def stats(dataset, out, config_path):
    """Dataset complexity statistics (mu_D, sigma_D)."""
    corpus, _ = bench.load_corpus(dataset, _load_config(config_path))
    result = dataset_stats(item.image for item in corpus)
    Path(out).write_text(result.model_dump_json(indent=2) + "\n")
    click.echo("mu_D={:.4f} sigma_D={:.4f} over {} images".format(result.mu_D, result.sigma_D, result.image_count))


@cli.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@key_option
@payload_len_option
@click.option("--payload-file", type=click.Path(exists=True, dir_okay=False), help="ASCII '0'/'1' payload.")
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--non-adaptive", is_flag=True, help="Fixed alpha_0 everywhere.")
@config_option
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--report", "report_path", type=click.Path(dir_okay=False), help="Write the EmbedReport as JSON.")
@click.option("--dump-subbands", "dump_dir", type=click.Path(file_okay=False),
              help="Write normalized views of the cover's subbands here.")
@_handle_errors
def embed(image_path, key, payload_len, payload_file, stats_path, non_adaptive, config_path, out, report_path,
          dump_dir):
    config = _load_config(config_path)
    if non_adaptive:
        config = config.with_adaptive(False)
    payload = None
    if payload_file:
        payload = Watermark.from_text(Path(payload_file).read_text())
        payload_len = len(payload)
    image = load_image(image_path)
    if dump_dir:
        dump_subbands(ct_decompose(image), dump_dir)
    watermarked, report = embed_image(image, parse_key(key), payload_len, config, _load_stats(stats_path),
                                      payload=payload)
    save_image(watermarked, out)
    if report_path:
        Path(report_path).write_text(report.model_dump_json(indent=2) + "\n")
    click.echo("Embedded {} bits into {} ({} pixels clamped)".format(payload_len, out, report.clamped_pixels))


@cli.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@key_option
@payload_len_option
@config_option
@click.option("--descramble", is_flag=True, help="Undo the key scrambling of a file payload.")
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@click.option("--confidences", type=click.Path(dir_okay=False), help="Write per-bit vote weights as JSON.")
@_handle_errors
def extract(image_path, key, payload_len, config_path, descramble, out, confidences):
    watermark, votes = extract_image(load_image(image_path), parse_key(key), payload_len,
                                     _load_config(config_path), descramble=descramble)
    Path(out).write_text(watermark.to_text() + "\n")
    if confidences:
        Path(confidences).write_text(votes.model_dump_json(indent=2) + "\n")
    click.echo(watermark.to_text())


@cli.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--spec", required=True, help='Attack spec, e.g. "jpeg:70".')
@click.option("--seed", default=0, show_default=True, type=int)
@click.option("--out", required=True, type=click.Path(dir_okay=False))
@_handle_errors
def attack(image_path, spec, seed, out):
    save_image(apply_attack(load_image(image_path), parse_attack(spec, seed)), out)


@cli.command()
@click.option("--image", "image_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--keys", "key_list", required=True, help="Comma-separated hex keys.")
@click.option("--attacks", "attack_list", default="", help="Comma-separated specs or suite names.")
@click.option("--stats", "stats_path", required=True, type=click.Path(exists=True, dir_okay=False))
@payload_len_option
@config_option
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False))
@click.option("--json", "json_path", type=click.Path(dir_okay=False))
@_handle_errors
def evaluate(image_path, key_list, attack_list, stats_path, payload_len, config_path, csv_path, json_path):
    report = bench.evaluate(load_image(image_path), _keys(key_list), expand_attacks(attack_list),
                            _load_config(config_path), _load_stats(stats_path), payload_len,
                            name=Path(image_path).name)
    _emit(report, csv_path, json_path)


@cli.command(name="bench")
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--runs", default=20, show_default=True, type=int, help="Keys per image.")
@click.option("--first-key", default=1, show_default=True, type=int)
@click.option("--attacks", "attack_list", default="table", show_default=True)
@click.option("--compare-modes", is_flag=True, help="Also run the non-adaptive baseline.")
@click.option("--stats", "stats_path", type=click.Path(exists=True, dir_okay=False),
              help="Defaults to statistics of the dataset itself.")
@payload_len_option
@config_option
@click.option("--workers", type=int, help="Defaults to $CTWM_WORKERS.")
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False))
@click.option("--json", "json_path", type=click.Path(dir_okay=False))
@_handle_errors
def bench_command(dataset, runs, first_key, attack_list, compare_modes, stats_path, payload_len, config_path,
                  workers, csv_path, json_path):
    config = _load_config(config_path)
    corpus, manifest = bench.load_corpus(dataset, config)
    data_stats = _load_stats(stats_path) if stats_path else bench.corpus_stats(corpus)
    settings = BenchSettings(runs=runs, first_key=first_key, payload_len=payload_len, attacks=[attack_list],
                             compare_modes=compare_modes, workers=workers or bench.default_workers())
    result = bench.run_bench(corpus, settings, config, data_stats, manifest)
    if settings.compare_modes:
        comparison = result
        if csv_path:
            bench.write_csv(comparison.adaptive.rows + comparison.non_adaptive.rows, csv_path)
        if json_path:
            bench.write_json(comparison, json_path)
        for delta in comparison.deltas:
            click.echo("{:<14} dPSNR={:+.3f} dBER={:+.4f}".format(delta.attack, delta.delta_psnr, delta.delta_ber))
        return
    _emit(result, csv_path, json_path)


@cli.command()
@click.option("--dataset", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--family", required=True, help="Attack family, e.g. jpeg.")
@click.option("--values", default="", help="Comma-separated parameter values; defaults to the family grid.")
@click.option("--runs", default=3, show_default=True, type=int)
@click.option("--stats", "stats_path", type=click.Path(exists=True, dir_okay=False))
@payload_len_option
@config_option
@click.option("--workers", type=int)
@click.option("--csv", "csv_path", type=click.Path(dir_okay=False))
@click.option("--json", "json_path", type=click.Path(dir_okay=False))
@_handle_errors
def sweep(dataset, family, values, runs, stats_path, payload_len, config_path, workers, csv_path, json_path):
    config = _load_config(config_path)
    corpus, manifest = bench.load_corpus(dataset, config)
    data_stats = _load_stats(stats_path) if stats_path else bench.corpus_stats(corpus)
    grid = [float(v) for v in values.split(",") if v.strip()] or None
    report = bench.sweep(corpus, bench.run_keys(runs), family, config, data_stats, grid, payload_len, manifest,
                         workers)
    if csv_path:
        bench.write_sweep_csv(report, csv_path)
    if json_path:
        bench.write_json(report, json_path)
    for point in report.points:
        click.echo("{}={:g} adaptive={} nc={:.4f} ber={:.4f}".format(
            family, point.value, point.adaptive, point.nc, point.ber))


def _emit(report, csv_path, json_path):
    if csv_path:
        bench.write_csv(report.rows, csv_path)
    if json_path:
        bench.write_json(report, json_path)
    for row in report.aggregates:
        click.echo("{:<14} PSNR={:.3f} SSIM={:.4f} NC={:.4f} BER={:.4f} (n={})".format(
            row.attack, row.psnr, row.ssim, row.nc, row.ber, row.runs))


if __name__ == "__main__":
    cli()
