import json

import pytest
from click.testing import CliRunner

from cli import cli
from codec import Watermark, keystream, scramble
from image_core import load_image, save_image


@pytest.fixture
def workspace(tmp_path, textured_images):
    dataset = tmp_path / "dataset"
    dataset.mkdir()
    for i, image in enumerate(textured_images[:2]):
        save_image(image, dataset / "img{}.png".format(i))
    return tmp_path


def _run(*args):
    result = CliRunner().invoke(cli, [str(a) for a in args])
    return result


def _stats(workspace):
    result = _run("stats", "--dataset", workspace / "dataset", "--out", workspace / "stats.json")
    assert result.exit_code == 0, result.output
    return workspace / "stats.json"


def test_stats_command(workspace):
    stats_path = _stats(workspace)
    stats = json.loads(stats_path.read_text())
    assert stats["image_count"] == 2
    assert stats["mu_D"] > 0


def test_embed_then_extract(workspace):
    stats_path = _stats(workspace)
    marked = workspace / "marked.png"
    result = _run("embed", "--image", workspace / "dataset" / "img0.png", "--key", "1f", "--payload-len", 16,
                  "--stats", stats_path, "--out", marked, "--report", workspace / "report.json",
                  "--dump-subbands", workspace / "views")
    assert result.exit_code == 0, result.output
    assert json.loads((workspace / "report.json").read_text())["payload_len"] == 16
    assert (workspace / "views" / "detail_3.pgm").exists()

    result = _run("extract", "--image", marked, "--key", "0x1f", "--payload-len", 16,
                  "--out", workspace / "bits.txt", "--confidences", workspace / "votes.json")
    assert result.exit_code == 0, result.output
    assert (workspace / "bits.txt").read_text().strip() == keystream(0x1F, 16).to_text()
    assert len(json.loads((workspace / "votes.json").read_text())["votes"]) == 16


def test_payload_file_with_descramble(workspace):
    stats_path = _stats(workspace)
    payload = "0101111100001010"
    (workspace / "payload.txt").write_text(payload + "\n")
    marked = workspace / "marked.png"
    result = _run("embed", "--image", workspace / "dataset" / "img1.png", "--key", "abc", "--payload-file",
                  workspace / "payload.txt", "--stats", stats_path, "--non-adaptive", "--out", marked)
    assert result.exit_code == 0, result.output

    raw = _run("extract", "--image", marked, "--key", "abc", "--payload-len", 16, "--out", workspace / "raw.txt")
    assert raw.output.strip() == scramble(Watermark.from_text(payload), 0xABC).to_text()
    plain = _run("extract", "--image", marked, "--key", "abc", "--payload-len", 16, "--descramble",
                 "--out", workspace / "plain.txt")
    assert plain.output.strip() == payload


def test_attack_command(workspace):
    out = workspace / "attacked.png"
    result = _run("attack", "--image", workspace / "dataset" / "img0.png", "--spec", "crop:0.25", "--out", out)
    assert result.exit_code == 0, result.output
    assert load_image(out).samples.shape == (128, 128)


def test_errors_become_click_failures(workspace):
    stats_path = _stats(workspace)
    result = _run("embed", "--image", workspace / "dataset" / "img0.png", "--key", "1", "--payload-len", 100000,
                  "--stats", stats_path, "--out", workspace / "x.png")
    assert result.exit_code == 1
    assert "Error" in result.output
    result = _run("attack", "--image", workspace / "dataset" / "img0.png", "--spec", "blur:3",
                  "--out", workspace / "y.png")
    assert result.exit_code == 1
    assert "Unknown attack" in result.output


def test_evaluate_and_bench_commands(workspace):
    stats_path = _stats(workspace)
    result = _run("evaluate", "--image", workspace / "dataset" / "img0.png", "--keys", "1,2", "--attacks", "jpeg:90",
                  "--stats", stats_path, "--payload-len", 16, "--csv", workspace / "eval.csv")
    assert result.exit_code == 0, result.output
    assert "jpeg:90" in result.output
    assert len((workspace / "eval.csv").read_text().splitlines()) == 1 + 4

    result = _run("bench", "--dataset", workspace / "dataset", "--runs", 1, "--attacks", "median:3",
                  "--payload-len", 16, "--compare-modes", "--json", workspace / "bench.json")
    assert result.exit_code == 0, result.output
    assert "dPSNR" in result.output
    assert set(json.loads((workspace / "bench.json").read_text())) == {"adaptive", "non_adaptive", "deltas"}


def test_sweep_command(workspace):
    result = _run("sweep", "--dataset", workspace / "dataset", "--family", "sp", "--values", "0.01,0.05",
                  "--runs", 1, "--payload-len", 16, "--csv", workspace / "sweep.csv")
    assert result.exit_code == 0, result.output
    lines = (workspace / "sweep.csv").read_text().splitlines()
    assert lines[0] == "family,value,adaptive,nc,ber"
    assert len(lines) == 1 + 4
