import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from complexity import (GUARD_EPS, StrengthState, alpha_sequence, block_complexity, complexity_map, dataset_stats,
                        image_mean_complexity, initial_alpha, next_alpha, relative_change)
from errors import DimensionError, InputError
from image_core import GrayImage
from model.watermark_task import DatasetStats, StrengthParams


def test_complexity_map_examples():
    assert complexity_map(np.full((3, 3), 5.0))[0, 0] == 0
    grid = np.zeros((3, 3))
    grid[1, 1] = 10
    assert complexity_map(grid)[0, 0] == 80
    np.testing.assert_allclose(complexity_map(grid + 17), complexity_map(grid))


def test_complexity_map_rejects_small_grids():
    with pytest.raises(DimensionError):
        complexity_map(np.zeros((2, 5)))


def test_block_complexity_examples():
    assert block_complexity(np.full((4, 4), 9.0)) == 0
    checkerboard = (np.indices((16, 16)).sum(axis=0) % 2) * 255.0
    # the four edge neighbours differ by 255, the four diagonal ones are equal
    assert block_complexity(checkerboard) == pytest.approx(4 * 255)


@settings(max_examples=40, deadline=None)
@given(st.floats(0, 10), st.integers(0, 2 ** 32 - 1))
def test_block_complexity_is_homogeneous(k, seed):
    block = np.random.default_rng(seed).uniform(0, 255, size=(8, 8))
    assert block_complexity(k * block) == pytest.approx(k * block_complexity(block), rel=1e-9, abs=1e-9)


def test_image_mean_complexity_examples():
    grid = np.zeros((3, 3), dtype=np.uint8)
    grid[1, 1] = 10
    assert image_mean_complexity(GrayImage(grid)) == 80
    assert image_mean_complexity(GrayImage(np.full((8, 8), 3, dtype=np.uint8))) == 0


def test_image_mean_complexity_mirror_invariant(cover):
    mirrored = GrayImage(cover.samples[:, ::-1])
    assert image_mean_complexity(mirrored) == pytest.approx(image_mean_complexity(cover))


def test_dataset_stats(textured_images):
    one = dataset_stats(textured_images[:1])
    assert one.mu_D == pytest.approx(image_mean_complexity(textured_images[0]))
    assert one.sigma_D == 0 and one.image_count == 1
    means = [image_mean_complexity(i) for i in textured_images]
    stats = dataset_stats(textured_images)
    assert stats.mu_D == pytest.approx(np.mean(means))
    assert stats.sigma_D == pytest.approx(np.std(means))


def test_dataset_stats_rejects_empty():
    with pytest.raises(InputError):
        dataset_stats([])


def test_initial_alpha_table():
    stats = DatasetStats(mu_D=10.0, sigma_D=2.0, image_count=5)
    assert initial_alpha(10.0, stats, 11.0) == 11.0
    assert initial_alpha(11.5, stats, 11.0) == 11.0
    assert initial_alpha(15.0, stats, 11.0) == pytest.approx(16.5)
    assert initial_alpha(5.0, stats, 11.0) == pytest.approx(5.5)


def test_initial_alpha_flat_dataset_is_neutral():
    assert initial_alpha(3.0, DatasetStats(mu_D=0.0, sigma_D=0.0, image_count=1), 9.0) == 9.0


def test_next_alpha_examples():
    state = StrengthState(alpha_i=11.0, alpha_m=11.0, prev_block_complexity=10.0)
    up = next_alpha(state, 13.0, StrengthParams(S=1.1, T2=1.5))
    assert up.alpha_m == pytest.approx(15.73)
    assert up.prev_block_complexity == 13.0
    down = next_alpha(state, 5.0, StrengthParams(S=1.1, T1=0.5))
    assert down.alpha_m == pytest.approx(5.5)


def test_relative_change_guard():
    assert relative_change(0.0, 0.0) == 0.0
    assert relative_change(0.0, 1.0) == pytest.approx(1.0 / GUARD_EPS)
    state = StrengthState.start(9.0, 0.0)
    assert next_alpha(state, 4.0, StrengthParams(T2=1.5)).alpha_m == pytest.approx(13.5)


def test_flat_scan_stays_at_alpha_i():
    alphas, guarded = alpha_sequence(np.zeros(6), 11.0, StrengthParams(T2=1.0))
    np.testing.assert_allclose(alphas, 11.0)
    assert guarded == 5


def test_flat_scan_climbs_to_the_upper_clamp():
    alphas, guarded = alpha_sequence(np.zeros(6), 11.0, StrengthParams(S=1.1, T2=1.5))
    np.testing.assert_allclose(alphas, [11.0, 12.1, 13.31, 14.641, 16.1051, 16.5])
    assert guarded == 5


params_strategy = st.builds(
    StrengthParams,
    S=st.floats(1.0, 2.0),
    T1=st.floats(0.05, 1.0),
    T2=st.floats(1.0, 3.0),
)


@settings(max_examples=200, deadline=None)
@given(params_strategy, st.floats(0.5, 50), st.lists(st.floats(0, 5000), min_size=1, max_size=40))
def test_alpha_sequence_stays_within_clamps(params, alpha_i, complexities):
    alphas, _ = alpha_sequence(complexities, alpha_i, params)
    assert alphas[0] == alpha_i
    assert np.all(alphas >= params.T1 * alpha_i * (1 - 1e-12))
    assert np.all(alphas <= params.T2 * alpha_i * (1 + 1e-12))


@settings(max_examples=200, deadline=None)
@given(params_strategy, st.floats(0.5, 50), st.floats(0, 1), st.floats(0, 1000),
       st.floats(0, 1000), st.floats(0, 1000))
def test_next_alpha_is_monotone_in_complexity(params, alpha_i, position, prev, c1, c2):
    alpha_m = alpha_i * (params.T1 + position * (params.T2 - params.T1))
    state = StrengthState(alpha_i=alpha_i, alpha_m=alpha_m, prev_block_complexity=prev)
    low, high = sorted((c1, c2))
    assert next_alpha(state, low, params).alpha_m <= next_alpha(state, high, params).alpha_m * (1 + 1e-12)


def test_checkerboard_is_busier_than_a_step_with_the_same_histogram():
    checkerboard = (np.indices((8, 8)).sum(axis=0) % 2) * 255.0
    step = np.repeat([0.0, 255.0], 4)[:, None] * np.ones((1, 8))
    assert np.count_nonzero(step) == np.count_nonzero(checkerboard)
    assert block_complexity(checkerboard) > block_complexity(step)
