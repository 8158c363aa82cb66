import math

import numpy as np
import pytest

from tanglescan import (
    BlurConfig,
    ColorTarget,
    CompassDirection,
    GrayImage,
    RgbImage,
    convolve,
    gaussian_blur,
    gaussian_kernel,
    isolate_color,
    robinson_masks,
    to_grayscale,
)


def test_exact_match_kept_mismatch_zeroed():
    img = RgbImage.from_array([[[0, 0, 255], [255, 0, 0]]])
    out = isolate_color(img, ColorTarget(0, 0, 255, tolerance=0))
    assert out.pixel(0, 0) == (0, 0, 255)
    assert out.pixel(1, 0) == (0, 0, 0)


def test_tolerance_uses_euclidean_distance():
    # distance to (0,0,255) is sqrt(100+25+225) = sqrt(350) ~ 18.71 <= 30
    assert math.isclose(math.dist((10, 5, 240), (0, 0, 255)), math.sqrt(350))
    img = RgbImage.from_array([[[10, 5, 240]]])
    out = isolate_color(img, ColorTarget(0, 0, 255, tolerance=30))
    assert out.pixel(0, 0) == (10, 5, 240)


def test_no_match_gives_all_black():
    img = RgbImage.from_array(np.full((4, 4, 3), 128, dtype=np.uint8))
    out = isolate_color(img, ColorTarget(0, 255, 0, tolerance=10))
    assert np.all(out.data == 0)


def test_none_target_passes_through():
    img = RgbImage.from_array(np.full((3, 3, 3), 99, dtype=np.uint8))
    assert isolate_color(img, None) is img


def test_isolate_color_is_idempotent():
    rng = np.random.default_rng(11)
    img = RgbImage.from_array(rng.integers(0, 256, size=(12, 12, 3), dtype=np.uint8))
    target = ColorTarget(120, 60, 200, tolerance=80)
    once = isolate_color(img, target)
    twice = isolate_color(once, target)
    assert np.array_equal(once.data, twice.data)


# --- gaussian kernel ---

def test_size_one_kernel_is_unity():
    k = gaussian_kernel(BlurConfig(size=1, sigma=2.5))
    assert k.coefficients.shape == (1, 1)
    assert k.coefficients[0, 0] == 1.0


def test_center_to_corner_ratio_is_e_for_sigma_one():
    k = gaussian_kernel(BlurConfig(size=3, sigma=1.0))
    ratio = k.coefficients[1, 1] / k.coefficients[0, 0]
    assert math.isclose(ratio, math.e, rel_tol=1e-12)


def test_kernel_normalized_and_symmetric():
    k = gaussian_kernel(BlurConfig(size=5, sigma=1.0))
    c = k.coefficients
    assert abs(c.sum() - 1.0) <= 1e-9
    assert np.allclose(c, c[::-1, :], atol=1e-12)   # y -> -y
    assert np.allclose(c, c[:, ::-1], atol=1e-12)   # x -> -x
    assert np.allclose(c, c.T, atol=1e-12)          # x <-> y


def test_bad_blur_config_rejected():
    with pytest.raises(ValueError):
        BlurConfig(size=4, sigma=1.0)
    with pytest.raises(ValueError):
        BlurConfig(size=3, sigma=0.0)


# --- blur ---

def test_blur_preserves_constant_image():
    img = RgbImage.from_array(np.full((9, 9, 3), 77, dtype=np.uint8))
    out = gaussian_blur(img, BlurConfig(5, 1.0))
    assert np.all(out.data == 77)


def test_blur_peak_stays_at_bright_pixel():
    data = np.zeros((9, 9), dtype=np.uint8)
    data[4, 4] = 255
    out = gaussian_blur(GrayImage.from_array(data), BlurConfig(3, 1.0))
    assert out.data[4, 4] == out.data.max()
    assert out.data[4, 4] > out.data[4, 5]


def test_blur_step_edge_matches_column_sums():
    # vertical step 0|255: the pixel adjacent to the step on the 0 side sees
    # the kernel's near column over the bright half
    cfg = BlurConfig(3, 1.0)
    k = gaussian_kernel(cfg).coefficients
    data = np.zeros((9, 9), dtype=np.uint8)
    data[:, 5:] = 255
    out = gaussian_blur(GrayImage.from_array(data), cfg)
    expected = int(np.floor(255 * k[:, 2].sum() + 0.5))
    assert out.data[4, 4] == expected


def test_blur_preserves_global_mean_of_constantish_image():
    rng = np.random.default_rng(5)
    base = np.full((20, 20), 120.0)
    img = GrayImage.from_array(np.clip(base + rng.normal(0, 3, base.shape), 0, 255).astype(np.uint8))
    out = gaussian_blur(img, BlurConfig(5, 1.0))
    assert abs(float(out.data.mean()) - float(img.data.mean())) <= 1.0


def test_larger_kernel_never_increases_peak_edge_response():
    # smoothing more suppresses the derivative response on noisy images
    north = robinson_masks()[CompassDirection.N]
    for seed in range(3):
        rng = np.random.default_rng(seed)
        img = RgbImage.from_array(rng.integers(0, 256, size=(24, 24, 3), dtype=np.uint8))
        peaks = []
        for size in (3, 5, 7, 9):
            blurred = gaussian_blur(img, BlurConfig(size, 1.0))
            response = convolve(to_grayscale(blurred), north)
            peaks.append(np.abs(response.data).max())
        assert all(a >= b for a, b in zip(peaks, peaks[1:]))
