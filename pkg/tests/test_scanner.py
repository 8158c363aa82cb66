from collections import deque

import numpy as np
import pytest

from tanglescan import BinaryImage, WindowRect, extract_patches, windows


def flood_fill_components(data: np.ndarray, min_size: int) -> list[frozenset]:
    """Independent BFS oracle for 8-connected components, raster order."""
    h, w = data.shape
    seen = np.zeros_like(data, dtype=bool)
    comps = []
    for y in range(h):
        for x in range(w):
            if not data[y, x] or seen[y, x]:
                continue
            comp = set()
            queue = deque([(x, y)])
            seen[y, x] = True
            while queue:
                cx, cy = queue.popleft()
                comp.add((cx, cy))
                for dy in (-1, 0, 1):
                    for dx in (-1, 0, 1):
                        nx, ny = cx + dx, cy + dy
                        if 0 <= nx < w and 0 <= ny < h and data[ny, nx] and not seen[ny, nx]:
                            seen[ny, nx] = True
                            queue.append((nx, ny))
            if len(comp) >= min_size:
                comps.append(frozenset(comp))
    return comps


# --- windows ---

def test_window_count_640x480_64_stride32():
    rects = windows(640, 480, 64, 64, 32)
    assert len(rects) == 19 * 14  # placement arithmetic, no clamp needed
    assert rects[0] == WindowRect(0, 0, 64, 64)
    assert rects[-1] == WindowRect(576, 416, 64, 64)


def test_window_equal_to_image_is_single():
    assert windows(64, 64, 64, 64, 32) == [WindowRect(0, 0, 64, 64)]


def test_oversized_stride_clamps_to_single_window():
    assert windows(50, 40, 64, 64, 999) == [WindowRect(0, 0, 50, 40)]


def test_right_and_bottom_margins_get_flush_windows():
    rects = windows(100, 70, 64, 64, 32)
    xs = sorted({r.x0 for r in rects})
    ys = sorted({r.y0 for r in rects})
    assert xs == [0, 32, 36]  # 36 = 100 - 64, flush right
    assert ys == [0, 6]       # 6 = 70 - 64, flush bottom


def test_windows_cover_every_pixel():
    for w, h, ww, wh, stride in ((100, 70, 64, 64, 32), (33, 21, 8, 8, 5), (9, 9, 4, 4, 4)):
        covered = np.zeros((h, w), dtype=bool)
        for r in windows(w, h, ww, wh, stride):
            covered[r.y0 : r.y0 + r.h, r.x0 : r.x0 + r.w] = True
        assert covered.all()


def test_window_order_is_raster_and_deterministic():
    rects = windows(200, 100, 64, 64, 32)
    assert rects == windows(200, 100, 64, 64, 32)
    keys = [(r.y0, r.x0) for r in rects]
    assert keys == sorted(keys)


def test_window_diagonal():
    assert WindowRect(0, 0, 3, 4).diagonal == 5.0


# --- extract_patches ---

def test_empty_window_has_no_patches():
    edges = BinaryImage.from_array(np.zeros((32, 32), dtype=bool))
    assert extract_patches(edges, WindowRect(0, 0, 32, 32)) == []


def test_single_blob_is_single_patch():
    data = np.zeros((16, 16), dtype=bool)
    data[4:7, 5:9] = True  # 12 pixels, 8-connected
    patches = extract_patches(BinaryImage.from_array(data), WindowRect(0, 0, 16, 16))
    assert len(patches) == 1
    assert patches[0].size == 12
    assert patches[0].bbox == (5, 4, 8, 6)


def test_two_separated_blobs_are_two_patches():
    data = np.zeros((20, 20), dtype=bool)
    data[2:5, 2:6] = True
    data[10:13, 10:14] = True  # >= 2px gap in every direction
    patches = extract_patches(
        BinaryImage.from_array(data), WindowRect(0, 0, 20, 20), min_patch_pixels=8
    )
    assert len(patches) == 2
    oracle = flood_fill_components(data, 8)
    assert [set(p.pixels) for p in patches] == [set(c) for c in oracle]


def test_small_components_are_discarded():
    data = np.zeros((16, 16), dtype=bool)
    data[0, 0:3] = True  # 3 px, below the floor
    data[8:11, 8:12] = True
    patches = extract_patches(BinaryImage.from_array(data), WindowRect(0, 0, 16, 16))
    assert len(patches) == 1
    assert patches[0].size == 12


def test_patch_coordinates_are_window_local():
    data = np.zeros((32, 32), dtype=bool)
    data[10:13, 20:24] = True
    rect = WindowRect(16, 8, 16, 16)
    patches = extract_patches(BinaryImage.from_array(data), rect)
    assert len(patches) == 1
    assert patches[0].bbox == (4, 2, 7, 4)  # offset by the window origin


def test_window_outside_image_rejected():
    edges = BinaryImage.from_array(np.zeros((16, 16), dtype=bool))
    with pytest.raises(ValueError):
        extract_patches(edges, WindowRect(8, 8, 16, 16))


def test_patches_match_flood_fill_oracle_on_random_windows():
    rng = np.random.default_rng(314)
    for _ in range(100):
        data = rng.random((24, 24)) < rng.uniform(0.1, 0.5)
        rect = WindowRect(0, 0, 24, 24)
        patches = extract_patches(BinaryImage.from_array(data), rect, min_patch_pixels=4)
        oracle = flood_fill_components(data, 4)
        assert [set(p.pixels) for p in patches] == [set(c) for c in oracle]
        # patches partition the retained foreground
        union = set().union(*(p.pixels for p in patches)) if patches else set()
        assert sum(p.size for p in patches) == len(union)
