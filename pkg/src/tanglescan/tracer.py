"""Direction-coded border following around edge patches.

The walk keeps a `direction` code for the previous move, scans the 3x3
neighborhood counter-clockwise from a start position derived from that
code, and steps to the first foreground pixel found. It stops when the
walk reproduces its opening move (current pixel = second element while the
previous pixel = the start), which closes the border cycle.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .raster import BinaryImage


class Connectivity(Enum):
    FOUR = 4
    EIGHT = 8


# Move vectors by direction code, enumerated counter-clockwise starting east.
MOVES_8 = ((1, 0), (1, -1), (0, -1), (-1, -1), (-1, 0), (-1, 1), (0, 1), (1, 1))
MOVES_4 = ((1, 0), (0, -1), (-1, 0), (0, 1))

_INITIAL_DIRECTION = {Connectivity.FOUR: 0, Connectivity.EIGHT: 7}


@dataclass(frozen=True)
class Contour:
    """Ordered border pixels of one patch (pixels may repeat along spurs)."""

    points: tuple[tuple[int, int], ...]
    connectivity: Connectivity

    def __len__(self) -> int:
        return len(self.points)


def find_start(region: BinaryImage) -> tuple[int, int] | None:
    """First foreground pixel in raster order, or None for an empty region."""
    flat = region.data.ravel()
    idx = int(flat.argmax())
    if not flat[idx]:
        return None
    return (idx % region.width, idx // region.width)


def _scan_from(direction: int, conn: Connectivity) -> int:
    if conn is Connectivity.FOUR:
        return (direction + 3) % 4
    if direction % 2 == 1:
        return (direction + 6) % 8
    return (direction + 7) % 8


def trace_contour(
    region: BinaryImage,
    start: tuple[int, int],
    conn: Connectivity = Connectivity.EIGHT,
    initial_direction: int | None = None,
) -> Contour:
    """Trace the border starting at `start` (must be foreground).

    An isolated pixel with no foreground neighbor yields the one-point
    contour [start].
    """
    x0, y0 = start
    data = region.data
    w, h = region.width, region.height
    if not (0 <= x0 < w and 0 <= y0 < h) or not data[y0, x0]:
        raise ValueError(f"contour start {start} is not a foreground pixel")

    moves = MOVES_4 if conn is Connectivity.FOUR else MOVES_8
    n_dirs = len(moves)
    direction = _INITIAL_DIRECTION[conn] if initial_direction is None else initial_direction % n_dirs

    points = [start]
    x, y = start
    max_steps = 8 * int(data.sum()) + 16
    for _ in range(max_steps):
        found = None
        scan = _scan_from(direction, conn)
        for k in range(n_dirs):
            d = (scan + k) % n_dirs
            dx, dy = moves[d]
            nx, ny = x + dx, y + dy
            if 0 <= nx < w and 0 <= ny < h and data[ny, nx]:
                found = (nx, ny)
                direction = d
                break
        if found is None:
            # isolated pixel: no neighbor to walk to
            return Contour((start,), conn)
        points.append(found)
        x, y = found
        if len(points) >= 4 and points[-1] == points[1] and points[-2] == points[0]:
            return Contour(tuple(points[:-2]), conn)
    raise RuntimeError(f"contour trace from {start} did not close after {max_steps} steps")


def trace_patch(region: BinaryImage, conn: Connectivity = Connectivity.EIGHT) -> Contour | None:
    """Convenience: trace from the region's raster-first foreground pixel."""
    start = find_start(region)
    if start is None:
        return None
    return trace_contour(region, start, conn)


def direction_of_move(a: tuple[int, int], b: tuple[int, int], conn: Connectivity) -> int:
    """Direction code of the step a -> b (must be a single-step neighbor move)."""
    moves = MOVES_4 if conn is Connectivity.FOUR else MOVES_8
    delta = (b[0] - a[0], b[1] - a[1])
    return moves.index(delta)
