"""Color edge detector built on vector order statistics.

Pipeline: every 3x3 window is ranked by reduced (aggregate distance)
ordering, the vector range between its lowest- and highest-ranked pixels
forms a scalar field, the collection-scheme masks turn that field into a
gradient, four-direction non-maximum suppression thins it and a
fraction-of-max threshold produces the edge map.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from ._parallel import Workers, map_rows
from .errors import check_fraction
from .filters import convolve
from .image import BorderPolicy, ColorImage, EdgeMap, ScalarPlane, pad

__all__ = [
    "FX",
    "FY",
    "Direction4",
    "GradientField",
    "VosParams",
    "pixel_distance",
    "distance_set",
    "aggregate_order",
    "vector_range",
    "vr_field",
    "masks",
    "apply_masks",
    "quantize_direction",
    "non_max_suppress",
    "threshold",
    "edge_strength",
    "detect_edges",
]

# Collection-scheme gradient masks, row-major.
FX = np.array([[3, 4, 4],
               [3, 4, 5],
               [4, 4, 4]], dtype=np.float64)
FY = np.array([[3, 4, 4],
               [4, 4, 3],
               [4, 4, 4]], dtype=np.float64)
FX.flags.writeable = False
FY.flags.writeable = False


class Direction4(Enum):
    HORIZONTAL = 0
    DIAGONAL45 = 45
    VERTICAL = 90
    DIAGONAL135 = 135


# (backward, forward) neighbour offsets as (dy, dx), rows growing downwards
_NEIGHBOURS = {
    Direction4.HORIZONTAL: ((0, -1), (0, 1)),      # W, E
    Direction4.DIAGONAL45: ((1, -1), (-1, 1)),     # SW, NE
    Direction4.VERTICAL: ((-1, 0), (1, 0)),        # N, S
    Direction4.DIAGONAL135: ((-1, -1), (1, 1)),    # NW, SE
}
_DIRECTION_CODES = list(Direction4)


@dataclass(frozen=True)
class GradientField:
    magnitude: ScalarPlane
    direction: ScalarPlane

    def __post_init__(self):
        if self.magnitude.shape != self.direction.shape:
            raise ValueError("magnitude and direction planes differ in size")


@dataclass(frozen=True)
class VosParams:
    """Detector settings.

    ``threshold`` is a fraction of the largest suppressed magnitude.
    ``zero_mean_masks`` subtracts the mean coefficient from both masks, which
    removes their DC gain; it is off by default.
    """

    threshold: float = 0.2
    border: BorderPolicy = BorderPolicy.REPLICATE
    strict_nms: bool = True
    zero_mean_masks: bool = False

    def __post_init__(self):
        check_fraction(self.threshold)
        object.__setattr__(self, "border", BorderPolicy.parse(self.border))


# --------------------------------------------------------------------------
# per-window operations
# --------------------------------------------------------------------------

def pixel_distance(a, b) -> float:
    """Euclidean distance between two RGB vectors."""
    dr = int(a[0]) - int(b[0])
    dg = int(a[1]) - int(b[1])
    db = int(a[2]) - int(b[2])
    return math.sqrt(dr * dr + dg * dg + db * db)


def _as_window(w) -> np.ndarray:
    cells = np.asarray(w, dtype=np.int64).reshape(-1, 3)
    if cells.shape != (9, 3):
        raise ValueError(f"a window holds exactly 9 RGB cells, got {cells.shape[0]}")
    return cells


def distance_set(w) -> np.ndarray:
    """Aggregate distance of each window cell to all nine cells.

    Sums run over ``j = 0..8`` in index order; identical pixels therefore get
    bit-identical scores.
    """
    cells = [tuple(c) for c in _as_window(w).tolist()]
    out = np.empty(9)
    for i in range(9):
        acc = 0.0
        for j in range(9):
            acc += pixel_distance(cells[i], cells[j])
        out[i] = acc
    return out


def aggregate_order(w) -> list[int]:
    """Cell indices sorted by aggregate distance, ties by ascending index."""
    scores = distance_set(w)
    return sorted(range(9), key=lambda i: (scores[i], i))


def vector_range(w) -> float:
    cells = _as_window(w)
    order = aggregate_order(cells)
    return pixel_distance(cells[order[-1]], cells[order[0]])


# --------------------------------------------------------------------------
# raster stages
# --------------------------------------------------------------------------

def vr_field(img: ColorImage, border: BorderPolicy = BorderPolicy.REPLICATE, workers: Workers = 1) -> ScalarPlane:
    """Vector range of the 3x3 window around every pixel."""
    src = pad(img.data, BorderPolicy.parse(border)).astype(np.float64)
    width = img.width

    def run(y0: int, y1: int) -> np.ndarray:
        h = y1 - y0
        cells = [src[y0 + dy:y1 + dy, dx:dx + width] for dy in range(3) for dx in range(3)]
        scores = np.zeros((9, h, width))
        # i < j in lexicographic order adds to every score in ascending j
        for i in range(9):
            for j in range(i + 1, 9):
                diff = cells[i] - cells[j]
                d = np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2 + diff[..., 2] ** 2)
                scores[i] += d
                scores[j] += d
        first = np.argmin(scores, axis=0)
        last = 8 - np.argmax(scores[::-1], axis=0)
        stack = np.stack(cells)
        lo = np.take_along_axis(stack, first[None, ..., None], axis=0)[0]
        hi = np.take_along_axis(stack, last[None, ..., None], axis=0)[0]
        diff = hi - lo
        return np.sqrt(diff[..., 0] ** 2 + diff[..., 1] ** 2 + diff[..., 2] ** 2)

    return ScalarPlane(map_rows(run, img.height, workers))


def masks(zero_mean: bool = False) -> tuple[np.ndarray, np.ndarray]:
    if not zero_mean:
        return FX, FY
    return FX - FX.mean(), FY - FY.mean()


def apply_masks(
    plane: ScalarPlane,
    border: BorderPolicy = BorderPolicy.REPLICATE,
    zero_mean: bool = False,
    workers: Workers = 1,
) -> GradientField:
    """Gradient of ``plane`` under the collection-scheme masks.

    The masks are applied by true convolution (kernel rotated 180 degrees),
    so a unit impulse reproduces each mask unmirrored around it.
    """
    fx, fy = masks(zero_mean)
    gx = convolve(plane.data, fx, border, workers)
    gy = convolve(plane.data, fy, border, workers)
    return _gradient(gx, gy)


def _gradient(gx: np.ndarray, gy: np.ndarray) -> GradientField:
    magnitude = np.hypot(gx, gy)
    direction = np.arctan2(gy, gx)
    direction[magnitude == 0] = 0.0
    # keep the half-open range (-pi, pi]
    direction[direction == -np.pi] = np.pi
    return GradientField(ScalarPlane(magnitude), ScalarPlane(direction))


def _direction_codes(theta: np.ndarray) -> np.ndarray:
    """Vectorised bin index into ``Direction4`` order (0, 45, 90, 135)."""
    shifted = np.mod(np.asarray(theta, dtype=np.float64) + np.pi / 8, np.pi)
    codes = np.floor(shifted / (np.pi / 4)).astype(np.int64)
    return np.minimum(codes, 3)


def quantize_direction(theta: float) -> Direction4:
    """Bin an angle (modulo pi) into the nearest of 0, 45, 90 or 135 degrees."""
    if not math.isfinite(theta):
        raise ValueError(f"direction must be finite, got {theta}")
    return _DIRECTION_CODES[int(_direction_codes(theta))]


def non_max_suppress(
    g: GradientField,
    strict: bool = True,
    border: BorderPolicy | None = BorderPolicy.REPLICATE,
    workers: Workers = 1,
) -> ScalarPlane:
    """Thin the magnitude plane along the quantised gradient direction.

    ``strict`` keeps a pixel only when it exceeds both neighbours. Otherwise
    a pixel must be >= its backward neighbour and > its forward one, so a
    two-pixel plateau keeps exactly its forward pixel.

    Neighbours outside the image come from ``border``, the same policy used
    to build the gradient. With ``border=None`` they are ignored, which lets
    diagonal responses leak through the first and last rows.
    """
    mag = g.magnitude.data
    codes = _direction_codes(g.direction.data)
    if border is None:
        src = np.pad(mag, 1, mode="constant", constant_values=-np.inf)
    else:
        src = pad(mag, BorderPolicy.parse(border))
    height, width = mag.shape

    def run(y0: int, y1: int) -> np.ndarray:
        m = mag[y0:y1]
        c = codes[y0:y1]
        keep = np.zeros(m.shape, dtype=bool)
        for code, direction in enumerate(_DIRECTION_CODES):
            (by, bx), (fy, fx) = _NEIGHBOURS[direction]
            back = src[y0 + 1 + by:y1 + 1 + by, 1 + bx:1 + bx + width]
            fwd = src[y0 + 1 + fy:y1 + 1 + fy, 1 + fx:1 + fx + width]
            if strict:
                ok = (m > back) & (m > fwd)
            else:
                ok = (m >= back) & (m > fwd)
            keep |= (c == code) & ok
        return np.where(keep, m, 0.0)

    return ScalarPlane(map_rows(run, height, workers))


def threshold(plane: ScalarPlane, t: float) -> EdgeMap:
    """Mark pixels strictly above ``t`` times the plane maximum."""
    check_fraction(t)
    peak = float(plane.data.max())
    if peak <= 0.0:
        return EdgeMap(np.zeros(plane.shape, dtype=bool))
    return EdgeMap(plane.data > t * peak)


def edge_strength(img: ColorImage, params: VosParams = VosParams(), workers: Workers = 1) -> ScalarPlane:
    """Suppressed gradient magnitude, i.e. the pipeline up to thresholding."""
    vr = vr_field(img, params.border, workers)
    grad = apply_masks(vr, params.border, params.zero_mean_masks, workers)
    return non_max_suppress(grad, params.strict_nms, params.border, workers)


def detect_edges(img: ColorImage, params: VosParams = VosParams(), workers: Workers = 1) -> EdgeMap:
    return threshold(edge_strength(img, params, workers), params.threshold)
