"""Grayscale reference detectors: Sobel, Prewitt, Roberts, Laplacian, Canny."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy import ndimage

from ._parallel import Workers
from .errors import InvalidThreshold, check_fraction
from .filters import correlate, gaussian_blur
from .image import BorderPolicy, EdgeMap, GrayImage, ScalarPlane
from .vos import GradientField, non_max_suppress, threshold

__all__ = [
    "BaselineKind",
    "CannyParams",
    "KERNELS",
    "LAPLACIAN",
    "gradient_magnitude",
    "gradient_baseline",
    "laplacian_magnitude",
    "laplacian_baseline",
    "canny_baseline",
    "hysteresis",
    "run_baseline",
]

DEFAULT_THRESHOLD = 0.2


class BaselineKind(Enum):
    SOBEL = "sobel"
    PREWITT = "prewitt"
    ROBERTS = "roberts"
    LAPLACIAN = "laplacian"
    CANNY = "canny"


_SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
_PREWITT_X = np.array([[-1, 0, 1], [-1, 0, 1], [-1, 0, 1]], dtype=np.float64)
_ROBERTS_1 = np.array([[1, 0], [0, -1]], dtype=np.float64)
_ROBERTS_2 = np.array([[0, 1], [-1, 0]], dtype=np.float64)

KERNELS = {
    BaselineKind.SOBEL: (_SOBEL_X, _SOBEL_X.T),
    BaselineKind.PREWITT: (_PREWITT_X, _PREWITT_X.T),
    BaselineKind.ROBERTS: (_ROBERTS_1, _ROBERTS_2),
}
LAPLACIAN = np.array([[0, 1, 0], [1, -4, 1], [0, 1, 0]], dtype=np.float64)


@dataclass(frozen=True)
class CannyParams:
    gaussian_sigma: float = 1.0
    low_ratio: float = 0.10
    high_ratio: float = 0.25

    def __post_init__(self):
        if not self.gaussian_sigma > 0:
            raise ValueError(f"gaussian_sigma must be positive, got {self.gaussian_sigma}")
        if not (0 < self.low_ratio < self.high_ratio < 1):
            raise InvalidThreshold(
                f"need 0 < low_ratio < high_ratio < 1, got {self.low_ratio}, {self.high_ratio}"
            )


def _responses(values: np.ndarray, kind: BaselineKind, border: BorderPolicy, workers: Workers):
    kx, ky = KERNELS[kind]
    # Roberts kernels are anchored on their top-left cell
    anchor = (0, 0) if kind is BaselineKind.ROBERTS else None
    gx = correlate(values, kx, border, workers, anchor=anchor)
    gy = correlate(values, ky, border, workers, anchor=anchor)
    return gx, gy


def gradient_magnitude(img: GrayImage, kind: BaselineKind = BaselineKind.SOBEL,
                       border: BorderPolicy = BorderPolicy.REPLICATE, workers: Workers = 1) -> ScalarPlane:
    gx, gy = _responses(img.data, BaselineKind(kind), border, workers)
    return ScalarPlane(np.sqrt(gx * gx + gy * gy))


def gradient_baseline(img: GrayImage, kind: BaselineKind = BaselineKind.SOBEL, t: float = DEFAULT_THRESHOLD,
                      border: BorderPolicy = BorderPolicy.REPLICATE, workers: Workers = 1) -> EdgeMap:
    """Sobel, Prewitt or Roberts magnitude thresholded at ``t`` times its max."""
    kind = BaselineKind(kind)
    if kind not in KERNELS:
        raise ValueError(f"{kind.value} is not a first-derivative detector")
    check_fraction(t)
    return threshold(gradient_magnitude(img, kind, border, workers), t)


def laplacian_magnitude(img: GrayImage, border: BorderPolicy = BorderPolicy.REPLICATE,
                        workers: Workers = 1) -> ScalarPlane:
    return ScalarPlane(np.abs(correlate(img.data, LAPLACIAN, border, workers)))


def laplacian_baseline(img: GrayImage, t: float = DEFAULT_THRESHOLD,
                       border: BorderPolicy = BorderPolicy.REPLICATE, workers: Workers = 1) -> EdgeMap:
    """Threshold ``|Laplacian|`` at a fraction of its max (no zero crossings)."""
    check_fraction(t)
    return threshold(laplacian_magnitude(img, border, workers), t)


def canny_baseline(img: GrayImage, p: CannyParams = CannyParams(),
                   border: BorderPolicy = BorderPolicy.REPLICATE, workers: Workers = 1) -> EdgeMap:
    smooth = gaussian_blur(img.data, p.gaussian_sigma, border, workers)
    gx = correlate(smooth, _SOBEL_X, border, workers)
    gy_down = correlate(smooth, _SOBEL_X.T, border, workers)
    magnitude = np.sqrt(gx * gx + gy_down * gy_down)
    # the shared NMS neighbour table measures angles with y pointing up
    direction = np.arctan2(-gy_down, gx)
    direction[magnitude == 0] = 0.0
    direction[direction == -np.pi] = np.pi
    grad = GradientField(ScalarPlane(magnitude), ScalarPlane(direction))
    thin = non_max_suppress(grad, strict=False, border=border, workers=workers).data

    peak = float(magnitude.max())
    if peak <= 0.0:
        return EdgeMap(np.zeros(thin.shape, dtype=bool))
    strong = thin > p.high_ratio * peak
    weak = thin > p.low_ratio * peak
    return EdgeMap(hysteresis(strong, weak))


def hysteresis(strong: np.ndarray, weak: np.ndarray) -> np.ndarray:
    """Keep the 8-connected components of ``weak | strong`` that touch ``strong``."""
    candidates = weak | strong
    labels, count = ndimage.label(candidates, structure=np.ones((3, 3), dtype=bool))
    if count == 0:
        return np.zeros_like(candidates)
    seeded = np.zeros(count + 1, dtype=bool)
    seeded[np.unique(labels[strong])] = True
    seeded[0] = False
    return seeded[labels]


def run_baseline(img: GrayImage, kind: BaselineKind, t: float = DEFAULT_THRESHOLD,
                 canny: CannyParams = CannyParams(), border: BorderPolicy = BorderPolicy.REPLICATE,
                 workers: Workers = 1) -> EdgeMap:
    kind = BaselineKind(kind)
    if kind is BaselineKind.CANNY:
        return canny_baseline(img, canny, border, workers)
    if kind is BaselineKind.LAPLACIAN:
        return laplacian_baseline(img, t, border, workers)
    return gradient_baseline(img, kind, t, border, workers)
