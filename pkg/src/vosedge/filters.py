"""Small dense filters with a fixed tap order.

Each output pixel is accumulated tap by tap in row-major kernel order, which
keeps results bit-identical no matter how the rows are banded.
"""
from __future__ import annotations

import numpy as np

from ._parallel import Workers, map_rows
from .image import BorderPolicy, pad


def correlate(
    array: np.ndarray,
    kernel,
    border: BorderPolicy = BorderPolicy.REPLICATE,
    workers: Workers = 1,
    anchor: tuple[int, int] | None = None,
) -> np.ndarray:
    """Cross-correlate a 2-D array with a square kernel.

    Kernel cell ``(r, c)`` multiplies input pixel ``(y + r - ar, x + c - ac)``
    where ``(ar, ac)`` is the anchor, by default the kernel centre.
    """
    kernel = np.asarray(kernel, dtype=np.float64)
    k = kernel.shape[0]
    if kernel.shape != (k, k):
        raise ValueError(f"kernel must be square, got {kernel.shape}")
    ar, ac = (k // 2, k // 2) if anchor is None else anchor
    if ar != ac:
        raise ValueError("anchor must lie on the kernel diagonal")
    src = pad(np.asarray(array, dtype=np.float64), border, before=ar, after=k - 1 - ar)
    width = array.shape[1]
    taps = [(r, c, kernel[r, c]) for r in range(k) for c in range(k) if kernel[r, c] != 0.0]
    # Zero-sum (derivative) kernels accumulate differences from the anchor
    # pixel so that flat regions cancel exactly instead of leaving rounding
    # residue that a relative threshold would then pick up.
    relative = kernel.sum() == 0.0

    def run(y0: int, y1: int) -> np.ndarray:
        out = np.zeros((y1 - y0, width), dtype=np.float64)
        base = src[y0 + ar:y1 + ar, ac:ac + width] if relative else 0.0
        for r, c, w in taps:
            out += w * (src[y0 + r:y1 + r, c:c + width] - base)
        return out

    return map_rows(run, array.shape[0], workers)


def convolve(array: np.ndarray, kernel, border: BorderPolicy = BorderPolicy.REPLICATE, workers: Workers = 1) -> np.ndarray:
    """True convolution: correlation with the kernel rotated by 180 degrees."""
    kernel = np.asarray(kernel, dtype=np.float64)
    return correlate(array, kernel[::-1, ::-1], border, workers)


def gaussian_kernel1d(sigma: float) -> np.ndarray:
    """Normalised Gaussian taps truncated at radius ``ceil(3 * sigma)``."""
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    radius = int(np.ceil(3.0 * sigma))
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-0.5 * (x / sigma) ** 2)
    return taps / taps.sum()


def gaussian_blur(array: np.ndarray, sigma: float, border: BorderPolicy = BorderPolicy.REPLICATE,
                  workers: Workers = 1) -> np.ndarray:
    taps = gaussian_kernel1d(sigma)
    radius = len(taps) // 2
    src = np.asarray(array, dtype=np.float64)
    height, width = src.shape

    # horizontal pass, then vertical; each is a fixed-order tap sum
    padded = pad(src, border, before=radius)[radius:radius + height]

    def run_rows(y0: int, y1: int) -> np.ndarray:
        out = np.zeros((y1 - y0, width))
        for i, w in enumerate(taps):
            out += w * padded[y0:y1, i:i + width]
        return out

    tmp = map_rows(run_rows, height, workers)
    padded = pad(tmp, border, before=radius)[:, radius:radius + width]

    def run_cols(y0: int, y1: int) -> np.ndarray:
        out = np.zeros((y1 - y0, width))
        for i, w in enumerate(taps):
            out += w * padded[y0 + i:y1 + i]
        return out

    return map_rows(run_cols, height, workers)
