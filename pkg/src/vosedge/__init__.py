"""Color edge detection with vector order statistics.

Also ships five grayscale reference detectors, Pratt figure-of-merit scoring
and a synthetic ground-truth generator.
"""
from .baselines import BaselineKind, CannyParams, canny_baseline, gradient_baseline, laplacian_baseline
from .errors import (
    BothEmpty,
    CorruptData,
    DimensionMismatch,
    EmptyTruth,
    InvalidSpec,
    InvalidThreshold,
    OutOfBounds,
    UnsupportedFormat,
    VosEdgeError,
)
from .evaluate import (
    PfomResult,
    SyntheticSpec,
    compare_detectors,
    distance_transform,
    generate_synthetic,
    pfom,
)
from .image import (
    BorderPolicy,
    ColorImage,
    EdgeMap,
    GrayImage,
    PixelVector,
    ScalarPlane,
    extract_window,
    load_image,
    save_image,
    to_grayscale,
)
from .vos import VosParams, detect_edges

__version__ = "0.1.0"
