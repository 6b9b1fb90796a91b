"""Pratt figure of merit scoring, exact distance transform and synthetic
ground-truth images."""
from __future__ import annotations

import csv
import io
import json
from dataclasses import asdict, dataclass
from enum import Enum
from typing import Callable, Iterable, Sequence

import numpy as np

from ._parallel import Workers
from .baselines import DEFAULT_THRESHOLD, BaselineKind, CannyParams, run_baseline
from .errors import BothEmpty, DimensionMismatch, EmptyTruth, InvalidSpec
from .image import BorderPolicy, ColorImage, EdgeMap, PixelVector, ScalarPlane, to_grayscale
from .vos import VosParams, detect_edges

__all__ = [
    "DEFAULT_M",
    "REFERENCE_SCORES",
    "PfomResult",
    "Profile",
    "Orientation",
    "SyntheticSpec",
    "Detector",
    "distance_transform",
    "squared_distance_transform",
    "pfom",
    "generate_synthetic",
    "default_detectors",
    "compare_detectors",
    "rank",
    "to_csv",
    "to_json",
    "format_report",
]

DEFAULT_M = 1.0 / 9.0

# Published figure-of-merit values for the six detectors; shown as a
# citation in reports, never compared against local runs.
REFERENCE_SCORES = {
    "sobel": 0.4209,
    "prewitt": 0.4195,
    "roberts": 0.4181,
    "laplacian": 0.7048,
    "canny": 0.8472,
    "vos": 0.8480,
}


# --------------------------------------------------------------------------
# distance transform
# --------------------------------------------------------------------------

def _envelope_1d(f: np.ndarray) -> np.ndarray:
    """Lower envelope of parabolas ``(q - v)**2 + f[v]`` over finite ``f[v]``."""
    n = len(f)
    sites = [v for v in range(n) if np.isfinite(f[v])]
    out = np.empty(n)
    if not sites:
        out.fill(np.inf)
        return out
    v = [sites[0]]
    z = [-np.inf]
    for q in sites[1:]:
        while True:
            p = v[-1]
            s = ((f[q] + q * q) - (f[p] + p * p)) / (2.0 * (q - p))
            if s <= z[-1]:
                v.pop()
                z.pop()
                if v:
                    continue
                v.append(q)
                z.append(-np.inf)
            else:
                v.append(q)
                z.append(s)
            break
    k = 0
    for q in range(n):
        while k + 1 < len(v) and z[k + 1] < q:
            k += 1
        out[q] = (q - v[k]) ** 2 + f[v[k]]
    return out


def squared_distance_transform(truth: EdgeMap) -> np.ndarray:
    """Squared Euclidean distance to the nearest edge pixel, exact integers.

    Separable: an exact 1-D scan down each column, then the lower envelope
    of parabolas along each row.
    """
    mask = truth.data
    if not mask.any():
        raise EmptyTruth("distance transform needs at least one edge pixel")
    h, w = mask.shape

    # vertical pass: distance to nearest edge pixel in the same column
    col = np.full((h, w), np.inf)
    run = np.full(w, np.inf)
    for y in range(h):
        run = np.where(mask[y], 0.0, run + 1)
        col[y] = run
    run = np.full(w, np.inf)
    for y in range(h - 1, -1, -1):
        run = np.where(mask[y], 0.0, run + 1)
        col[y] = np.minimum(col[y], run)
    col = col ** 2

    out = np.empty((h, w))
    for y in range(h):
        out[y] = _envelope_1d(col[y])
    return out


def distance_transform(truth: EdgeMap) -> ScalarPlane:
    return ScalarPlane(np.sqrt(squared_distance_transform(truth)))


# --------------------------------------------------------------------------
# figure of merit
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PfomResult:
    score: float
    n_actual: int
    n_detected: int
    m: float = DEFAULT_M


def pfom(detected: EdgeMap, actual: EdgeMap, m: float = DEFAULT_M) -> PfomResult:
    """Pratt figure of merit of ``detected`` against the reference ``actual``.

    ``R = sum_k 1 / (1 + m * d_k**2) / max(N_I, N_A)`` where ``d_k`` is the
    distance from detected pixel ``k`` to the nearest reference pixel.
    """
    if detected.shape != actual.shape:
        raise DimensionMismatch(f"detected {detected.shape} vs actual {actual.shape}")
    if not m >= 0:
        raise ValueError(f"scaling constant m must be non-negative, got {m}")
    n_i, n_a = actual.count, detected.count
    if n_i == 0 and n_a == 0:
        raise BothEmpty("both edge maps are empty")
    if n_i == 0 or n_a == 0:
        return PfomResult(0.0, n_i, n_a, m)
    d2 = squared_distance_transform(actual)[detected.data]
    score = float(np.sum(1.0 / (1.0 + m * d2))) / max(n_i, n_a)
    return PfomResult(score, n_i, n_a, m)


# --------------------------------------------------------------------------
# synthetic images
# --------------------------------------------------------------------------

class Profile(Enum):
    STEP = "step"
    RAMP = "ramp"
    ROOF = "roof"
    RIDGE = "ridge"


class Orientation(Enum):
    VERTICAL = "vertical"
    HORIZONTAL = "horizontal"


@dataclass(frozen=True)
class SyntheticSpec:
    """Description of a synthetic test image.

    For a vertical orientation the profile runs along x, so edges are
    columns; horizontal swaps the roles of rows and columns.
    """

    profile: Profile = Profile.STEP
    orientation: Orientation = Orientation.VERTICAL
    width: int = 64
    height: int = 64
    color_a: PixelVector = PixelVector(0, 0, 0)
    color_b: PixelVector = PixelVector(255, 255, 255)
    transition_width: int = 1
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        try:
            object.__setattr__(self, "profile", Profile(self.profile))
            object.__setattr__(self, "orientation", Orientation(self.orientation))
        except ValueError as exc:
            raise InvalidSpec(str(exc)) from None
        for name in ("color_a", "color_b"):
            color = tuple(int(c) for c in getattr(self, name))
            if len(color) != 3 or not all(0 <= c <= 255 for c in color):
                raise InvalidSpec(f"{name} must be three channels in [0, 255], got {color}")
            object.__setattr__(self, name, PixelVector(*color))
        if self.width < 2 or self.height < 2:
            raise InvalidSpec(f"image must be at least 2x2, got {self.width}x{self.height}")
        if not 1 <= self.transition_width < min(self.width, self.height):
            raise InvalidSpec(f"transition_width must lie in [1, {min(self.width, self.height)})")
        if not self.noise_sigma >= 0:
            raise InvalidSpec(f"noise_sigma must be non-negative, got {self.noise_sigma}")
        length = self.width if self.orientation is Orientation.VERTICAL else self.height
        if max(_truth_lines(self.profile, length, self.transition_width)) >= length:
            raise InvalidSpec(f"a {self.transition_width}-pixel ridge does not fit in {length} pixels")


def _truth_lines(profile: Profile, length: int, tw: int) -> list[int]:
    mid = length // 2
    if profile is Profile.RIDGE:
        start = mid - tw // 2
        return [start, start + tw]
    return [mid]


def _blend_weights(profile: Profile, length: int, tw: int) -> np.ndarray:
    """Fraction of ``color_b`` at each position across the profile."""
    x = np.arange(length, dtype=np.float64)
    mid = length // 2
    start = mid - tw // 2
    if profile is Profile.STEP:
        return (x >= mid).astype(np.float64)
    if profile is Profile.RAMP:
        return np.clip((x - start + 0.5) / tw, 0.0, 1.0)
    if profile is Profile.ROOF:
        # apex on the midline, half-width (tw + 1) / 2
        return np.clip(1.0 - np.abs(x - mid) / ((tw + 1) / 2.0), 0.0, 1.0)
    return ((x >= start) & (x < start + tw)).astype(np.float64)


def generate_synthetic(spec: SyntheticSpec) -> tuple[ColorImage, EdgeMap]:
    vertical = spec.orientation is Orientation.VERTICAL
    length = spec.width if vertical else spec.height
    weights = _blend_weights(spec.profile, length, spec.transition_width)
    a = np.asarray(spec.color_a, dtype=np.float64)
    b = np.asarray(spec.color_b, dtype=np.float64)
    line = a + weights[:, None] * (b - a)                      # (length, 3)
    if vertical:
        values = np.broadcast_to(line[None], (spec.height, spec.width, 3)).copy()
    else:
        values = np.broadcast_to(line[:, None], (spec.height, spec.width, 3)).copy()
    if spec.noise_sigma > 0:
        rng = np.random.default_rng(spec.seed)
        values += rng.normal(0.0, spec.noise_sigma, size=values.shape)
    image = ColorImage(np.clip(np.rint(values), 0, 255).astype(np.uint8))

    truth = np.zeros((spec.height, spec.width), dtype=bool)
    for pos in _truth_lines(spec.profile, length, spec.transition_width):
        if vertical:
            truth[:, pos] = True
        else:
            truth[pos, :] = True
    return image, EdgeMap(truth)


# --------------------------------------------------------------------------
# detector comparison
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Detector:
    name: str
    run: Callable[[ColorImage], EdgeMap]


def default_detectors(
    vos_params: VosParams = VosParams(),
    baseline_threshold: float = DEFAULT_THRESHOLD,
    canny: CannyParams = CannyParams(),
    border: BorderPolicy = BorderPolicy.REPLICATE,
    workers: Workers = 1,
) -> list[Detector]:
    """The five grayscale baselines followed by the color detector."""
    detectors = []
    for kind in BaselineKind:
        def run(img: ColorImage, kind=kind) -> EdgeMap:
            return run_baseline(to_grayscale(img), kind, baseline_threshold, canny, border, workers)
        detectors.append(Detector(kind.value, run))
    detectors.append(Detector("vos", lambda img: detect_edges(img, vos_params, workers)))
    return detectors


def compare_detectors(
    img: ColorImage,
    truth: EdgeMap,
    detectors: Sequence[Detector],
    m: float = DEFAULT_M,
) -> list[tuple[str, PfomResult]]:
    """Score every detector against ``truth``; rows follow ``detectors`` order."""
    if img.shape != truth.shape:
        raise DimensionMismatch(f"image {img.shape} vs truth {truth.shape}")
    return [(d.name, pfom(d.run(img), truth, m)) for d in detectors]


def rank(rows: Iterable[tuple[str, PfomResult]]) -> list[tuple[str, PfomResult]]:
    """Descending score; equal scores keep their input order."""
    return sorted(rows, key=lambda row: -row[1].score)


def to_csv(rows: Iterable[tuple[str, PfomResult]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["name", "pfom", "n_actual", "n_detected"])
    for name, res in rows:
        writer.writerow([name, repr(res.score), res.n_actual, res.n_detected])
    return buf.getvalue()


def to_json(rows: Iterable[tuple[str, PfomResult]]) -> str:
    payload = [{"name": name, **asdict(res)} for name, res in rows]
    return json.dumps(payload, indent=2)


def format_report(rows: Sequence[tuple[str, PfomResult]]) -> str:
    lines = [f"{'rank':>4}  {'detector':<10} {'pfom':>8} {'N_I':>6} {'N_A':>6}"]
    for i, (name, res) in enumerate(rank(rows), 1):
        lines.append(f"{i:>4}  {name:<10} {res.score:8.4f} {res.n_actual:>6} {res.n_detected:>6}")
    cited = ", ".join(f"{k} {v:.4f}" for k, v in REFERENCE_SCORES.items())
    lines.append(f"published reference (different test image, not comparable): {cited}")
    return "\n".join(lines)
