"""Circle detection with a dense (row, column, radius) Hough accumulator."""
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from coinrec import kernels
from coinrec.errors import NoCircleFound
from coinrec.imaging import round_half_away, sobel_edges


@dataclass(frozen=True)
class HoughParams:
    r_min: int
    r_max: int
    angular_step: float = 1.0

    def __post_init__(self):
        if not (1 <= self.r_min <= self.r_max):
            raise ValueError(f"need 1 <= r_min <= r_max, got {self.r_min}, {self.r_max}")
        # coverage gets sparse above ~5 degrees; coarse steps are still valid for probing
        if not (0 < self.angular_step <= 90):
            raise ValueError(f"angular_step must be in (0, 90], got {self.angular_step}")

    @property
    def radii(self):
        return np.arange(self.r_min, self.r_max + 1)

    @classmethod
    def for_image(cls, height, width, angular_step=1.0):
        """Default search range: 0.2 to 0.5 of the shorter side."""
        side = min(height, width)
        r_min = max(1, int(round_half_away(0.2 * side)))
        r_max = max(r_min, int(0.5 * side))
        return cls(r_min, r_max, angular_step)


class CircleHypothesis(NamedTuple):
    u: int  # center column
    v: int  # center row
    r: int
    votes: int


@dataclass
class HoughAccumulator:
    counts: np.ndarray  # (height, width, n_radii) int32
    r_min: int

    @property
    def shape(self):
        return self.counts.shape


@lru_cache(maxsize=64)
def vote_offsets(r_min, r_max, angular_step):
    """Distinct rounded (dx, dy) center offsets per radius.

    Returns ``(dx, dy, bounds)`` where radius ``r_min + i`` owns
    ``dx[bounds[i]:bounds[i+1]]``. De-duplicating the offsets is the same as
    letting each (edge pixel, radius) pair vote once per distinct center.
    """
    n_angles = int(round(360.0 / angular_step))
    theta = np.deg2rad(np.arange(n_angles) * angular_step)
    cos, sin = np.cos(theta), np.sin(theta)
    dxs, dys, bounds = [], [], [0]
    for r in range(r_min, r_max + 1):
        ox = round_half_away(r * cos).astype(np.int64)
        oy = round_half_away(r * sin).astype(np.int64)
        pairs = np.unique(np.stack([oy, ox], axis=1), axis=0)
        dys.append(pairs[:, 0])
        dxs.append(pairs[:, 1])
        bounds.append(bounds[-1] + len(pairs))
    dx = np.concatenate(dxs)
    dy = np.concatenate(dys)
    bounds = np.asarray(bounds, dtype=np.int64)
    for a in (dx, dy, bounds):
        a.setflags(write=False)
    return dx, dy, bounds


def accumulate(edges, params, backend=None):
    edges = np.asarray(edges, dtype=bool)
    h, w = edges.shape
    counts = np.zeros((h, w, params.r_max - params.r_min + 1), dtype=np.int32)
    ys, xs = np.nonzero(edges)
    if len(xs):
        dx, dy, bounds = vote_offsets(params.r_min, params.r_max, float(params.angular_step))
        kernels.hough_vote(xs, ys, dx, dy, bounds, counts, backend=backend)
    return HoughAccumulator(counts, params.r_min)


def find_best_circle(acc, params=None):
    """Global accumulator maximum; ties go to smallest r, then v, then u."""
    counts = acc.counts
    # (r, v, u) ordering makes argmax's first-hit rule the tie-break
    by_radius = np.transpose(counts, (2, 0, 1))
    flat = int(np.argmax(by_radius))
    ri, v, u = np.unravel_index(flat, by_radius.shape)
    votes = int(by_radius[ri, v, u])
    if votes == 0:
        raise NoCircleFound("accumulator is empty")
    r_min = acc.r_min if params is None else params.r_min
    return CircleHypothesis(int(u), int(v), int(r_min + ri), votes)


def detect_coin(img, params=None, sobel_threshold=None, backend=None):
    img = np.asarray(img)
    if params is None:
        params = HoughParams.for_image(*img.shape[:2])
    edges = sobel_edges(img, sobel_threshold)
    return find_best_circle(accumulate(edges, params, backend=backend), params)
