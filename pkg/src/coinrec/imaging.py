"""Raster preprocessing: grayscale, Sobel edges, rotation, circular crop, resize.

Images are plain numpy arrays:

* RGB image: ``(height, width, 3)`` uint8
* gray image: ``(height, width)`` uint8
* edge map: ``(height, width)`` bool
"""
import math

import numpy as np

from coinrec import kernels
from coinrec.errors import CircleOutOfBounds, ImageTooSmall

LUMA_WEIGHTS = (0.299, 0.587, 0.114)
DEFAULT_THRESHOLD_FRACTION = 0.25

SOBEL_X = np.array([[-1, 0, 1], [-2, 0, 2], [-1, 0, 1]], dtype=np.float64)
SOBEL_Y = SOBEL_X.T.copy()


def round_half_away(x):
    """Round to nearest integer, halves away from zero (the one rounding rule used everywhere)."""
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def to_uint8(x):
    return np.clip(round_half_away(x), 0, 255).astype(np.uint8)


def as_gray(img):
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D gray image, got shape {img.shape}")
    return img


def to_grayscale(img):
    """BT.601 luma of an ``(h, w, 3)`` uint8 image, rounded to uint8."""
    img = np.asarray(img)
    if img.ndim == 2:
        return img.astype(np.uint8, copy=True)
    if img.ndim != 3 or img.shape[2] != 3:
        raise ValueError(f"expected an (h, w, 3) image, got shape {img.shape}")
    rgb = img.astype(np.float64)
    r, g, b = LUMA_WEIGHTS
    return to_uint8(r * rgb[..., 0] + g * rgb[..., 1] + b * rgb[..., 2])


def sobel_magnitude(img):
    """Euclidean Sobel gradient magnitude with replicate padding."""
    img = as_gray(img)
    h, w = img.shape
    if h < 3 or w < 3:
        raise ImageTooSmall(f"Sobel needs at least 3x3 pixels, got {w}x{h}")
    p = np.pad(img.astype(np.float64), 1, mode="edge")
    gx = np.zeros((h, w))
    gy = np.zeros((h, w))
    for dy in range(3):
        for dx in range(3):
            win = p[dy:dy + h, dx:dx + w]
            if SOBEL_X[dy, dx]:
                gx += SOBEL_X[dy, dx] * win
            if SOBEL_Y[dy, dx]:
                gy += SOBEL_Y[dy, dx] * win
    return np.sqrt(gx * gx + gy * gy)


def sobel_edges(img, threshold=None):
    """Edge map where gradient magnitude >= threshold.

    With ``threshold=None`` the threshold is a quarter of the largest magnitude
    in the image; a flat image then has no edges at all.
    """
    mag = sobel_magnitude(img)
    if threshold is None:
        peak = mag.max()
        if peak == 0:
            return np.zeros(mag.shape, dtype=bool)
        threshold = DEFAULT_THRESHOLD_FRACTION * peak
    return mag >= threshold


def _exact_cos_sin(angle):
    a = angle % 360
    quadrant = {0: (1.0, 0.0), 90: (0.0, 1.0), 180: (-1.0, 0.0), 270: (0.0, -1.0)}
    if a in quadrant:
        return quadrant[a]
    t = math.radians(a)
    return math.cos(t), math.sin(t)


def rotate(img, angle):
    """Rotate counterclockwise (as displayed) by ``angle`` degrees about the image center.

    Inverse mapping with bilinear interpolation; source positions outside the
    image read as 0. The output keeps the input size.
    """
    img = as_gray(img)
    if angle % 360 == 0:
        return img.copy()
    h, w = img.shape
    c, s = _exact_cos_sin(angle)
    cx, cy = (w - 1) / 2.0, (h - 1) / 2.0
    ys, xs = np.mgrid[0:h, 0:w].astype(np.float64)
    dx = xs - cx
    dy = ys - cy
    # y grows downward, so a visual CCW turn maps destination -> source like this
    sx = cx + c * dx - s * dy
    sy = cy + s * dx + c * dy
    vals = kernels.bilinear_sample(img, sx, sy)
    return to_uint8(vals).reshape(h, w)


def crop_to_circle(img, circle):
    """Bounding square of ``circle`` with everything outside the disc set to 0."""
    img = as_gray(img)
    h, w = img.shape
    u, v, r = int(circle.u), int(circle.v), int(circle.r)
    x0, y0 = u - r, v - r
    side = 2 * r + 1
    if x0 + side <= 0 or y0 + side <= 0 or x0 >= w or y0 >= h:
        raise CircleOutOfBounds(f"circle ({u}, {v}, r={r}) misses the {w}x{h} image")
    out = np.zeros((side, side), dtype=np.uint8)
    sx0, sy0 = max(x0, 0), max(y0, 0)
    sx1, sy1 = min(x0 + side, w), min(y0 + side, h)
    out[sy0 - y0:sy1 - y0, sx0 - x0:sx1 - x0] = img[sy0:sy1, sx0:sx1]
    yy, xx = np.mgrid[0:side, 0:side]
    outside = (xx - r) ** 2 + (yy - r) ** 2 > r * r
    out[outside] = 0
    return out


def resize(img, out_w, out_h):
    """Bilinear resize using pixel-center alignment and edge clamping."""
    img = as_gray(img)
    if out_w < 1 or out_h < 1:
        raise ValueError("output size must be at least 1x1")
    h, w = img.shape
    if (w, h) == (out_w, out_h):
        return img.copy()
    sx = (np.arange(out_w) + 0.5) * (w / out_w) - 0.5
    sy = (np.arange(out_h) + 0.5) * (h / out_h) - 0.5
    sx = np.clip(sx, 0, w - 1)
    sy = np.clip(sy, 0, h - 1)
    gy, gx = np.meshgrid(sy, sx, indexing="ij")
    vals = kernels.bilinear_sample(img, gx, gy)
    return to_uint8(vals).reshape(out_h, out_w)
