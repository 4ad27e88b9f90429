"""Numpy implementations of the compiled kernels (same signatures, same results)."""
import numpy as np

# edge pixels per bincount batch; bounds peak memory
_CHUNK = 256


def hough_vote(xs, ys, dx, dy, bounds, counts):
    h, w, n_r = counts.shape
    radius_idx = np.repeat(np.arange(n_r, dtype=np.int64), np.diff(bounds))
    size = counts.size
    flat = counts.reshape(-1)
    for start in range(0, len(xs), _CHUNK):
        x = xs[start:start + _CHUNK, None]
        y = ys[start:start + _CHUNK, None]
        u = x - dx[None, :]
        v = y - dy[None, :]
        ok = (u >= 0) & (u < w) & (v >= 0) & (v < h)
        idx = (v * w + u) * n_r + radius_idx[None, :]
        flat += np.bincount(idx[ok], minlength=size).astype(np.int32)


def bilinear_sample(img, sx, sy):
    h, w = img.shape
    x0 = np.floor(sx).astype(np.int64)
    y0 = np.floor(sy).astype(np.int64)
    fx = sx - x0
    fy = sy - y0
    x1 = x0 + 1
    y1 = y0 + 1

    def pick(yy, xx):
        ok = (xx >= 0) & (xx < w) & (yy >= 0) & (yy < h)
        vals = np.zeros(len(sx), dtype=np.float64)
        vals[ok] = img[yy[ok], xx[ok]]
        return vals

    top = (1.0 - fx) * pick(y0, x0) + fx * pick(y0, x1)
    bot = (1.0 - fx) * pick(y1, x0) + fx * pick(y1, x1)
    return (1.0 - fy) * top + fy * bot
