"""Binary PGM (P5) / PPM (P6) reading and writing; PNG via Pillow when installed."""
import os

import numpy as np

from coinrec.errors import CorruptImage, UnsupportedFormat

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"


def _header_tokens(data, count):
    """Read ``count`` whitespace-separated header tokens after the magic, skipping comments."""
    tokens = []
    i = 2
    n = len(data)
    while len(tokens) < count:
        while i < n and data[i:i + 1].isspace():
            i += 1
        if i >= n:
            raise CorruptImage("header ends early")
        if data[i:i + 1] == b"#":
            while i < n and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
            continue
        start = i
        while i < n and not data[i:i + 1].isspace() and data[i:i + 1] != b"#":
            i += 1
        tokens.append(data[start:i])
    # exactly one whitespace byte separates the header from the raster
    if i >= n or not data[i:i + 1].isspace():
        raise CorruptImage("missing raster after header")
    return tokens, i + 1


def decode_pnm(data):
    """Decode P5/P6 bytes into an ``(h, w)`` or ``(h, w, 3)`` uint8 array."""
    magic = data[:2]
    if magic not in (b"P5", b"P6"):
        raise UnsupportedFormat(f"not a binary PGM/PPM (magic {magic!r})")
    tokens, offset = _header_tokens(data, 3)
    try:
        w, h, maxval = (int(t) for t in tokens)
    except ValueError:
        raise CorruptImage(f"bad header values {tokens!r}") from None
    if w < 1 or h < 1 or not 0 < maxval < 65536:
        raise CorruptImage(f"bad header values {w}x{h} maxval {maxval}")
    if maxval > 255:
        raise UnsupportedFormat("16-bit PNM is not supported")
    channels = 1 if magic == b"P5" else 3
    need = w * h * channels
    raster = data[offset:offset + need]
    if len(raster) < need:
        raise CorruptImage(f"raster truncated: {len(raster)} of {need} bytes")
    arr = np.frombuffer(raster, dtype=np.uint8).copy()
    if maxval != 255:
        if arr.max(initial=0) > maxval:
            raise CorruptImage("sample exceeds maxval")
        arr = np.floor(arr.astype(np.float64) * 255.0 / maxval + 0.5).astype(np.uint8)
    return arr.reshape((h, w) if channels == 1 else (h, w, 3))


def encode_pgm(img):
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError("PGM holds single-channel images")
    if img.dtype != np.uint8:
        img = np.clip(img, 0, 255).astype(np.uint8)
    h, w = img.shape
    return b"P5\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img).tobytes()


def encode_ppm(img):
    img = np.asarray(img, dtype=np.uint8)
    h, w, _ = img.shape
    return b"P6\n%d %d\n255\n" % (w, h) + np.ascontiguousarray(img).tobytes()


def write_pgm(path, img):
    with open(path, "wb") as f:
        f.write(encode_pgm(img))


def write_ppm(path, img):
    with open(path, "wb") as f:
        f.write(encode_ppm(img))


def _decode_png(path):
    try:
        from PIL import Image
    except ImportError:
        raise UnsupportedFormat("PNG support needs Pillow (install the 'png' extra)") from None
    try:
        with Image.open(path) as im:
            im = im.convert("RGB")
            return np.asarray(im, dtype=np.uint8).copy()
    except OSError as exc:
        raise CorruptImage(f"{path}: {exc}") from None


def load_image(path):
    """Load an image file as an ``(h, w, 3)`` uint8 RGB array.

    Gray files are promoted by copying the single channel into all three.
    """
    path = os.fspath(path)
    with open(path, "rb") as f:
        data = f.read()
    if data.startswith(_PNG_MAGIC):
        return _decode_png(path)
    img = decode_pnm(data)
    if img.ndim == 2:
        img = np.repeat(img[:, :, None], 3, axis=2)
    return img


def load_gray(path):
    """Load a gray raster without the RGB round trip when the file is a PGM."""
    path = os.fspath(path)
    with open(path, "rb") as f:
        data = f.read()
    if data[:2] == b"P5":
        return decode_pnm(data)
    from coinrec.imaging import to_grayscale
    return to_grayscale(load_image(path))
