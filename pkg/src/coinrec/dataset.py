"""Synthetic 14-class coin corpus, rotation augmentation, splitting and corpus files.

Each class is a disc with its own fill level, concentric rings and radial
spokes, drawn over a faint offset "shadow" disc on a black background. Five
samples per class stand in for the five scanned coins per face; each sample
gets seeded intensity noise, a center offset and a random orientation.
"""
import os
from dataclasses import dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import numpy as np

from coinrec.classifier import CLASS_DENOMINATION, N_CLASSES
from coinrec.errors import BadStep, EmptyDataset, NoCircleFound
from coinrec.imaging import rotate, to_uint8
from coinrec.pipeline import preprocess
from coinrec import pnm

MANIFEST_NAME = "manifest.tsv"


@dataclass
class LabeledImage:
    image: np.ndarray
    label: int
    base_id: str
    angle: int = 0

    @property
    def denomination(self):
        return CLASS_DENOMINATION[self.label]


@dataclass
class SplitDataset:
    train: list
    validation: list
    test: list
    seed: int


@dataclass(frozen=True)
class CoinGlyph:
    radius: int
    fill: int
    rings: int
    ring_level: int
    spokes: int
    spoke_level: int


def default_glyphs():
    glyphs = []
    for k in range(N_CLASSES):
        fill = 90 + 11 * k
        glyphs.append(CoinGlyph(
            radius=70 + k,
            fill=fill,
            rings=1 + k % 3,
            ring_level=fill - 70,
            spokes=3 + k % 4,
            spoke_level=min(255, fill + 35),
        ))
    return tuple(glyphs)


@dataclass(frozen=True)
class SyntheticCoinSpec:
    side: int = 200
    glyphs: tuple = field(default_factory=default_glyphs)
    samples_per_class: int = 5
    noise_amplitude: int = 16
    center_jitter: int = 6
    orientation_jitter: bool = True
    shadow_level: int = 40
    shadow_offset: int = 5
    seed: int = 0

    def __post_init__(self):
        if len(self.glyphs) != N_CLASSES:
            raise ValueError(f"need {N_CLASSES} glyphs, got {len(self.glyphs)}")
        if len(set(self.glyphs)) != N_CLASSES:
            raise ValueError("glyph parameters must be pairwise distinct")
        if self.samples_per_class < 1:
            raise ValueError("samples_per_class must be positive")
        for g in self.glyphs:
            reach = g.radius + self.center_jitter + max(self.shadow_offset, 0)
            if 2 * reach >= self.side:
                raise ValueError(f"glyph radius {g.radius} does not fit a {self.side}px image")

    def zero_jitter(self):
        return replace(self, noise_amplitude=0, center_jitter=0, orientation_jitter=False)


def render_coin(glyph, side, center=None, orientation=0.0, noise=None,
                shadow_level=40, shadow_offset=5):
    """Draw one coin face as an ``(side, side)`` uint8 image.

    ``noise`` is an optional integer array added to the whole raster.
    """
    if center is None:
        center = ((side - 1) / 2.0, (side - 1) / 2.0)
    cx, cy = center
    ys, xs = np.mgrid[0:side, 0:side].astype(np.float64)
    img = np.zeros((side, side))

    if shadow_level and shadow_offset:
        sd = np.hypot(xs - cx - shadow_offset, ys - cy - shadow_offset)
        img[sd <= glyph.radius] = shadow_level

    dx, dy = xs - cx, ys - cy
    rho = np.hypot(dx, dy) / glyph.radius
    disc = rho <= 1.0
    face = np.full((side, side), float(glyph.fill))

    for i in range(glyph.rings):
        ring_at = 0.85 * (i + 1) / (glyph.rings + 1)
        face[np.abs(rho - ring_at) < 0.045] = glyph.ring_level

    phi0 = np.deg2rad(orientation)
    for j in range(glyph.spokes):
        a = phi0 + 2 * np.pi * j / glyph.spokes
        ux, uy = np.cos(a), -np.sin(a)
        along = (dx * ux + dy * uy) / glyph.radius
        across = np.abs(-dx * uy + dy * ux) / glyph.radius
        face[(along > 0.12) & (along < 0.80) & (across < 0.04)] = glyph.spoke_level
    # orientation marker so no class has rotational symmetry
    mx = cx + 0.6 * glyph.radius * np.cos(phi0 + np.pi / glyph.spokes)
    my = cy - 0.6 * glyph.radius * np.sin(phi0 + np.pi / glyph.spokes)
    face[np.hypot(xs - mx, ys - my) < 0.07 * glyph.radius] = glyph.ring_level

    img[disc] = face[disc]
    if noise is not None:
        img = img + noise
    return to_uint8(img)


def _sample_seeds(seed, n):
    return np.random.SeedSequence(seed).spawn(n)


def generate_synthetic_corpus(spec=None):
    """Base (unrotated) coin scans: ``samples_per_class`` per class, canonical order."""
    spec = spec or SyntheticCoinSpec()
    n = spec.samples_per_class
    seeds = _sample_seeds(spec.seed, N_CLASSES * n)
    out = []
    for label, glyph in enumerate(spec.glyphs):
        for sample in range(n):
            rng = np.random.default_rng(seeds[label * n + sample])
            c = (spec.side - 1) / 2.0
            j = spec.center_jitter
            off = rng.integers(-j, j + 1, size=2) if j else (0, 0)
            orient = rng.uniform(0.0, 360.0) if spec.orientation_jitter else 0.0
            a = spec.noise_amplitude
            noise = rng.integers(-a, a + 1, size=(spec.side, spec.side)) if a else None
            img = render_coin(glyph, spec.side, (c + off[0], c + off[1]), orient, noise,
                              spec.shadow_level, spec.shadow_offset)
            out.append(LabeledImage(img, label, f"{label:02d}_{sample:02d}", 0))
    return out


def augment_rotations(base, step=5, include_original=True):
    """One copy of ``base`` per multiple of ``step`` degrees (0 included by default)."""
    if step <= 0 or 360 % step:
        raise BadStep(f"360 is not a multiple of step {step}")
    angles = range(0 if include_original else step, 360, step)
    return [LabeledImage(rotate(base.image, a), base.label, base.base_id, a) for a in angles]


def _split_sizes(n, fractions):
    fr = [Fraction(f).limit_denominator(10**6) for f in fractions]
    n_train = int(n * fr[0])
    n_val = int(n * fr[1])
    return n_train, n_val, n - n_train - n_val


def split(samples, fractions=(0.90, 0.05, 0.05), seed=0):
    """Seeded shuffle, then contiguous train/validation/test partition.

    Sizes are floor(0.90 n), floor(0.05 n) and the remainder.
    """
    samples = list(samples)
    if not samples:
        raise EmptyDataset("cannot split an empty sample list")
    n_train, n_val, _ = _split_sizes(len(samples), fractions)
    order = np.random.default_rng(seed).permutation(len(samples))
    shuffled = [samples[i] for i in order]
    return SplitDataset(shuffled[:n_train], shuffled[n_train:n_train + n_val],
                        shuffled[n_train + n_val:], seed)


def preprocess_base(item, params=None, sobel_threshold=None):
    try:
        trimmed = preprocess(item.image, params, sobel_threshold)
    except NoCircleFound as exc:
        raise NoCircleFound(f"base image {item.base_id}: {exc}") from exc
    return replace(item, image=trimmed)


def build_full_dataset(spec=None, step=5, params=None, sobel_threshold=None):
    """Generate, preprocess and rotate: 70 bases x (360/step) trimmed 100x100 coins."""
    out = []
    for base in generate_synthetic_corpus(spec):
        out.extend(augment_rotations(preprocess_base(base, params, sobel_threshold), step))
    out.sort(key=lambda it: (it.label, it.base_id, it.angle))
    return out


def item_relpath(item):
    sample = item.base_id.split("_")[-1]
    return f"{item.label}/{sample}_{item.angle:03d}.pgm"


def write_corpus(items, out_dir):
    """Write ``<label>/<sample>_<angle>.pgm`` files plus a tab-separated manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    lines = []
    for item in items:
        rel = item_relpath(item)
        (out_dir / rel).parent.mkdir(exist_ok=True)
        pnm.write_pgm(out_dir / rel, item.image)
        lines.append(f"{rel}\t{item.label}\t{item.denomination}\t{item.angle}\n")
    manifest = out_dir / MANIFEST_NAME
    with open(manifest, "w", newline="\n") as f:
        f.writelines(lines)
    return manifest


@dataclass
class ManifestRecord:
    path: str
    label: int
    denomination: int
    angle: int


def read_manifest(path):
    """Parse a manifest; relative image paths are resolved against its directory."""
    path = Path(path)
    root = path.parent
    records = []
    with open(path) as f:
        for lineno, line in enumerate(f, 1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 4:
                raise ValueError(f"{path}:{lineno}: expected 4 tab-separated fields")
            rel, label, denom, angle = parts
            label = int(label)
            if not 0 <= label < N_CLASSES:
                raise ValueError(f"{path}:{lineno}: class {label} out of range")
            full = rel if os.path.isabs(rel) else str(root / rel)
            records.append(ManifestRecord(full, label, int(denom), int(angle)))
    return records


def load_manifest_images(records):
    """Load the (already trimmed) images listed in a manifest -> (n, h, w) uint8, labels."""
    images = np.stack([pnm.load_gray(r.path) for r in records])
    labels = np.array([r.label for r in records], dtype=np.int64)
    return images, labels
