import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from coinrec.classifier import CLASS_DENOMINATION
from coinrec.dataset import (LabeledImage, SyntheticCoinSpec, augment_rotations,
                             generate_synthetic_corpus, read_manifest, split, write_corpus)
from coinrec.errors import BadStep, EmptyDataset


@pytest.fixture(scope="module")
def corpus():
    return generate_synthetic_corpus(SyntheticCoinSpec())


def test_default_census(corpus):
    assert len(corpus) == 70
    labels = [c.label for c in corpus]
    assert all(labels.count(k) == 5 for k in range(14))
    assert all(c.image.shape == (200, 200) and c.image.dtype == np.uint8 for c in corpus)
    assert [c.label for c in corpus] == sorted(labels)


def test_corpus_deterministic(corpus):
    again = generate_synthetic_corpus(SyntheticCoinSpec())
    assert all(a.image.tobytes() == b.image.tobytes() for a, b in zip(corpus, again))
    other = generate_synthetic_corpus(SyntheticCoinSpec(seed=1))
    assert any(a.image.tobytes() != b.image.tobytes() for a, b in zip(corpus, other))


def test_zero_jitter_samples_identical():
    spec = SyntheticCoinSpec().zero_jitter()
    items = generate_synthetic_corpus(spec)
    for k in range(14):
        imgs = [it.image for it in items if it.label == k]
        assert all(np.array_equal(imgs[0], im) for im in imgs[1:])


def test_class_prototypes_differ():
    items = generate_synthetic_corpus(SyntheticCoinSpec().zero_jitter())
    protos = {it.label: it.image for it in items}
    for a, b in itertools.combinations(range(14), 2):
        diff = np.count_nonzero(protos[a] != protos[b]) / protos[a].size
        assert diff >= 0.01, (a, b, diff)


def test_spec_validation():
    with pytest.raises(ValueError):
        SyntheticCoinSpec(glyphs=SyntheticCoinSpec().glyphs[:13])
    g = SyntheticCoinSpec().glyphs
    with pytest.raises(ValueError):
        SyntheticCoinSpec(glyphs=(g[0],) * 14)


def _base():
    img = np.random.default_rng(0).integers(0, 256, (100, 100)).astype(np.uint8)
    return LabeledImage(img, 9, "09_00")


@pytest.mark.parametrize("step", [5, 90, 1, 360, 45])
def test_rotation_census(step):
    out = augment_rotations(_base(), step)
    assert len(out) == 360 // step
    assert [o.angle for o in out] == list(range(0, 360, step))
    assert all(o.label == 9 and o.base_id == "09_00" for o in out)
    assert np.array_equal(out[0].image, _base().image)


def test_rotation_without_original():
    assert len(augment_rotations(_base(), 5, include_original=False)) == 71


@pytest.mark.parametrize("step", [7, 0, -5, 400])
def test_bad_step(step):
    with pytest.raises(BadStep):
        augment_rotations(_base(), step)


@pytest.mark.parametrize("n,sizes", [(5040, (4536, 252, 252)), (20, (18, 1, 1)), (1, (0, 0, 1)),
                                     (100, (90, 5, 5)), (39, (35, 1, 3))])
def test_split_sizes(n, sizes):
    s = split(range(n), seed=3)
    assert (len(s.train), len(s.validation), len(s.test)) == sizes


@given(st.integers(1, 3000), st.integers(0, 2**32))
@settings(max_examples=40)
def test_split_is_partition(n, seed):
    s = split(range(n), seed=seed)
    parts = s.train + s.validation + s.test
    assert sorted(parts) == list(range(n))
    assert len(s.train) == n * 9 // 10 and len(s.validation) == n // 20
    again = split(range(n), seed=seed)
    assert (again.train, again.validation, again.test) == (s.train, s.validation, s.test)


def test_split_empty():
    with pytest.raises(EmptyDataset):
        split([], seed=0)


def test_write_and_read_corpus(tmp_path):
    items = augment_rotations(_base(), 90)
    manifest = write_corpus(items, tmp_path / "corpus")
    lines = manifest.read_text().splitlines()
    assert lines[1] == "9/00_090.pgm\t9\t5\t90"
    recs = read_manifest(manifest)
    assert len(recs) == 4
    assert recs[2].denomination == CLASS_DENOMINATION[9] and recs[2].angle == 180
    assert (tmp_path / "corpus" / "9" / "00_270.pgm").exists()


def test_bad_manifest(tmp_path):
    p = tmp_path / "m.tsv"
    p.write_text("a.pgm\t99\t1\t0\n")
    with pytest.raises(ValueError):
        read_manifest(p)
