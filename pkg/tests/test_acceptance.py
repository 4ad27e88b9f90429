"""Exit criteria for the whole pipeline, one test per criterion.

Run with ``pytest tests/test_acceptance.py -v``; a PASS/FAIL line per
criterion is printed in the terminal summary.
"""
import time
from fractions import Fraction

import numpy as np
import pytest

from coinrec import modelfile
from coinrec.classifier import (CLASS_DENOMINATION, TrainConfig, backprop_gradients, classify,
                                forward, init_model, one_hot, predict, train)
from coinrec.cli import derive_seeds, main
from coinrec.dataset import (SyntheticCoinSpec, augment_rotations, generate_synthetic_corpus,
                             preprocess_base, split)
from coinrec.evaluation import evaluate
from coinrec.features import features_of, pattern_average
from coinrec.hough import HoughParams, accumulate, find_best_circle

from conftest import TIMINGS
from oracles import block_means, finite_difference_gradients, rasterize_circle, relative_errors


@pytest.fixture(scope="module")
def protocol_run(full_arrays):
    """Split and train exactly like ``coinrec train`` with default flags."""
    records, images, labels = full_arrays
    t0 = time.perf_counter()
    X = features_of(images)
    split_seed, init_seed, shuffle_seed = derive_seeds(0)
    parts = split(range(len(labels)), seed=split_seed)
    sets = [(X[np.array(p)], labels[np.array(p)]) for p in (parts.train, parts.validation, parts.test)]
    model = init_model(seed=init_seed)
    best, report = train(model, sets[0], sets[1], TrainConfig(seed=shuffle_seed), test_set=sets[2])
    return dict(records=records, X=X, y=labels, sets=sets, model=best, report=report,
                train_seconds=time.perf_counter() - t0)


def test_c1_pattern_average_oracle(record_acceptance):
    rng = np.random.default_rng(2024)
    imgs = rng.integers(0, 256, size=(100, 100, 100), dtype=np.uint8)
    t0 = time.perf_counter()
    grids = [pattern_average(im) for im in imgs]
    elapsed = time.perf_counter() - t0
    mismatches = sum(not np.array_equal(g, block_means(im)) for g, im in zip(grids, imgs))
    record_acceptance(f"mismatches={mismatches}/100 runtime={elapsed:.3f}s (limit 1s)")
    assert mismatches == 0
    assert elapsed < 1.0


def test_c2_gradient_check(record_acceptance):
    t0 = time.perf_counter()
    worst = 0.0
    cases = [([400, 25, 14], s) for s in range(5)] + [([10, 5, 14], s) for s in range(5)]
    for sizes, seed in cases:
        rng = np.random.default_rng(1000 + seed)
        m = init_model(sizes, seed=seed, strict_io=False)
        m.biases = [rng.normal(0, 0.2, b.shape) for b in m.biases]
        x = rng.random(sizes[0])
        t = one_hot([rng.integers(14)])[0]
        grads = backprop_gradients(m, x, t)
        fd = finite_difference_gradients(m.weights, m.biases, x, t, step=1e-5)
        worst = max(worst, max(relative_errors(g, f).max() for g, f in zip(grads, fd)))
    elapsed = time.perf_counter() - t0
    record_acceptance(f"max relative error={worst:.2e} (limit 1e-4) runtime={elapsed:.1f}s (limit 30s)")
    assert worst < 1e-4
    assert elapsed < 30


def _random_circles(rng, n=50):
    out = []
    for _ in range(n):
        r = int(rng.integers(20, 46))
        u = rng.uniform(r, 99 - r)
        v = rng.uniform(r, 99 - r)
        out.append((u, v, r))
    return out


def test_c3_hough_recovery(record_acceptance):
    rng = np.random.default_rng(77)
    params = HoughParams(20, 45, 1.0)
    circles = _random_circles(rng)
    t0 = time.perf_counter()
    clean_ok = noisy_ok = 0
    for u, v, r in circles:
        edges = rasterize_circle(100, 100, u, v, r)
        noisy = edges.copy()
        spurious = rng.choice(100 * 100, size=500, replace=False)
        noisy.reshape(-1)[spurious] = True
        for e, hit in ((edges, "clean"), (noisy, "noisy")):
            c = find_best_circle(accumulate(e, params), params)
            ok = abs(c.u - u) <= 1 and abs(c.v - v) <= 1 and abs(c.r - r) <= 1
            if hit == "clean":
                clean_ok += ok
            else:
                noisy_ok += ok
    elapsed = time.perf_counter() - t0
    record_acceptance(f"clean {clean_ok}/50 (need 50), 5% noise {noisy_ok}/50 (need 48) "
                      f"runtime={elapsed:.1f}s (limit 60s)")
    assert clean_ok == 50
    assert noisy_ok >= 48  # 95% of 50 is 47.5
    assert elapsed < 60


@pytest.mark.slow
def test_c4_end_to_end_protocol(protocol_run, full_arrays, record_acceptance):
    t_start = time.perf_counter()
    records = protocol_run["records"]
    census = {d: sum(r.denomination == d for r in records) for d in (1, 2, 5, 10)}
    sizes = tuple(len(s[1]) for s in protocol_run["sets"])
    Xt, yt = protocol_run["sets"][2]
    acc = 100.0 * np.mean(predict(protocol_run["model"], Xt) == yt)
    images = full_arrays[1]
    total = TIMINGS["generate"] + protocol_run["train_seconds"] + (time.perf_counter() - t_start)
    record_acceptance(f"census={census} total={len(records)} split={sizes} "
                      f"test accuracy={acc:.2f}% (need >=95) generate+train={total:.0f}s (limit 600s)")
    assert len(records) == 5040
    assert census == {1: 1440, 2: 1440, 5: 1440, 10: 720}
    assert images.shape == (5040, 100, 100)
    assert sizes == (4536, 252, 252)
    assert acc >= 95.0
    assert total < 600


@pytest.mark.slow
def test_c5_rotation_invariance(protocol_run, record_acceptance):
    model = protocol_run["model"]
    held_out = generate_synthetic_corpus(SyntheticCoinSpec(seed=90210))
    picks = np.random.default_rng(5).choice(len(held_out), size=10, replace=False)
    rates = []
    for i in picks:
        base = preprocess_base(held_out[i])
        rots = augment_rotations(base, 5)
        assert len(rots) == 72
        pred = predict(model, features_of(np.stack([r.image for r in rots])))
        right = [CLASS_DENOMINATION[p] == base.denomination for p in pred]
        rates.append(100.0 * np.mean(right))
    record_acceptance(f"per-coin denomination rates min={min(rates):.1f}% mean={np.mean(rates):.1f}% (need >=95)")
    assert min(rates) >= 95.0


@pytest.mark.slow
def test_c6_early_stopping(protocol_run, record_acceptance):
    rep = protocol_run["report"]
    patience = TrainConfig().patience
    record_acceptance(f"epochs_run={rep.epochs_run} best_epoch={rep.best_epoch} patience={patience}")
    assert rep.epochs_run - rep.best_epoch <= patience
    assert rep.val_mse[rep.best_epoch - 1] == min(rep.val_mse)
    if rep.epochs_run < TrainConfig().max_epochs:
        assert rep.epochs_run == rep.best_epoch + patience
    # the returned parameters are the best-epoch snapshot
    Xv, yv = protocol_run["sets"][1]
    out = forward(protocol_run["model"], Xv)
    assert float(np.mean((one_hot(yv) - out) ** 2)) == rep.val_mse[rep.best_epoch - 1]


def _tree_bytes(root):
    return {str(p.relative_to(root)): p.read_bytes() for p in sorted(root.rglob("*")) if p.is_file()}


@pytest.mark.slow
def test_c7_determinism_and_persistence(full_corpus, protocol_run, tmp_path, record_acceptance):
    again = tmp_path / "corpus"
    assert main(["generate", str(again)]) == 0
    first, second = _tree_bytes(full_corpus), _tree_bytes(again)
    same_corpus = first == second

    manifest = str(full_corpus / "manifest.tsv")
    model_bytes = []
    for name in ("a.bin", "b.bin"):
        assert main(["train", manifest, str(tmp_path / name), "--quiet", "--max-epochs", "25"]) == 0
        model_bytes.append((tmp_path / name).read_bytes())

    model = protocol_run["model"]
    modelfile.save(model, tmp_path / "best.bin")
    loaded = modelfile.load(tmp_path / "best.bin")
    vecs = np.random.default_rng(7).random((100, 400))
    same_cls = all(classify(model, v) == classify(loaded, v) for v in vecs)
    record_acceptance(f"corpus files identical={same_corpus} ({len(first)} files), "
                      f"models identical={model_bytes[0] == model_bytes[1]}, round-trip classify identical={same_cls}")
    assert same_corpus
    assert model_bytes[0] == model_bytes[1]
    assert same_cls


@pytest.mark.slow
def test_c8_metric_consistency(protocol_run, record_acceptance):
    model = protocol_run["model"]
    checked = []
    evaluations = {"test": protocol_run["sets"][2], "all": (protocol_run["X"], protocol_run["y"])}
    # a deliberately weak model exercises the off-diagonal bookkeeping too
    weak = init_model(seed=3)
    for name, (X, y) in list(evaluations.items()):
        for tag, m in (("trained", model), ("untrained", weak)):
            metrics, cm = evaluate(m, X, y)
            n = int(cm.sum())
            trace = int(np.trace(cm))
            wrong = int(np.count_nonzero(predict(m, X) != y))
            assert n == len(y)
            assert Fraction(trace, n) * 100 == 100 - Fraction(wrong, n) * 100
            assert metrics.percent_error == 100.0 * wrong / n
            assert metrics.class_accuracy == pytest.approx(100 - metrics.percent_error, abs=1e-12)
            assert metrics.overall.correct >= trace
            checked.append(f"{name}/{tag}: acc={metrics.class_accuracy:.2f} denom={metrics.overall.percent:.2f}")
    record_acceptance("; ".join(checked))
