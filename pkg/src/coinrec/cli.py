"""coinrec command line: generate, preprocess, train, classify, evaluate.

Exit codes: 0 ok, 2 I/O error, 3 no circle found, 4 bad training/evaluation
data, 5 bad model file.
"""
import argparse
import sys
from pathlib import Path

import numpy as np

from coinrec import dataset, modelfile, pnm
from coinrec.classifier import (CLASS_NAMES, DEFAULT_HIDDEN, N_CLASSES, TrainConfig, classify,
                                denomination_of, init_model, train)
from coinrec.errors import (CorruptImage, EmptyDataset, ModelFormatError, NoCircleFound,
                            UnsupportedFormat)
from coinrec.evaluation import evaluate, format_report, format_report_tsv
from coinrec.features import N_FEATURES, TRIM_SIZE, features_of, to_feature_vector
from coinrec.hough import HoughParams
from coinrec.imaging import to_uint8
from coinrec.pipeline import preprocess, preprocess_stages

EXIT_OK, EXIT_IO, EXIT_NO_CIRCLE, EXIT_DATA, EXIT_MODEL = 0, 2, 3, 4, 5


class CliError(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def derive_seeds(seed):
    """Split / init / shuffle seeds, all drawn from the one command seed."""
    rng = np.random.default_rng(seed)
    return tuple(int(s) for s in rng.integers(0, 2**63 - 1, size=3))


def _g(x):
    return f"{x:.6g}"


def _hough_params(args, shape):
    if args.r_min is None and args.r_max is None:
        return HoughParams.for_image(shape[0], shape[1], args.angular_step)
    default = HoughParams.for_image(shape[0], shape[1])
    r_min = args.r_min if args.r_min is not None else default.r_min
    r_max = args.r_max if args.r_max is not None else default.r_max
    return HoughParams(r_min, r_max, args.angular_step)


def _load_input_image(path):
    try:
        return pnm.load_image(path)
    except (OSError, CorruptImage, UnsupportedFormat) as exc:
        raise CliError(EXIT_IO, f"cannot read image {path}: {exc}") from None


def _load_model(path):
    try:
        return modelfile.load(path)
    except OSError as exc:
        raise CliError(EXIT_MODEL, f"cannot read model {path}: {exc}") from None
    except ModelFormatError as exc:
        raise CliError(EXIT_MODEL, f"bad model file {path}: {exc}") from None


def _load_manifest_features(path, normalize):
    try:
        records = dataset.read_manifest(path)
    except (OSError, ValueError) as exc:
        raise CliError(EXIT_DATA, f"cannot read manifest {path}: {exc}") from None
    if not records:
        raise CliError(EXIT_DATA, f"manifest {path} lists no images")
    coins = []
    try:
        for rec in records:
            img = pnm.load_gray(rec.path)
            if img.shape != (TRIM_SIZE, TRIM_SIZE):
                img = preprocess(img)
            coins.append(img)
    except (OSError, CorruptImage, UnsupportedFormat, NoCircleFound) as exc:
        raise CliError(EXIT_DATA, f"bad corpus image: {exc}") from None
    X = features_of(np.stack(coins), normalize)
    y = np.array([r.label for r in records], dtype=np.int64)
    return X, y


def _xy(X, y, idx):
    idx = np.asarray(idx, dtype=np.int64)
    return X[idx], y[idx]


def cmd_generate(args):
    out = Path(args.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".coinrec-write-test"
        probe.write_bytes(b"")
        probe.unlink()
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write corpus to {out}: {exc}") from None
    spec = dataset.SyntheticCoinSpec(
        side=args.side,
        samples_per_class=args.samples_per_class,
        noise_amplitude=args.noise,
        center_jitter=args.center_jitter,
        orientation_jitter=not args.no_orientation_jitter,
        seed=args.seed,
    )
    items = dataset.build_full_dataset(spec, step=args.step)
    try:
        manifest = dataset.write_corpus(items, args.out_dir)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write corpus to {args.out_dir}: {exc}") from None
    print(f"seed {args.seed}")
    print(f"wrote {len(items)} images to {args.out_dir}")
    print(f"manifest {manifest}")
    return EXIT_OK


def _stage_path(out, tag):
    out = Path(out)
    return out.with_name(f"{out.stem}_{tag}.pgm")


def cmd_preprocess(args):
    img = _load_input_image(args.image)
    params = _hough_params(args, img.shape)
    try:
        st = preprocess_stages(img, params, args.threshold)
    except NoCircleFound as exc:
        raise CliError(EXIT_NO_CIRCLE, f"no coin found in {args.image}: {exc}") from None
    try:
        pnm.write_pgm(args.out, st.trimmed)
        if args.dump_stages:
            pnm.write_pgm(_stage_path(args.out, "gray"), st.gray)
            pnm.write_pgm(_stage_path(args.out, "edges"), st.edges.astype(np.uint8) * 255)
            pnm.write_pgm(_stage_path(args.out, "cropped"), st.cropped)
            pnm.write_pgm(_stage_path(args.out, "grid"), to_uint8(st.grid))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from None
    c = st.circle
    print(f"circle u={c.u} v={c.v} r={c.r} votes={c.votes}")
    print(f"wrote {args.out}")
    return EXIT_OK


def cmd_train(args):
    normalize = not args.no_normalize
    X, y = _load_manifest_features(args.manifest, normalize)
    split_seed, init_seed, shuffle_seed = derive_seeds(args.seed)
    parts = dataset.split(range(len(y)), seed=split_seed)
    tr, va, te = (_xy(X, y, p) for p in (parts.train, parts.validation, parts.test))
    if len(va[1]) == 0:
        raise CliError(EXIT_DATA, f"{len(y)} images are too few for a validation split")
    sizes = [N_FEATURES, *args.hidden, N_CLASSES]
    model = init_model(sizes, seed=init_seed, normalized=normalize)
    config = TrainConfig(max_epochs=args.max_epochs, learning_rate=args.learning_rate,
                         batch_size=min(args.batch_size, len(tr[1])), patience=args.patience,
                         seed=shuffle_seed)
    log = None if args.quiet else (
        lambda e, a, b: print(f"epoch {e:5d}  train MSE {_g(a)}  validation MSE {_g(b)}")
        if e % 50 == 0 else None)
    try:
        best, report = train(model, tr, va, config, test_set=te, log=log)
    except (EmptyDataset, ValueError) as exc:
        raise CliError(EXIT_DATA, f"training failed: {exc}") from None
    try:
        modelfile.save(best, args.model_out)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write model {args.model_out}: {exc}") from None

    b = report.best_epoch - 1
    print(f"seed {args.seed}")
    print(f"epochs run {report.epochs_run}, best validation epoch {report.best_epoch}")
    print(f"{'':<12}{'Samples':>8}{'MSE':>14}{'%E':>14}")
    rows = [("Training:", len(tr[1]), report.train_mse[b], report.train_percent_error[b]),
            ("Validation:", len(va[1]), report.val_mse[b], report.val_percent_error[b]),
            ("Testing:", len(te[1]), report.test_mse, report.test_percent_error)]
    for name, n, mse, err in rows:
        print(f"{name:<12}{n:>8}{_g(mse):>14}{_g(err):>14}")
    print(f"model {args.model_out}")
    return EXIT_OK


def cmd_classify(args):
    model = _load_model(args.model)
    img = _load_input_image(args.image)
    params = _hough_params(args, img.shape)
    try:
        st = preprocess_stages(img, params, args.threshold)
    except NoCircleFound as exc:
        raise CliError(EXIT_NO_CIRCLE, f"no coin found in {args.image}: {exc}") from None
    x = to_feature_vector(st.grid, model.normalized)
    label, conf = classify(model, x)
    print(f"class {label} ({CLASS_NAMES[label]})")
    print(f"denomination Rs{denomination_of(label)}")
    print(f"confidence {_g(conf)}")
    return EXIT_OK


def cmd_evaluate(args):
    model = _load_model(args.model)
    X, y = _load_manifest_features(args.manifest, model.normalized)
    if args.scope == "test":
        split_seed, _, _ = derive_seeds(args.seed)
        parts = dataset.split(range(len(y)), seed=split_seed)
        X, y = _xy(X, y, parts.test)
        title = f"scope: test split ({len(y)} of {len(parts.train) + len(parts.validation) + len(y)} images, seed {args.seed})"
    else:
        title = f"scope: all {len(y)} images"
    try:
        metrics, cm = evaluate(model, X, y)
    except EmptyDataset as exc:
        raise CliError(EXIT_DATA, str(exc)) from None
    print(format_report(metrics, cm, title), end="")
    if args.tsv:
        try:
            with open(args.tsv, "w") as f:
                f.write(format_report_tsv(metrics, cm, args.scope))
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {args.tsv}: {exc}") from None
    return EXIT_OK


def _add_detection_flags(p):
    p.add_argument("--r-min", type=int, default=None, help="smallest Hough radius (px)")
    p.add_argument("--r-max", type=int, default=None, help="largest Hough radius (px)")
    p.add_argument("--angular-step", type=float, default=1.0, help="vote ray spacing (degrees)")
    p.add_argument("--threshold", type=float, default=None,
                   help="Sobel magnitude threshold (default: 0.25 x image maximum)")


def build_parser():
    parser = argparse.ArgumentParser(prog="coinrec", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write the synthetic rotated corpus and its manifest")
    p.add_argument("out_dir")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--step", type=int, default=5, help="rotation step in degrees")
    p.add_argument("--side", type=int, default=200)
    p.add_argument("--samples-per-class", type=int, default=5)
    p.add_argument("--noise", type=int, default=16, help="uniform intensity noise amplitude")
    p.add_argument("--center-jitter", type=int, default=6)
    p.add_argument("--no-orientation-jitter", action="store_true")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("preprocess", help="extract the trimmed 100x100 coin from a scan")
    p.add_argument("image")
    p.add_argument("out")
    p.add_argument("--dump-stages", action="store_true",
                   help="also write gray, edge, cropped and 20x20 grid images")
    _add_detection_flags(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="train the classifier on a corpus manifest")
    p.add_argument("manifest")
    p.add_argument("model_out")
    p.add_argument("--hidden", type=int, nargs="+", default=[DEFAULT_HIDDEN])
    p.add_argument("--learning-rate", type=float, default=TrainConfig.learning_rate)
    p.add_argument("--batch-size", type=int, default=TrainConfig.batch_size)
    p.add_argument("--max-epochs", type=int, default=TrainConfig.max_epochs)
    p.add_argument("--patience", type=int, default=TrainConfig.patience)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--no-normalize", action="store_true", help="feed raw 0-255 averages")
    p.add_argument("--quiet", action="store_true")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="classify one coin image")
    p.add_argument("model")
    p.add_argument("image")
    _add_detection_flags(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("evaluate", help="recognition rates and confusion matrix")
    p.add_argument("model")
    p.add_argument("manifest")
    p.add_argument("--scope", choices=("test", "all"), default="test")
    p.add_argument("--seed", type=int, default=0, help="training seed (selects the test split)")
    p.add_argument("--tsv", default=None, help="also write a tab-separated report here")
    p.set_defaults(func=cmd_evaluate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"coinrec: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
