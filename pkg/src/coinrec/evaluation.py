"""MSE, %E, confusion matrices and per-denomination recognition rates."""
from dataclasses import dataclass

import numpy as np

from coinrec.classifier import (CLASS_DENOMINATION, DENOMINATIONS, N_CLASSES, forward, one_hot,
                                predict)
from coinrec.errors import EmptyDataset, EmptyDenomination


def _check_nonempty(X, y):
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    y = np.asarray(y, dtype=np.int64).reshape(-1)
    if len(y) == 0:
        raise EmptyDataset("no samples to evaluate")
    return X, y


def confusion_from_labels(targets, outputs, n_classes=N_CLASSES):
    """Rows are target classes, columns are output classes."""
    cm = np.zeros((n_classes, n_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(targets), np.asarray(outputs)), 1)
    return cm


def confusion_matrix(model, X, y):
    X, y = _check_nonempty(X, y)
    return confusion_from_labels(y, predict(model, X), model.layer_sizes[-1])


def mse_and_percent_error(model, X, y):
    X, y = _check_nonempty(X, y)
    out = forward(model, X)
    mse = float(np.mean((one_hot(y, out.shape[1]) - out) ** 2))
    wrong = int(np.count_nonzero(np.argmax(out, axis=1) != y))
    return mse, 100.0 * wrong / len(y)


@dataclass
class Rate:
    correct: int
    total: int

    @property
    def percent(self):
        return 100.0 * self.correct / self.total


def _denomination_rows(cm, denom):
    return [k for k in range(cm.shape[0]) if CLASS_DENOMINATION[k] == denom]


def denomination_rate(cm, denom):
    """Share of ``denom`` samples whose output class has the same face value."""
    cm = np.asarray(cm)
    rows = _denomination_rows(cm, denom)
    total = int(cm[rows].sum())
    if total == 0:
        raise EmptyDenomination(f"no samples of denomination {denom}")
    correct = int(cm[np.ix_(rows, rows)].sum())
    return Rate(correct, total)


def recognition_rates(cm):
    """Per-denomination and overall rates; denominations without samples are left out."""
    cm = np.asarray(cm)
    per = {}
    for denom in DENOMINATIONS:
        try:
            per[denom] = denomination_rate(cm, denom)
        except EmptyDenomination:
            continue
    if not per:
        raise EmptyDataset("confusion matrix is empty")
    overall = Rate(sum(r.correct for r in per.values()), sum(r.total for r in per.values()))
    return per, overall


@dataclass
class Metrics:
    n_samples: int
    mse: float
    percent_error: float
    class_accuracy: float  # 100 - %E, from the confusion-matrix trace
    per_denomination: dict
    overall: Rate


def evaluate(model, X, y):
    """All metrics for one sample set; returns ``(Metrics, confusion matrix)``."""
    mse, pct = mse_and_percent_error(model, X, y)
    cm = confusion_matrix(model, X, y)
    per, overall = recognition_rates(cm)
    n = int(cm.sum())
    acc = 100.0 * int(np.trace(cm)) / n
    return Metrics(n, mse, pct, acc, per, overall), cm


def _g(x):
    return f"{x:.6g}"


def format_report(metrics, cm, title=""):
    """Recognition table, MSE/%E line and the confusion matrix as plain text."""
    lines = []
    if title:
        lines += [title, ""]
    lines.append(f"{'Sr. No.':<8}{'Coin Type':<11}{'Correct / Total':>18}{'Rate (%)':>12}")
    for i, (denom, rate) in enumerate(metrics.per_denomination.items(), 1):
        frac = f"{rate.correct}/{rate.total}"
        lines.append(f"{i:<8}{'Rs ' + str(denom):<11}{frac:>18}{_g(rate.percent):>12}")
    o = metrics.overall
    lines.append(f"{'':<8}{'Total':<11}{f'{o.correct}/{o.total}':>18}{_g(o.percent):>12}")
    lines.append("")
    lines.append(f"samples {metrics.n_samples}  MSE {_g(metrics.mse)}  %E {_g(metrics.percent_error)}"
                 f"  class accuracy {_g(metrics.class_accuracy)}")
    lines.append("")
    lines.append("confusion matrix (rows = target class, columns = output class)")
    k = cm.shape[0]
    lines.append("     " + "".join(f"{j:>6}" for j in range(k)))
    for i in range(k):
        lines.append(f"{i:>5}" + "".join(f"{c:>6}" for c in cm[i]))
    return "\n".join(lines) + "\n"


def format_report_tsv(metrics, cm, scope=""):
    rows = [["section", "key", "correct", "total", "value"]]
    for denom, rate in metrics.per_denomination.items():
        rows.append(["rate", f"Rs{denom}", str(rate.correct), str(rate.total), _g(rate.percent)])
    o = metrics.overall
    rows.append(["rate", "total", str(o.correct), str(o.total), _g(o.percent)])
    rows.append(["metric", "mse", "", str(metrics.n_samples), _g(metrics.mse)])
    rows.append(["metric", "percent_error", "", str(metrics.n_samples), _g(metrics.percent_error)])
    rows.append(["metric", "scope", "", "", scope])
    for i in range(cm.shape[0]):
        rows.append(["confusion", str(i)] + [str(int(c)) for c in cm[i]])
    return "".join("\t".join(r) + "\n" for r in rows)
