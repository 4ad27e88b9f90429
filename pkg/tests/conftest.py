import time

import pytest

from coinrec import dataset
from coinrec.cli import main

# nodeid -> one-line detail, filled by acceptance tests
ACCEPTANCE_DETAILS = {}
TIMINGS = {}


@pytest.fixture
def record_acceptance(request):
    def record(detail):
        ACCEPTANCE_DETAILS[request.node.nodeid] = detail
    return record


@pytest.fixture(scope="session")
def small_corpus(tmp_path_factory):
    """One coin per class, four rotations: 56 trimmed images on disk."""
    out = tmp_path_factory.mktemp("small") / "corpus"
    assert main(["generate", str(out), "--samples-per-class", "1", "--step", "90"]) == 0
    return out


@pytest.fixture(scope="session")
def small_model(small_corpus, tmp_path_factory):
    path = tmp_path_factory.mktemp("small_model") / "model.bin"
    assert main(["train", str(small_corpus / "manifest.tsv"), str(path), "--quiet",
                 "--max-epochs", "2000", "--learning-rate", "5", "--batch-size", "4",
                 "--patience", "2000"]) == 0
    return path


@pytest.fixture(scope="session")
def full_corpus(tmp_path_factory):
    """The default 5040-image corpus written by ``coinrec generate``."""
    out = tmp_path_factory.mktemp("full") / "corpus"
    t0 = time.perf_counter()
    assert main(["generate", str(out)]) == 0
    TIMINGS["generate"] = time.perf_counter() - t0
    return out


@pytest.fixture(scope="session")
def full_arrays(full_corpus):
    records = dataset.read_manifest(full_corpus / "manifest.tsv")
    images, labels = dataset.load_manifest_images(records)
    return records, images, labels


def pytest_terminal_summary(terminalreporter):
    reports = []
    for key in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(key, []):
            if "test_acceptance.py" in rep.nodeid and rep.when in ("call", "setup"):
                if rep.when == "setup" and rep.passed:
                    continue
                reports.append(rep)
    if not reports:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for rep in sorted(reports, key=lambda r: r.nodeid):
        name = rep.nodeid.split("::")[-1]
        status = "PASS" if rep.passed else "FAIL"
        detail = ACCEPTANCE_DETAILS.get(rep.nodeid, "")
        terminalreporter.write_line(f"{status}  {name}  {detail}")
