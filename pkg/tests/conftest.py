from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from treepen.dataset import Dataset, TaskKind, load_boston, load_csv

DATA = Path(__file__).parent / "data"

_acceptance: dict[str, tuple[str, str]] = {}


def make_dataset(x, y, classification=False, n_classes=None, name="synthetic") -> Dataset:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim == 1:
        x = x[:, None]
    names = tuple(f"x{i}" for i in range(x.shape[1]))
    if classification:
        y = np.asarray(y, dtype=np.int64)
        k = n_classes or int(y.max()) + 1
        return Dataset(names, x, y, TaskKind.CLASSIFICATION, tuple(f"c{i}" for i in range(k)), name)
    return Dataset(names, x, np.asarray(y, dtype=np.float64), TaskKind.REGRESSION, (), name)


@pytest.fixture(scope="session")
def boston():
    return load_boston()


@pytest.fixture(scope="session")
def iris():
    return load_csv(DATA / "iris.csv", "species")


@pytest.fixture(scope="session")
def wine():
    return load_csv(DATA / "wine.csv", "cultivar")


@pytest.fixture(scope="session")
def breast_cancer():
    return load_csv(DATA / "breast_cancer.csv", "diagnosis")


@pytest.fixture(scope="session")
def diabetes():
    return load_csv(DATA / "diabetes.csv", "progression")


@pytest.fixture(scope="session")
def friedman():
    rng = np.random.default_rng(7)
    x = rng.uniform(size=(300, 5))
    y = (10 * np.sin(np.pi * x[:, 0] * x[:, 1]) + 20 * (x[:, 2] - 0.5) ** 2
         + 10 * x[:, 3] + 5 * x[:, 4] + rng.normal(size=300))
    return make_dataset(x, y, name="friedman1")


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(number, title): exit criterion")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    marker = report.user_properties and dict(report.user_properties).get("acceptance")
    if marker:
        _acceptance[report.nodeid] = (marker, report.outcome)


@pytest.hookimpl(tryfirst=True)
def pytest_runtest_setup(item):
    m = item.get_closest_marker("acceptance")
    if m:
        item.user_properties.append(("acceptance", f"AC{m.args[0]:>2} {m.args[1]}"))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for nodeid, (label, outcome) in sorted(_acceptance.items(), key=lambda kv: kv[1][0]):
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"[{status}] {label}  ({nodeid.split('::')[-1]})")
