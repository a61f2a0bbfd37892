import re
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from walshocr import ann, data_path  # noqa: E402
from walshocr.features import build_database  # noqa: E402


@pytest.fixture(scope="session")
def templates_dir():
    return Path(str(data_path("templates")))


@pytest.fixture(scope="session")
def fonts_dir():
    return Path(str(data_path("fonts")))


@pytest.fixture(scope="session")
def db(templates_dir):
    return build_database(templates_dir)


@pytest.fixture(scope="session")
def trained(db):
    config = ann.TrainConfig()
    inputs = np.array(db.vectors, dtype=np.float64)
    model = ann.init_mlp(config, ann.feature_scaling(inputs), db.labels)
    model, history = ann.train(model, inputs, ann.make_targets(36), config)
    return model, history


@pytest.fixture(scope="session")
def model(trained):
    return trained[0]


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def random_glyph(rng, density=None, shape=(42, 24)):
    """Random raster with ink on every border row/column (so it is tight)."""
    p = rng.uniform(0.15, 0.6) if density is None else density
    g = (rng.random(shape) < p).astype(np.uint8)
    g[0, rng.integers(shape[1])] = 1
    g[-1, rng.integers(shape[1])] = 1
    g[rng.integers(shape[0]), 0] = 1
    g[rng.integers(shape[0]), -1] = 1
    return g


ACCEPTANCE_COUNT = 8


def pytest_configure(config):
    config.acceptance_lines = {}


@pytest.fixture
def verdict(request):
    """Record one PASS/FAIL line for an acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        request.config.acceptance_lines[number] = line
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.acceptance_lines
    ran = set()
    for key in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(key, []):
            match = re.search(r"test_acceptance\.py::\w+::test_(\d+)_", getattr(report, "nodeid", ""))
            if match:
                ran.add(int(match.group(1)))
    if not ran:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, ACCEPTANCE_COUNT + 1):
        if n in lines:
            terminalreporter.write_line(lines[n])
        elif n in ran:
            terminalreporter.write_line(f"criterion {n}: FAIL  errored before a verdict was recorded")
        else:
            terminalreporter.write_line(f"criterion {n}: not run")
