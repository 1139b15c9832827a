import pathlib
import sys

import numpy as np
import pytest

from graphseg import _backend
from graphseg.imaging import RasterImage, load_ppm

sys.path.insert(0, str(pathlib.Path(__file__).parent))

DATA = pathlib.Path(__file__).parent / "data"
CORPUS = sorted(DATA.glob("*.ppm"))


@pytest.fixture(params=_backend.available())
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    monkeypatch.setattr(_backend, "kernels", _backend.get(request.param))
    return request.param


@pytest.fixture(scope="session")
def corpus():
    return [(p.stem, load_ppm(p)) for p in CORPUS]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def random_image(rng, w, h, levels=256):
    return RasterImage(rng.integers(0, levels, size=(h, w, 3), dtype=np.uint8))


# one PASS/FAIL line per acceptance criterion, printed in the terminal summary
_acceptance = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    cid, title = marker.args
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        state = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        if report.outcome == "skipped" and isinstance(report.longrepr, tuple):
            state += f" ({report.longrepr[2]})"
        _acceptance.setdefault(cid, (title, []))[1].append(state)


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(id, title): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for cid in sorted(_acceptance):
        title, states = _acceptance[cid]
        fails = [s for s in states if s.startswith("FAIL")]
        skips = [s for s in states if s.startswith("SKIP")]
        state = fails[0] if fails else skips[0] if skips else "PASS"
        terminalreporter.write_line(f"criterion {cid:>2}: {state} - {title}")
