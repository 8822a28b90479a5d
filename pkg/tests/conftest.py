import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def binomial_band(p: float, n: int, k: float) -> float:
    """Half-width of a k-sigma band for a frequency estimated from n Bernoulli(p) draws."""
    return k * (p * (1 - p) / n) ** 0.5


_ACCEPTANCE = []


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    detail = next((v for k, v in item.user_properties if k == "detail"), "")
    status = "PASS" if call.excinfo is None else "FAIL"
    _ACCEPTANCE.append((number, status, title, detail))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, status, title, detail in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"[{status}] {number:>2}. {title}  {detail}")
