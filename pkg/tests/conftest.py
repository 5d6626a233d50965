import numpy as np
import pytest


def ar_track(n, seed, coeffs=(0.9,), sigma=0.05, burn=200):
    """Stationary linear AR track, as a stand-in for a subband bin sequence."""
    rng = np.random.default_rng(seed)
    p = len(coeffs)
    x = np.zeros(n + burn + p)
    noise = sigma * rng.standard_normal(x.size)
    for t in range(p, x.size):
        x[t] = sum(c * x[t - 1 - i] for i, c in enumerate(coeffs)) + noise[t]
    return x[burn + p:]


@pytest.fixture
def rng():
    return np.random.default_rng(20240521)


# acceptance summary: one line per criterion at the end of the run

_RESULTS = []


@pytest.fixture
def criterion():
    def record(label, passed, detail=""):
        _RESULTS.append((label, bool(passed), detail))
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _RESULTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
