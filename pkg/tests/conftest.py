import numpy as np
import pytest

from tempered_ou.rand_core import RandomStream


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running Monte Carlo or timing test")


@pytest.fixture
def stream():
    return RandomStream(20240601)


def mean_within(x, target, sigmas=5.0):
    """True when the sample mean of ``x`` is within ``sigmas`` standard errors of ``target``."""
    x = np.asarray(x, dtype=float)
    se = x.std(ddof=1) / np.sqrt(x.size)
    return abs(x.mean() - target) <= sigmas * se


def binomial_within(successes, trials, prob, sigmas=4.0):
    se = np.sqrt(prob * (1 - prob) / trials)
    return abs(successes / trials - prob) <= sigmas * se + 1e-12


# one PASS/FAIL line per acceptance criterion, printed after the run
_VERDICTS = []


@pytest.fixture
def verdict():
    """Record ``(label, passed, detail)``; the line is printed in the terminal summary."""
    def record(label, passed, detail=""):
        _VERDICTS.append((label, bool(passed), detail))
        return bool(passed)
    return record


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for label, passed, detail in _VERDICTS:
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}")
