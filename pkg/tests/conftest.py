import numpy as np
import pytest

from srmcts.instance import MaxMinInstance


def random_means(rng, K=None, L=None, kmax=8, lmax=8):
    K = K or int(rng.integers(2, kmax + 1))
    L = L or int(rng.integers(1, lmax + 1))
    return rng.uniform(-1.0, 1.0, size=(K, L))


def random_instance(rng, noise="gaussian", **kw) -> MaxMinInstance:
    return MaxMinInstance(random_means(rng, **kw), noise)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def rho_half():
    return MaxMinInstance([[0.5, 1.0], [0.0, 0.25]])


# one pass/fail line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    def _report(n, ok, detail):
        ACCEPTANCE_LINES.append((n, f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {detail}"))
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
