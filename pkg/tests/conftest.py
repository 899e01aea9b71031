import numpy as np
import pytest
from scipy import stats

from hom_superres import GaussianWavepacket, TabulatedWavepacket

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def gauss():
    return GaussianWavepacket(1.0)


@pytest.fixture(scope="session")
def tab_gauss():
    """sigma_k = 1 Gaussian intensity tabulated on [-8, 8] with 2048 points."""
    k = np.linspace(-8.0, 8.0, 2048)
    return TabulatedWavepacket(k, stats.norm.pdf(k))


@pytest.fixture
def record():
    """Print and remember one PASS/FAIL line per acceptance criterion."""

    def _record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
