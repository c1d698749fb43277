import numpy as np
import pytest

# Annual maxima of daily rainfall (mm), 35 values.
RAINFALL = np.array([
    86.8, 78.5, 93.1, 95.5, 78.1, 89.9, 109.5, 161.6, 187.6, 89.9, 73.4, 78.1, 73.3,
    130.1, 188.3, 113.9, 42.5, 80.0, 142.6, 42.9, 60.2, 100.0, 129.0, 98.0, 116.4,
    37.9, 60.7, 48.7, 39.7, 80.3, 30.7, 120.0, 160.0, 64.3, 80.0,
])


@pytest.fixture
def rainfall():
    return RAINFALL.copy()


@pytest.fixture
def rainfall_file(tmp_path):
    path = tmp_path / "rainfall.txt"
    lines = [", ".join(f"{v:.1f}" for v in RAINFALL[i:i + 13]) for i in range(0, 35, 13)]
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
