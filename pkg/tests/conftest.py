import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cqcoding import operators as ops  # noqa: E402
from cqcoding.channel import CqChannel  # noqa: E402

KET0 = np.array([1.0, 0.0])
KET1 = np.array([0.0, 1.0])
PLUS = np.array([1.0, 1.0]) / np.sqrt(2)


@pytest.fixture
def orthogonal_pure():
    return CqChannel.from_states([ops.ket_to_density(KET0), ops.ket_to_density(KET1)])


@pytest.fixture
def zero_plus():
    return CqChannel.from_states([ops.ket_to_density(KET0), ops.ket_to_density(PLUS)])


@pytest.fixture
def bsc():
    p = 0.1
    return CqChannel.from_states([np.diag([1 - p, p]), np.diag([p, 1 - p])])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    if module and module.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in module.RESULTS:
            terminalreporter.write_line(line)
