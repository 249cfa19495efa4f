import numpy as np
import pytest

from sublinear_sf.core import EdgeSetOracle
from sublinear_sf.mis import available_backends, set_backend


@pytest.fixture(params=available_backends())
def backend(request):
    prev = set_backend(request.param)
    yield request.param
    set_backend(prev)


def complete_graph(n):
    return EdgeSetOracle(n, matrix=np.ones((n, n), dtype=np.uint8) - np.eye(n, dtype=np.uint8))


def edgeless_graph(n):
    return EdgeSetOracle(n)


def path_graph(n):
    return EdgeSetOracle(n, edges=[(i, i + 1) for i in range(n - 1)])


def star_graph(n):
    return EdgeSetOracle(n, edges=[(0, i) for i in range(1, n)])


ACCEPTANCE: dict[int, str] = {}


def record(criterion: int, passed: bool, detail: str) -> None:
    """Register one acceptance verdict; printed again in the terminal summary."""
    line = f"[acceptance {criterion:>2}] {'PASS' if passed else 'FAIL'}  {detail}"
    ACCEPTANCE[criterion] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for key in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[key])
