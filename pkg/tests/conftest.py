import numpy as np
import pytest

from vexlp import build_exponent, make_grid


@pytest.fixture
def grid1():
    return make_grid(1, 4.0, 512)


@pytest.fixture
def grid2():
    return make_grid(2, 2.0, 32)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def bump(grid1):
    return build_exponent("smooth_bump", {"p0": 2.0, "amplitude": 1.0, "width": 1.0}, grid1)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """``criterion(n, ok, detail)`` records one acceptance line."""

    def record(n: int, ok: bool, detail: str) -> bool:
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        _CRITERIA[n] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for n in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[n])
