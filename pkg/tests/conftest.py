import numpy as np
import pytest

import specparity as sp

# one pass/fail line per acceptance criterion, echoed after the test run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def record_criterion(num: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {num:2d}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def solve_potential(pot, x_min, x_max, n):
    grid = sp.make_grid(x_min, x_max, n)
    return sp.solve(sp.assemble(pot, grid))


@pytest.fixture(scope="session")
def harmonic_999():
    return solve_potential(sp.named("harmonic"), -8, 8, 999)


@pytest.fixture(scope="session")
def qc_999():
    return solve_potential(sp.named("quartic_cubic"), -10, 10, 999)


@pytest.fixture(scope="session")
def harmonic_799():
    return solve_potential(sp.named("harmonic"), -8, 8, 799)


@pytest.fixture(scope="session")
def quartic_799():
    return solve_potential(sp.named("quartic"), -8, 8, 799)


@pytest.fixture(scope="session")
def harmonic_199():
    return solve_potential(sp.named("harmonic"), -8, 8, 199)


@pytest.fixture(scope="session")
def qc_199():
    return solve_potential(sp.named("quartic_cubic"), -10, 10, 199)


@pytest.fixture(scope="session")
def parity_h999(harmonic_999):
    return sp.build_parity(harmonic_999)


@pytest.fixture(scope="session")
def parity_qc999(qc_999):
    return sp.build_parity(qc_999)


@pytest.fixture(scope="session")
def box_2x2():
    """Free particle on (0, 1) with two interior points: T = [[18,-9],[-9,18]]."""
    grid = sp.make_grid(0, 1, 2)
    hm = sp.assemble_from_samples(np.zeros(2), grid)
    return hm, sp.solve(hm)
