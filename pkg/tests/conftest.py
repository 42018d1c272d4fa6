import numpy as np
import pytest

from ldpc_vfap.code_model import from_dense
from ldpc_vfap.construction import ConstructionSpec, peg_construct

HAMMING_7_4 = [
    [1, 1, 0, 1, 1, 0, 0],
    [1, 0, 1, 1, 0, 1, 0],
    [0, 1, 1, 1, 0, 0, 1],
]


@pytest.fixture(scope="session")
def hamming():
    return from_dense(HAMMING_7_4)


@pytest.fixture(scope="session")
def code96():
    return peg_construct(ConstructionSpec.regular(96, 48, 3, seed=11))


@pytest.fixture(scope="session")
def code500():
    return peg_construct(ConstructionSpec.regular(500, 250, 3, seed=1))


def random_graph(rng, max_nodes=20, density=0.35):
    """Random biadjacency with no empty rows/columns and m + n <= max_nodes."""
    while True:
        m = int(rng.integers(2, max_nodes // 2 + 1))
        n = int(rng.integers(2, max_nodes - m + 1))
        d = (rng.random((m, n)) < density).astype(np.uint8)
        if d.any(axis=0).all() and d.any(axis=1).all():
            return from_dense(d)


ACCEPTANCE_LINES: list[str] = []


def acceptance_report(number: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
