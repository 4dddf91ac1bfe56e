import numpy as np
import pytest

from akweyl import catalog

ACCEPTANCE_LINES = {}


def record(criterion, passed, detail=""):
    ACCEPTANCE_LINES.setdefault(criterion, []).append((bool(passed), detail))


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(ACCEPTANCE_LINES):
        parts = ACCEPTANCE_LINES[n]
        ok = all(p for p, _ in parts)
        detail = "; ".join(d for _, d in parts if d)
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def cp2():
    return catalog.load("cp2_fs")


def random_rotation(rng, n=4, proper=True):
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))
    if proper and np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q
