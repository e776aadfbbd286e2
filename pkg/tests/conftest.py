import numpy as np
import pytest

from beamortho.beams import make_beam
from beamortho.sphere import Frame, random_rotation

_ACCEPTANCE: dict[int, tuple[str, bool, str]] = {}


class Recorder:
    def record(self, number: int, title: str, passed: bool, detail: str = "") -> None:
        _ACCEPTANCE[number] = (title, bool(passed), detail)


@pytest.fixture(scope="session")
def acceptance():
    return Recorder()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_frame(rng) -> Frame:
    R = random_rotation(rng)
    return Frame(R[0], R[1], R[2])


def random_beam(k, rng):
    return make_beam(k, random_frame(rng))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(_ACCEPTANCE):
        title, ok, detail = _ACCEPTANCE[n]
        tr.write_line(f"[{'PASS' if ok else 'FAIL'}] {n:2d}. {title}" + (f"  ({detail})" if detail else ""))
