import numpy as np
import pytest

from vosedge.image import ColorImage

# criterion id -> (passed, detail); filled by tests/test_acceptance.py
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def color_step(width=64, height=64, left=(255, 0, 0), right=(0, 0, 255), vertical=True):
    data = np.empty((height, width, 3), dtype=np.uint8)
    if vertical:
        data[:, : width // 2] = left
        data[:, width // 2:] = right
    else:
        data[: height // 2] = left
        data[height // 2:] = right
    return ColorImage(data)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE, key=lambda k: int(k.split()[0])):
        ok, detail = ACCEPTANCE[key]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {key}: {detail}")
