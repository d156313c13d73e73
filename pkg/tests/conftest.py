import numpy as np
import pytest
from hypothesis import settings

from superlift.grassmann import GrassmannNumber, random_grassmann

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES: dict[int, str] = {}


def record(number: int, ok: bool, detail: str) -> None:
    ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture
def rng():
    return np.random.default_rng(20261017)


def gen(j: int, L: int) -> GrassmannNumber:
    return GrassmannNumber.generator(j, L)


def soul_even(rng, L, **kw) -> GrassmannNumber:
    return random_grassmann(rng, L, "even", body=False, **kw)


def soul_odd(rng, L, **kw) -> GrassmannNumber:
    return random_grassmann(rng, L, "odd", body=False, **kw)
