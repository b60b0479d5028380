import functools

import pytest

from fintop.elementary import dependent_product_elementary
from fintop.harness.fixtures import get_fixture
from fintop.sites import dependent_product_kan


@functools.lru_cache(maxsize=None)
def fixture(name):
    return get_fixture(name)


@functools.lru_cache(maxsize=None)
def elementary(name):
    fx = fixture(name)
    return dependent_product_elementary(fx.f, fx.h)


@functools.lru_cache(maxsize=None)
def kan(name):
    fx = fixture(name)
    return dependent_product_kan(fx.f, fx.h)


@pytest.fixture
def fix():
    return fixture


# filled in by test_acceptance.py, one entry per criterion
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
