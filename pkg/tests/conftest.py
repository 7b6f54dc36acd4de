import functools

import pytest

from siltlab.algebra import corpus_algebra

FINITE = ["one_vertex", "a2", "a3_linear", "a3_rad2", "square_commutative", "square_zero"]


@functools.lru_cache(maxsize=None)
def shared(name: str):
    """One algebra instance per corpus name, so registries and caches are reused."""
    return corpus_algebra(name)


@pytest.fixture
def a2():
    return shared("a2")


@pytest.fixture
def a3():
    return shared("a3_linear")


# criterion number -> (passed, detail); filled by test_acceptance and echoed in the summary
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'}  {detail}")
