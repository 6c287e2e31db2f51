import numpy as np
import pytest

from lepage.chart import Chart
from lepage.parser import parse
from lepage.poly import equals


@pytest.fixture
def c22():
    return Chart(2, 2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def assert_equal(a, b, exact=True):
    verdict = equals(a, b)
    assert verdict.equal, f"{a} != {b}"
    if exact:
        assert verdict.exact


def P(text, chart, params=(), extra=()):
    return parse(text, chart, params, extra)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def acceptance(request):
    """Record one verdict line for an acceptance criterion and assert it."""
    def record(number: int, title: str, checks: dict):
        failed = [k for k, ok in checks.items() if not ok]
        line = f"criterion {number:>2} {'PASS' if not failed else 'FAIL'}  {title}"
        if failed:
            line += f"  [failed: {', '.join(failed)}]"
        request.config.stash[_ACCEPTANCE].append(line)
        print(line)
        assert not failed, line
    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
