import pytest

from zetabessel.precision import PrecisionContext


@pytest.fixture
def ctx40():
    return PrecisionContext(40)


@pytest.fixture
def ctx30():
    return PrecisionContext(30)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(lines, key=lambda k: (int(k.split(".")[0]), k)):
        terminalreporter.write_line(lines[key])
