import pytest

from varcomplex.grammar import parse_expr, parse_form
from varcomplex.jetcore import Bundle

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def line():
    return Bundle(("x",), ("u",))


@pytest.fixture
def plane():
    return Bundle(("t", "x"), ("u",))


@pytest.fixture
def two_fields():
    return Bundle(("t", "x"), ("u", "v"))


@pytest.fixture
def ex():
    return lambda text, b: parse_expr(text, b)


@pytest.fixture
def fm():
    return lambda text, b: parse_form(text, b)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for text in ACCEPTANCE_LINES:
            terminalreporter.write_line(text)
