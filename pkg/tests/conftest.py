from pathlib import Path

import pytest

from rdfgql import Engine

FIXTURES = Path(__file__).parent / "fixtures"
PEOPLE = FIXTURES / "people"
EX = "http://www.exmpl.org/"


def read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


@pytest.fixture(scope="session")
def people_engine() -> Engine:
    return Engine.from_files(PEOPLE / "schema.graphql", PEOPLE / "data.nt")


@pytest.fixture(scope="session")
def doe_people() -> str:
    return read(PEOPLE / "doe_people.graphql")


@pytest.fixture(scope="session")
def company_staff() -> str:
    return read(PEOPLE / "company_staff.graphql")


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
