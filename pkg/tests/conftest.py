import pytest

from multicite.ingest import data_path, default_mapping, load_appendix

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def appendix():
    return load_appendix()


@pytest.fixture(scope="session")
def mapping():
    return default_mapping()


@pytest.fixture(scope="session")
def data_dir():
    return data_path("")


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
