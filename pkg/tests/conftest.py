import os

import pytest
from hypothesis import HealthCheck, settings

from wbt.arith_tab import tabulate

settings.register_profile(
    "wbt", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("wbt")

LONGRUN = os.environ.get("WBT_LONGRUN") == "1"


def pytest_collection_modifyitems(config, items):
    if LONGRUN:
        return
    skip = pytest.mark.skip(reason="long run; set WBT_LONGRUN=1 to enable")
    for item in items:
        if "longrun" in item.keywords:
            item.add_marker(skip)


@pytest.fixture(scope="session")
def table_1e4():
    return tabulate(1, 10**4)


@pytest.fixture(scope="session")
def table_1e6():
    return tabulate(1, 10**6)


# -- acceptance reporting --------------------------------------------------------

ACCEPTANCE_LINES = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[ACCEPTANCE_LINES] = []


class Criterion:
    """Collects the checks of one acceptance criterion and prints a single verdict line."""

    def __init__(self, config, number: int, title: str):
        self.config, self.number, self.title = config, number, title
        self.failed: list[str] = []
        self.notes: list[str] = []

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.failed.append(what)

    def note(self, text: str) -> None:
        self.notes.append(text)

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc is not None:
            self.failed.append(f"{exc_type.__name__}: {exc}")
        status = "FAIL" if self.failed else "PASS"
        detail = "; ".join(self.failed if self.failed else self.notes)
        line = f"AC{self.number:02d} {status}  {self.title}" + (f"  [{detail}]" if detail else "")
        print(line)
        self.config.stash[ACCEPTANCE_LINES].append(line)
        if exc is None:
            assert not self.failed, line
        return False


@pytest.fixture
def criterion(request):
    return lambda number, title: Criterion(request.config, number, title)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(ACCEPTANCE_LINES, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
