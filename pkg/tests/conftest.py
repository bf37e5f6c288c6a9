import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from layerkey.kdf import REDUCED, STANDARD, MasterSecret, derive_chain  # noqa: E402


@pytest.fixture(scope="session")
def standard_key():
    """derive_chain("life", [out, of, balance]) under the Standard profile."""
    key = derive_chain(MasterSecret.from_text("life"), ["out", "of", "balance"], STANDARD)
    yield key
    key.wipe()


@pytest.fixture
def reduced():
    return REDUCED


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line: PASS/FAIL plus a short measured detail."""
    record = {"name": request.node.name, "detail": ""}

    def note(detail):
        record["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    status = "PASS" if rep is not None and rep.passed else "FAIL"
    ACCEPTANCE_LINES.append(f"{status}  {request.node.name}  {record['detail']}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
