import sys
from pathlib import Path

import pytest

TESTS = Path(__file__).resolve().parent
sys.path.insert(0, str(TESTS))

import solc_oracle  # noqa: E402

CORPUS = sorted((TESTS / "corpus").glob("*.sol"))
GOLDEN_LAYOUTS = TESTS / "golden" / "layouts"
FIXTURES = TESTS / "fixtures"

requires_solc = pytest.mark.skipif(not solc_oracle.available(), reason="reference compiler (solc-js) not installed")


@pytest.fixture
def library_source():
    return (TESTS / "corpus" / "library.sol").read_text()


@pytest.fixture(autouse=True)
def _no_color(monkeypatch):
    monkeypatch.setenv("SEAM_NO_COLOR", "1")
    monkeypatch.setenv("SOURCE_DATE_EPOCH", "1700000000")


# -- acceptance summary: one PASS/FAIL line per criterion -------------------

_CRITERIA: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.outcome != "passed"):
        return
    label = dict(report.user_properties).get("criterion")
    if label:
        _CRITERIA[label] = ("PASS" if report.passed else "SKIP" if report.skipped else "FAIL", report.nodeid)


@pytest.fixture(autouse=True)
def _criterion_label(request):
    marker = request.node.get_closest_marker("criterion")
    if marker:
        number, title = marker.args
        request.node.user_properties.append(("criterion", f"{number}. {title}"))


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_CRITERIA, key=lambda s: int(s.split(".")[0])):
        status, _ = _CRITERIA[label]
        terminalreporter.write_line(f"criterion {label}: {status}")
