import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_acceptance: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        detail = dict(report.user_properties).get("detail", "")
        _acceptance[name] = ("PASS" if report.passed else "FAIL", detail)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    from test_acceptance import CRITERIA

    tr = terminalreporter
    tr.section("acceptance criteria")
    for i, (name, label) in enumerate(CRITERIA.items(), start=1):
        verdict, detail = _acceptance.get(name, ("NOT RUN", ""))
        line = f"[{verdict}] criterion {i:2d}: {label}"
        if detail:
            line += f"  ({detail})"
        tr.write_line(line)


@pytest.fixture
def params():
    from vcquad.dynamics import VehicleParams

    return VehicleParams()
