"""One PASS/FAIL line per acceptance criterion at the end of the run."""

import pytest

_CRITERIA: dict[int, tuple[str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    num = getattr(item.function, "criterion", None)
    if num is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _CRITERIA[num] = (verdict, item.function.__doc__.strip().splitlines()[0])


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        verdict, title = _CRITERIA[num]
        terminalreporter.write_line(f"criterion {num:2d}: {verdict}  {title}")
