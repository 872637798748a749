"""Prints one PASS/FAIL line per acceptance criterion at the end of the run."""

_OUTCOMES = {}


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    if "criterion" not in props:
        return
    if report.when == "call" or report.outcome == "failed":
        key = props["criterion"]
        prev = _OUTCOMES.get(key, (True, props.get("title", "")))
        _OUTCOMES[key] = (prev[0] and report.outcome == "passed", props.get("title", ""))


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_OUTCOMES):
        ok, title = _OUTCOMES[key]
        terminalreporter.write_line(f"criterion {key:2d}: {'PASS' if ok else 'FAIL'}  {title}")
