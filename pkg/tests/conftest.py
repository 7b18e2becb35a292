"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_outcomes: dict[int, dict] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    num, title = mark.args
    slot = _outcomes.setdefault(num, {"title": title, "ok": True, "notes": []})
    slot["ok"] &= rep.passed
    slot["notes"] += [v for k, v in item.user_properties if k == "detail" and rep.when == "call"]


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_outcomes):
        slot = _outcomes[num]
        status = "PASS" if slot["ok"] else "FAIL"
        notes = "; ".join(slot["notes"])
        line = f"criterion {num:2d} {status}: {slot['title']}"
        terminalreporter.write_line(f"{line} ({notes})" if notes else line)
