"""Prints one PASS/FAIL line per acceptance criterion after the run."""

_OUTCOMES = {}


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None or call.when != "call":
        return
    number, title = marker.args
    _OUTCOMES[number] = (title, call.excinfo is None, list(item.user_properties))


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.4g}"
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    return str(value)


def pytest_terminal_summary(terminalreporter):
    if not _OUTCOMES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_OUTCOMES):
        title, passed, props = _OUTCOMES[number]
        detail = "; ".join(f"{k}={_fmt(v)}" for k, v in props)
        line = f"{'PASS' if passed else 'FAIL'}  [{number:>2}] {title}"
        terminalreporter.write_line(line + (f"  ({detail})" if detail else ""))
