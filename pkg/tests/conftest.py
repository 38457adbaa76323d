import pytest

ACCEPTANCE = {
    1: "formula conformance vs brute-force oracle",
    2: "enumeration completeness vs recursive DFS",
    3: "score bounds and monotonicity (property tests)",
    4: "duplication invariance",
    5: "default-weight golden outputs and weight witness",
    6: "Porter reference vocabulary",
    7: "pipeline determinism",
    8: "lexical and factual segues in the demo data",
}

_results: dict[int, list[bool]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance(n): test belongs to acceptance criterion n")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    n = marker.args[0]
    if rep.when == "call" or (rep.when == "setup" and rep.outcome != "passed"):
        _results.setdefault(n, []).append(rep.outcome == "passed")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in ACCEPTANCE.items():
        runs = _results.get(n)
        if runs is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(runs) else "FAIL"
        terminalreporter.write_line(f"AC{n} {status:7s} {title}")
