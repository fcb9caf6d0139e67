from collections import defaultdict

import pytest

_outcomes = defaultdict(list)

CRITERIA = {
    1: "axiom suite",
    2: "reduction identities",
    3: "Fejer monotonicity to a known fixed point",
    4: "residual below 1e-8 within 1e5 iterations",
    5: "strong convergence for contractions",
    6: "asymptotic center is the exact finite argmin",
    7: "negative controls (doubling map)",
    8: "byte-identical comparison.csv",
}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None:
        return
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _outcomes[mark.args[0]].append((item.nodeid, rep.passed or rep.skipped))


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in sorted(CRITERIA):
        runs = _outcomes.get(k)
        if not runs:
            tr.write_line(f"criterion {k}: NOT RUN  {CRITERIA[k]}")
            continue
        failed = [nodeid for nodeid, ok in runs if not ok]
        status = "FAIL" if failed else "PASS"
        tr.write_line(f"criterion {k}: {status}  {CRITERIA[k]} "
                      f"({len(runs) - len(failed)}/{len(runs)} checks)")
        for nodeid in failed:
            tr.write_line(f"    failed: {nodeid.split('::', 1)[-1]}")
