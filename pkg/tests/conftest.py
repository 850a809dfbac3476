import pytest

ACCEPTANCE = {
    1: "closed form vs Monte Carlo reconciliation",
    2: "Gaussian call vs quadrature",
    3: "Black-76 limits, parity and domain errors",
    4: "OLS vs independent least squares",
    5: "calibration round trip",
    6: "model table conformance",
    7: "negative-price capability",
    8: "report determinism across worker counts",
    9: "Jensen ordering of paper-average mode",
    10: "GARCH one-step moments",
}


def pytest_configure(config):
    config._ac_outcomes = {}
    config._ac_details = {}


@pytest.fixture
def detail(request):
    """Attach a one-line note to the acceptance criterion of the calling test."""
    marker = request.node.get_closest_marker("acceptance")

    def note(text):
        request.config._ac_details[marker.args[0]] = text

    return note


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("acceptance")
    if marker is None or call.when != "call":
        return
    outcomes = item.config._ac_outcomes
    passed = call.excinfo is None
    outcomes[marker.args[0]] = outcomes.get(marker.args[0], True) and passed


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    outcomes = config._ac_outcomes
    if not outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, title in ACCEPTANCE.items():
        if n not in outcomes:
            status = "NOT RUN"
        else:
            status = "PASS" if outcomes[n] else "FAIL"
        line = f"AC{n:<2} {status:<7} {title}"
        if n in config._ac_details:
            line += f" ({config._ac_details[n]})"
        terminalreporter.write_line(line)
