import time

import pytest

_results: dict[int, tuple[bool, str, float]] = {}


class Criterion:
    def __init__(self, number: int, title: str, limit: float):
        self.number, self.title, self.limit = number, title, limit
        self.start = time.perf_counter()

    def elapsed(self) -> float:
        return time.perf_counter() - self.start

    def check_time(self):
        took = self.elapsed()
        assert took < self.limit, f"took {took:.1f}s, limit {self.limit}s"


@pytest.fixture
def criterion(request):
    """Record one acceptance criterion as PASS or FAIL for the terminal summary."""
    marker = request.node.get_closest_marker("criterion")
    number, title, limit = marker.args
    rec = Criterion(number, title, limit)
    yield rec
    call = getattr(request.node, "rep_call", None)
    ok = call is not None and call.passed
    _results[number] = (ok, title, rec.elapsed())


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title, limit): acceptance criterion")


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_results):
        ok, title, took = _results[number]
        terminalreporter.write_line(
            f"{'PASS' if ok else 'FAIL'} criterion {number}: {title} ({took:.2f}s)")
