import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from shiftlab.weights import WeightFamily

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")


def half_example(N: int) -> WeightFamily:
    """d = 2 family with w_{0,j} = 1/2 and every other weight 1."""
    W = WeightFamily.constant(2, N, 1.0)
    w = np.array(W.w)
    w[0, :] = 0.5
    return W.replace(w)


def zero_weight_family(a21=-1.0, delta=(0.0, 0.0, 0.0)) -> WeightFamily:
    """The 3-variable zero-weight family, built directly (no consistency check)."""
    a = {(1, 2): 1, (1, 3): 1, (2, 1): a21, (2, 3): 1, (3, 1): 1, (3, 2): 1}
    entries = {}
    for (I, j), _ in WeightFamily.constant(3, 2).entries():
        if sum(I) == 0:
            entries[(I, j)] = delta[j - 1]
        elif sum(I) == 1 and I.index(1) + 1 != j:
            entries[(I, j)] = a[(I.index(1) + 1, j)]
        else:
            entries[(I, j)] = 0.0
    return WeightFamily.from_entries(3, 2, entries)


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture
def criterion(request):
    """Record a PASS/FAIL line for an acceptance criterion."""
    def record(number: int, label: str, detail: str = ""):
        request.node._criterion = (number, label, detail)
        return request.node
    yield record
    info = getattr(request.node, "_criterion", None)
    if info is None:
        return
    number, label, detail = info
    detail = getattr(request.node, "_criterion_detail", detail)
    report = getattr(request.node, "rep_call", None)
    ok = report is not None and report.passed
    ACCEPTANCE_LINES[number] = f"criterion {number} {'PASS' if ok else 'FAIL'}: {label}" + (
        f" [{detail}]" if detail else "")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
