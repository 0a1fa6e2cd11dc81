import numpy as np
import pytest

from labprod import COUNTRY_PRESETS, AnnualSeries, SearchSpec
from labprod.dataio import DEMO_GDP_PATH, generate_synthetic_country

FRANCE = COUNTRY_PRESETS["france"]
FRANCE_SPEC = SearchSpec(a2=(300, 600, 10), T=(0, 4, 1), N0=570_000, t0=1959)


@pytest.fixture
def france_clean():
    return generate_synthetic_country(FRANCE, DEMO_GDP_PATH, 0.0, seed=0, name="france")


@pytest.fixture
def france_noisy():
    return generate_synthetic_country(FRANCE, DEMO_GDP_PATH, 0.005, seed=0, name="france")


def linear_gdp(start=1950, n=40, level=10_000.0, step=420.0):
    """GDP path growing by exactly ``step`` dollars a year (integer-valued, exact in floats)."""
    return AnnualSeries(start, level + step * np.arange(n), "G")


def lfp_path(start=1960, n=40, seed=0, base=0.62):
    rng = np.random.default_rng(seed)
    walk = base + np.cumsum(rng.normal(0, 0.004, n)) + 0.03 * np.sin(np.arange(n) / 4)
    return AnnualSeries(start, walk, "LFP")


ACCEPTANCE_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test's own assertions decide pass/fail."""
    state = {"detail": ""}

    def note(detail):
        state["detail"] = detail

    yield note
    rep = getattr(request.node, "rep_call", None)
    ok = rep is not None and rep.passed
    ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {request.node.name}  {state['detail']}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
