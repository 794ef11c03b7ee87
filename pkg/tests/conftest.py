import pytest
from hypothesis import HealthCheck, settings

from hfd import catalog

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def s1():
    return catalog.build_s1s2(1)


@pytest.fixture(scope="session")
def s2():
    return catalog.build_s1s2(2)


@pytest.fixture(scope="session")
def trefoil():
    return catalog.build_trefoil_surgery()


@pytest.fixture(scope="session")
def hyp():
    return catalog.build_example_hyp()


@pytest.fixture(scope="session")
def models():
    return catalog.catalog_models(2)


ACCEPTANCE = []


@pytest.fixture
def record():
    """Log one PASS/FAIL line for an acceptance criterion and assert on it."""

    def _record(number, text, ok, detail=""):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {text}" + (f"  [{detail}]" if detail else "")
        ACCEPTANCE.append((number, line))
        print(line)
        assert ok, line

    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
