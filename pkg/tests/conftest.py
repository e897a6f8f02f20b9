import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, str(Path(__file__).parent))

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

DATA = Path(__file__).resolve().parent.parent / "data"


@pytest.fixture(scope="session")
def g31_group():
    from qsteiner import known
    from qsteiner.group import closure

    return closure([known.g31()])


@pytest.fixture(scope="session")
def g31_normalizer():
    from qsteiner import known
    from qsteiner.group import closure

    return closure(known.normalizer_g31_generators())


@pytest.fixture(scope="session")
def g31_km(g31_group):
    from qsteiner.km import build_km_matrix, filter_lambda1
    from qsteiner.theory import DesignParams

    full = build_km_matrix(g31_group, DesignParams.sts(7))
    return full, filter_lambda1(full)


@pytest.fixture(scope="session")
def g4_group():
    from qsteiner import known
    from qsteiner.group import closure

    return closure([known.g4()])


@pytest.fixture(scope="session")
def g4_km(g4_group):
    from qsteiner.km import build_km_matrix, filter_lambda1
    from qsteiner.theory import DesignParams

    return filter_lambda1(build_km_matrix(g4_group, DesignParams.sts(7)))

# pass/fail lines written by test_acceptance.py, echoed after the run
ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
