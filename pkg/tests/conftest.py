import pytest
from hypothesis import HealthCheck, settings

from effmass.profiles import ConstantMass, CoshMass, RationalMass

settings.register_profile(
    "effmass", deadline=None, max_examples=25, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("effmass")


@pytest.fixture(params=[CoshMass(1.0), RationalMass(0.8)], ids=["cosh1", "rational0.8"])
def builtin(request):
    return request.param


@pytest.fixture(params=[ConstantMass(), CoshMass(1.0), CoshMass(1.5), RationalMass(0.8), RationalMass(1.2)],
                ids=["constant", "cosh1", "cosh1.5", "rational0.8", "rational1.2"])
def any_profile(request):
    return request.param


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
