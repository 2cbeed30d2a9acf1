import pytest

from nlsblowup.nls_solver import REFERENCE_TIMES, SimulationConfig, run
from nlsblowup.profile_ode import ProfileParams, integrate_profile
from nlsblowup.selfsimilar import SelfSimilarSolution
from nlsblowup.shooting import shoot

REFERENCE = dict(d=1, sigma=1.9, a=0.5145, q0=1.2953)


@pytest.fixture(scope="session")
def ref_params():
    return ProfileParams(**REFERENCE)


@pytest.fixture(scope="session")
def ref_profile(ref_params):
    return integrate_profile(ref_params, 40.0, 1e-10)


@pytest.fixture(scope="session")
def ref_profile70(ref_params):
    return integrate_profile(ref_params, 70.0, 1e-10)


@pytest.fixture(scope="session")
def ref_solution(ref_profile70):
    return SelfSimilarSolution.unit_width(ref_profile70)


@pytest.fixture(scope="session")
def reference_run(ref_profile70):
    config = SimulationConfig(sigma=1.9, t_end=REFERENCE_TIMES[-1], snapshot_times=REFERENCE_TIMES)
    return run(ref_profile70, config)


@pytest.fixture(scope="session")
def shoot_default():
    return shoot(1, 1.9, (0.5, 1.3))


ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Record an acceptance verdict: criterion(number, ok, detail)."""

    def record(number, ok, detail):
        ACCEPTANCE[number] = (bool(ok), detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}")

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number}: {detail}")
