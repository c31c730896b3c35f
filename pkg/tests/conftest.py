import pytest

from cubicmetric.montecarlo import run_sweep, simulate_xi
from cubicmetric.ofdm import OfdmConfig, PowerNorm

FIG1_TRIALS = 100_000
FIG2_TRIALS = 100_000
FIG2_N = (64, 256)
FIG2_L = (1.0, 1.2, 1.5, 1.7, 2.0, 4.0)


@pytest.fixture(scope="session")
def fig1_xi():
    """xi at L = 1 and L = 32 for the same 10^5 frames, N = 1024."""
    config = OfdmConfig(1024, 32.0, power_norm=PowerNorm.ENSEMBLE, seed=7)
    xi = simulate_xi(config, FIG1_TRIALS, [1.0, 32.0])
    return {1.0: xi[0], 32.0: xi[1]}


@pytest.fixture(scope="session")
def fig2_batches():
    """Paired batches against the L = 32 reference for each N in FIG2_N."""
    return {n: run_sweep(OfdmConfig(n, power_norm=PowerNorm.ENSEMBLE, seed=0), FIG2_L, FIG2_TRIALS)
            for n in FIG2_N}


_CRITERIA = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    number = int(name.split("_")[2])
    if report.when == "call" or report.outcome != "passed":
        _CRITERIA[number] = (report.outcome, name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        outcome, name = _CRITERIA[number]
        status = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        terminalreporter.write_line(f"criterion {number}: {status}  ({name})")
