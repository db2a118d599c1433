import pytest

from dme32.dme import derive_public_key, gen_system_params, keygen

from helpers import RESULTS


@pytest.fixture(scope="session")
def params8():
    return gen_system_params(8, 1)


@pytest.fixture(scope="session")
def params_nist():
    return gen_system_params(48, preset="nist")


@pytest.fixture(scope="session")
def key8(params8):
    sk = keygen(params8, 3)
    return sk, derive_public_key(sk, params8)


def pytest_terminal_summary(terminalreporter):
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
