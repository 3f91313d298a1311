import pytest


@pytest.fixture(scope="session")
def lam3():
    return 3.0


@pytest.fixture(scope="session")
def delta3(lam3):
    from resonance_lab.zeta import delta_bisection

    return delta_bisection(lam3, 32)


@pytest.fixture(scope="session")
def perron3(lam3, delta3):
    from resonance_lab.periods import perron_eigenvector

    return perron_eigenvector(delta3, lam3, 32)


@pytest.fixture(scope="session")
def period3(lam3, delta3, perron3):
    from resonance_lab.periods import reconstruct_period

    return reconstruct_period(delta3, lam3, perron3, probes=10)


@pytest.fixture(scope="session")
def extended3(lam3, delta3, period3):
    from resonance_lab.slowop import extend_period_function

    return extend_period_function(delta3, lam3, period3.pair, 40)
