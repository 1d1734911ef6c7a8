import numpy as np
import pytest

from dicke_blockade.model import ModelParams


def figure_params(n_atoms, *, g0=100.0, ratio=-0.1, delta=-0.02, gamma=0.0, drive=0.1):
    return ModelParams.from_ratio(n_atoms, g0, ratio, delta=delta, omega_n_over_w=drive, gamma=gamma)


def random_hermitian(rng, d):
    a = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    return (a + a.conj().T) / 2


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[k])
