import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "default", max_examples=40, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


@pytest.fixture(scope="session", autouse=True)
def _isolated_cache(tmp_path_factory):
    # keep test runs away from the user's catalog cache
    from dimermagic import stabilizers

    path = tmp_path_factory.mktemp("catalog-cache")
    old = os.environ.get(stabilizers.CACHE_ENV)
    os.environ[stabilizers.CACHE_ENV] = str(path)
    stabilizers.load_catalog.cache_clear()
    yield path
    if old is None:
        os.environ.pop(stabilizers.CACHE_ENV, None)
    else:
        os.environ[stabilizers.CACHE_ENV] = old
    stabilizers.load_catalog.cache_clear()


def random_density(rng, n_qubits, rank=None):
    d = 2**n_qubits
    rank = d if rank is None else rank
    g = rng.normal(size=(d, rank)) + 1j * rng.normal(size=(d, rank))
    m = g @ g.conj().T
    return m / np.trace(m).real


def random_pure(rng, n_qubits):
    return random_density(rng, n_qubits, rank=1)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
