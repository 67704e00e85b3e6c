import numpy as np
import pytest

from ggmrecon.ggm import GgmParams, Observation
from ggmrecon.graph import make_random

ACCEPTANCE_LINES: list[str] = []


def random_instance(rng, n, edge_prob=None, p_missing=0.5, xi_range=(0.1, 2.0), j_range=(0.0, 2.0)):
    """Random graph, valid parameters, values and a mask with both parts nonempty."""
    if edge_prob is None:
        edge_prob = min(1.0, 3.0 / max(n - 1, 1))
    g = make_random(n, edge_prob, rng)
    params = GgmParams(h=rng.normal(0.5, 1.0, n), xi=rng.uniform(*xi_range), j=rng.uniform(*j_range))
    values = rng.normal(0.0, 2.0, n)
    hidden = rng.random(n) < p_missing
    if n > 1:
        if hidden.all():
            hidden[rng.integers(n)] = False
        if not hidden.any():
            hidden[rng.integers(n)] = True
    else:
        hidden[:] = True
    return g, params, Observation(values, np.flatnonzero(hidden))


@pytest.fixture
def rng():
    return np.random.default_rng(20141016)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
