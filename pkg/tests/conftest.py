import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import HealthCheck, settings
from scipy.sparse.csgraph import maximum_flow

from planarflow import build_from_rotation

settings.register_profile(
    "repo", deadline=None, suppress_health_check=[HealthCheck.too_slow], derandomize=True)
settings.load_profile("repo")


def scipy_maxflow_value(graph, capacity, sources, sinks) -> int:
    """Second oracle, independent of the package: scipy's max flow with an apex pair."""
    n = graph.n
    cap = np.asarray(capacity, dtype=np.int64)
    big = int(cap.sum()) + 1
    rows = [graph.tail[d] for d in range(graph.num_darts)]
    cols = [graph.tail[d ^ 1] for d in range(graph.num_darts)]
    vals = cap.tolist()
    rows += [n] * len(sources) + list(sinks)
    cols += list(sources) + [n + 1] * len(sinks)
    vals += [big] * (len(sources) + len(sinks))
    m = sp.csr_matrix((np.array(vals, dtype=np.int32), (rows, cols)), shape=(n + 2, n + 2))
    return int(maximum_flow(m, n, n + 1).flow_value)


def triangle():
    return build_from_rotation([[1, 2], [2, 0], [0, 1]])


def k4():
    # centre 3 inside triangle 0, 1, 2
    return build_from_rotation([[1, 3, 2], [2, 3, 0], [0, 3, 1], [0, 1, 2]])


def square():
    return build_from_rotation([[1, 3], [2, 0], [3, 1], [0, 2]])


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
