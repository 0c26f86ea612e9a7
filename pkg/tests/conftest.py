import numpy as np
import pytest

from netsir import Graph, EpidemicParams


def random_graph(rng: np.random.Generator, n: int, edge_prob: float = 0.6) -> Graph:
    edges = set()
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_prob:
                edges.add((i, j))
    return Graph(node_count=n, edges=frozenset(edges))


def random_instance(rng: np.random.Generator, n: int,
                    rate_lo: float = 0.05, rate_hi: float = 1.0):
    """Random graph, rates and a non-empty infected set."""
    g = random_graph(rng, n)
    beta = rng.uniform(rate_lo, rate_hi, size=n)
    delta = rng.uniform(rate_lo, rate_hi, size=n)
    k = int(rng.integers(1, n))
    infected = frozenset(int(i) for i in rng.choice(n, size=k, replace=False))
    params = EpidemicParams(beta=beta, delta=delta, initially_infected=infected)
    return g, params


def ks_statistic(samples: np.ndarray, cdf_values_at_sorted: np.ndarray) -> float:
    """Two-sided KS distance between an empirical sample and a model CDF
    already evaluated at the sorted sample points."""
    n = len(samples)
    i = np.arange(1, n + 1)
    f = cdf_values_at_sorted
    return float(max(np.max(i / n - f), np.max(f - (i - 1) / n)))


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
