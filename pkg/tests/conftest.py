import pytest

import leadlag as ll

# benchmark experiment parameters: eight correlated bands on a J=13 grid
BENCHMARK_LEVELS = [
    {"j": 1, "R": 0.3, "theta_over_tau": -1},
    {"j": 2, "R": 0.5, "theta_over_tau": -1},
    {"j": 3, "R": 0.7, "theta_over_tau": -2},
    {"j": 4, "R": 0.5, "theta_over_tau": -2},
    {"j": 5, "R": 0.5, "theta_over_tau": -3},
    {"j": 6, "R": 0.5, "theta_over_tau": -5},
    {"j": 7, "R": 0.5, "theta_over_tau": -7},
    {"j": 8, "R": 0.5, "theta_over_tau": -10},
]

TRUE_LAGS = (-1, -1, -2, -2, -3, -5, -7, -10)


def benchmark_spec(n=15000, pi1=0.0, pi2=0.0):
    return {"J": 13, "n": n, "pi1": pi1, "pi2": pi2, "levels": BENCHMARK_LEVELS}


@pytest.fixture(scope="session")
def benchmark_model():
    return ll.load_model(benchmark_spec())
