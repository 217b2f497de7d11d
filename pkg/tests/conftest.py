from pathlib import Path

import numpy as np
import pytest

from tsphyb.tsplib import instance_from_coords, parse_instance_file

DATA = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def berlin52():
    return parse_instance_file(DATA / "berlin52.tsp")


@pytest.fixture(scope="session")
def eil51():
    return parse_instance_file(DATA / "eil51.tsp")


@pytest.fixture(scope="session")
def kroa100():
    return parse_instance_file(DATA / "kroa100.tsp")


@pytest.fixture
def rand_instance():
    """Factory for small random integer-coordinate EUC_2D instances."""

    def make(n, seed=0, span=1000):
        rng = np.random.default_rng(seed)
        coords = rng.integers(0, span, size=(n, 2)).astype(float)
        return instance_from_coords(f"rand{n}_{seed}", coords)

    return make
