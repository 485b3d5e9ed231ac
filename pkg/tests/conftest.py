import numpy as np
import pytest

from densitylab.matgroups import IntMatrix, standard_generators


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_word_matrix(rng, n=2, length=20):
    """Product of a random word in the standard generators and their inverses."""
    gens, _ = standard_generators(n)
    g = IntMatrix.identity(n)
    for _ in range(int(rng.integers(0, length + 1))):
        h = gens[int(rng.integers(len(gens)))]
        g = g @ (h if rng.random() < 0.5 else h.inverse())
    return g
