import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def loop_velocity(z, gammas):
    """Straight double loop over the pair formula, kept free of numpy broadcasting."""
    out = []
    for n, zn in enumerate(z):
        total = 0j
        for j, zj in enumerate(z):
            if j != n:
                total += gammas[j] / complex(zn - zj).conjugate()
        out.append(total)
    return np.array(out)
