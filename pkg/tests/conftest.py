import numpy as np
import pytest

from tgeo import hopf_field, meridian_field


@pytest.fixture(scope="session")
def hopf3():
    return hopf_field(1, 1.0)


@pytest.fixture(scope="session")
def hopf5():
    return hopf_field(2, 1.0)


@pytest.fixture(scope="session")
def hopf7():
    return hopf_field(3, 1.0)


@pytest.fixture(scope="session")
def hopf3_r2():
    return hopf_field(1, 2.0)


@pytest.fixture(scope="session")
def meridian2():
    # unit 2-sphere, axis along the first coordinate
    return meridian_field(np.array([1.0, 0.0, 0.0]), 1.0)


@pytest.fixture(scope="session")
def meridian3():
    return meridian_field(np.array([1.0, 0.0, 0.0, 0.0]), 1.0)


def seeded_points(xi, count, seed=0, pole_cut=0.95):
    """Deterministic sample points, kept away from meridian poles."""
    sphere = xi.sphere
    out = []
    idx = 0
    while len(out) < count:
        rng = np.random.default_rng((seed, idx))
        idx += 1
        p = sphere.random_point(rng)
        if xi.name == "meridian" and abs(p.coords[0]) / sphere.radius > pole_cut:
            continue
        out.append(p)
    return out
