import numpy as np
import pytest

from cvswap import NetworkRecipe, SqueezerSpec, build_epr, build_ghz
from cvswap.experiments import bundled_sigma, load_covariance

V_EXP, V_ANTI_EXP = 0.26, 9.64

# reported PPT values for the bundled sigma1..sigma5 (eta = 0.98 ... 0.20)
REPORTED_PPT = {
    1: (0.52, 0.39, 0.40),
    2: (0.61, 0.42, 0.42),
    3: (0.74, 0.50, 0.50),
    4: (0.86, 0.58, 0.56),
    5: (1.03, 0.70, 0.66),
}


def resources(squeezer):
    a = build_ghz(NetworkRecipe.default("ghz_a", squeezer))
    b = build_ghz(NetworkRecipe.default("ghz_b", squeezer))
    e = build_epr(NetworkRecipe.default("epr", squeezer))
    return a, b, e


@pytest.fixture
def exp_squeezer():
    return SqueezerSpec(V_EXP, V_ANTI_EXP)


@pytest.fixture
def pure_026():
    """Pure squeezing with e^{-2r} = 0.26."""
    return SqueezerSpec(0.26, 1 / 0.26)


@pytest.fixture(params=sorted(REPORTED_PPT))
def sigma(request):
    k = request.param
    return k, load_covariance(bundled_sigma(k))


@pytest.fixture
def rng():
    return np.random.default_rng(20161014)
