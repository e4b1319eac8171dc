import numpy as np
import pytest

from tempered_ou.errors import ParameterError
from tempered_ou.rand_core import (DEFAULT_SEED, RandomStream, derive_substream, draw_gamma,
                                   draw_poisson, make_stream, next_uniform)

from conftest import mean_within


def test_default_seed_is_fixed():
    assert make_stream().seed == DEFAULT_SEED == 0
    assert make_stream().uniform(5).tolist() == RandomStream(0).uniform(5).tolist()


def test_uniform_reproducible():
    a, b = RandomStream(42), RandomStream(42)
    assert [next_uniform(a), next_uniform(a)] == [next_uniform(b), next_uniform(b)]


def test_uniform_open_interval_and_mean():
    u = RandomStream(1).uniform(10**6)
    assert np.all((u > 0) & (u < 1))
    assert abs(u.mean() - 0.5) <= 0.002


def test_seed_range():
    with pytest.raises(ParameterError):
        RandomStream(-1)
    with pytest.raises(ParameterError):
        RandomStream(1 << 64)
    RandomStream((1 << 64) - 1).uniform()


def test_gamma_exponential_mean():
    x = draw_gamma(RandomStream(2), 1.0, 1.0, 10**5)
    assert abs(x.mean() - 1.0) <= 0.013


def test_gamma_variance():
    x = draw_gamma(RandomStream(3), 2.0, 1.0, 10**5)
    # sd of the sample variance: sqrt((mu4 - sigma^4)/n), mu4 = 3*2*(2+2) = 24
    se = np.sqrt((24.0 - 4.0) / x.size)
    assert abs(x.var(ddof=1) - 2.0) <= 5 * se


def test_gamma_rate_and_small_shape():
    x = draw_gamma(RandomStream(4), 0.05, 4.0, 10**5)
    assert np.all(x > 0)
    assert mean_within(x, 0.05 / 4.0)


@pytest.mark.parametrize("shape, rate", [(0, 1), (-1, 1), (1, 0), (np.nan, 1)])
def test_gamma_bad_parameters(shape, rate):
    with pytest.raises(ParameterError):
        draw_gamma(RandomStream(0), shape, rate)


def test_poisson():
    s = RandomStream(5)
    assert draw_poisson(s, 0.0) == 0
    assert np.all(draw_poisson(s, 0.0, 100) == 0)
    x = draw_poisson(s, 3.0, 10**5)
    assert abs(x.mean() - 3.0) <= 0.03
    with pytest.raises(ParameterError):
        draw_poisson(s, -1.0)
    with pytest.raises(ParameterError):
        draw_poisson(s, np.inf)


def test_substreams_deterministic_and_distinct():
    s = RandomStream(7)
    a = derive_substream(s, 0).uniform(100)
    assert np.array_equal(a, derive_substream(s, 0).uniform(100))
    assert derive_substream(s, 1).uniform() != a[0]
    # deriving does not consume the parent
    assert RandomStream(7).uniform() == s.uniform()


def test_substream_independence():
    s = RandomStream(7)
    n = 10**5
    r = np.corrcoef(derive_substream(s, 0).uniform(n), derive_substream(s, 1).uniform(n))[0, 1]
    assert abs(r) <= 0.02
    assert abs(r) <= 4 / np.sqrt(n)


def test_substream_bad_index():
    with pytest.raises(ParameterError):
        derive_substream(RandomStream(0), -1)
