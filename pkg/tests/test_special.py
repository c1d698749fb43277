import mpmath
import numpy as np
import pytest

from dpkl.exceptions import InputError
from dpkl.special import digamma

EULER_GAMMA = 0.57721566490153286061


@pytest.mark.parametrize("x, expected", [
    (1.0, -EULER_GAMMA),
    (2.0, 1.0 - EULER_GAMMA),
    (0.5, -EULER_GAMMA - 2.0 * np.log(2.0)),
])
def test_reference_values(x, expected):
    assert digamma(x) == pytest.approx(expected, abs=1e-12)


def test_against_mpmath_grid():
    xs = np.concatenate([np.geomspace(1e-3, 1, 60), np.linspace(1, 50, 200), np.geomspace(50, 1e8, 40)])
    ours = digamma(xs)
    ref = np.array([float(mpmath.digamma(mpmath.mpf(float(x)))) for x in xs])
    np.testing.assert_allclose(ours, ref, atol=1e-10, rtol=0)


def test_recurrence():
    xs = np.linspace(0.1, 30, 300)
    np.testing.assert_allclose(digamma(xs + 1), digamma(xs) + 1 / xs, atol=1e-12)


def test_scalar_in_scalar_out():
    assert isinstance(digamma(3), float)
    assert digamma(np.array([1.0, 2.0])).shape == (2,)


@pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, np.nan, np.inf])
def test_domain(bad):
    with pytest.raises(InputError):
        digamma(bad)
