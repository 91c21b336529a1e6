import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prefattach.specfun import log_beta_ratio, log_gamma_ratio, log_gamma_ratio_shift

mpmath.mp.dps = 40


def ref_ratio(x, c):
    return float(mpmath.loggamma(mpmath.mpf(x)) - mpmath.loggamma(mpmath.mpf(x) + mpmath.mpf(c)))


@pytest.mark.parametrize("x, c", [(0.5, 0.3), (3.0, 2.0), (11.9, 1.0), (12.1, 1.0), (50.0, 0.01), (1e6, 3.5), (1e12, 2.0)])
def test_log_gamma_ratio_against_mpmath(x, c):
    ref = ref_ratio(x, c)
    assert log_gamma_ratio(x, c) == pytest.approx(ref, rel=1e-13, abs=1e-14)


def test_integer_ratio_exact():
    # Gamma(5)/Gamma(7) = 1/30
    assert np.exp(log_gamma_ratio(5.0, 2.0)) == pytest.approx(1 / 30, rel=1e-14)


@settings(max_examples=60, deadline=None)
@given(st.floats(0.1, 200.0), st.floats(0.01, 50.0), st.integers(1, 10**7))
def test_shift_against_mpmath(x, c, n):
    got = log_gamma_ratio_shift(x, c, float(n))
    X, C, N = mpmath.mpf(x), mpmath.mpf(c), mpmath.mpf(n)
    ref = mpmath.loggamma(X + N) - mpmath.loggamma(X + C + N) - mpmath.loggamma(X) + mpmath.loggamma(X + C)
    assert got == pytest.approx(float(ref), rel=1e-12, abs=1e-12)


def test_shift_zero_is_zero():
    assert log_gamma_ratio_shift(3.3, 1.2, 0.0) == pytest.approx(0.0, abs=1e-15)


def test_beta_ratio_identity():
    # B(x + s, 1 + y) / B(x, y) at s = 0 is y / (x + y)
    x, y = 7.3, 1.4
    assert np.exp(log_beta_ratio(x, y, 0.0)) == pytest.approx(y / (x + y), rel=1e-14)


def test_vectorized_shapes():
    out = log_gamma_ratio_shift(2.0, 1.0, np.array([1.0, 2.0, 3.0]))
    assert out.shape == (3,)
    # Gamma(2+n)/Gamma(3+n) * Gamma(3)/Gamma(2) = 2 / (2 + n)
    assert np.allclose(np.exp(out), 2 / (2 + np.array([1, 2, 3])), rtol=1e-14)
