import numpy as np
import pytest

from hollowfield import specfun
from hollowfield.errors import DomainError

import oracles

# log-spaced argument grid covering the working envelope
X_GRID = np.geomspace(0.1, 600.0, 40)


def test_j0_matches_series_oracle():
    # frozen from the ascending-series oracle (oracles.bessel_j_series)
    assert specfun.bessel_j(0, 1.0) == pytest.approx(0.765197686557967, rel=1e-14)


def test_y0_matches_series_oracle():
    # frozen from the series oracle (oracles.bessel_y0_series)
    assert specfun.bessel_y(0, 1.0) == pytest.approx(0.088256964215677, rel=1e-13)


def test_j0_limit_toward_zero_argument():
    assert specfun.bessel_j(0, 1e-3) == pytest.approx(1.0, abs=1e-6)


def test_y0_is_large_negative_near_floor():
    assert specfun.bessel_y(0, 1e-3) < -4.0


@pytest.mark.parametrize("n,x", [(5, 0.7), (13, 3.1), (40, 25.0)])
def test_bessel_j_against_series(n, x):
    expected = float(oracles.bessel_j_series(n, x))
    assert specfun.bessel_j(n, x) == pytest.approx(expected, rel=1e-12)


def test_reflection_identities_bitwise():
    assert specfun.bessel_j(-2, 3.5) == specfun.bessel_j(2, 3.5)
    assert specfun.bessel_y(-3, 2.2) == -specfun.bessel_y(3, 2.2)
    for n in range(0, 20):
        for x in (0.5, 7.0, 300.0):
            sign = -1.0 if n % 2 else 1.0
            assert specfun.bessel_j(-n, x) == sign * specfun.bessel_j(n, x)
            assert specfun.bessel_y(-n, x) == sign * specfun.bessel_y(n, x)


def test_hankel2_definition_and_reflection():
    h = specfun.hankel2(0, 1.0)
    assert h.real == specfun.bessel_j(0, 1.0)
    assert h.imag == -specfun.bessel_y(0, 1.0)
    for x in (0.5, 3.3, 40.0):
        assert specfun.hankel2(1, x) == complex(
            specfun.bessel_j(1, x), -specfun.bessel_y(1, x)
        )
    assert specfun.hankel2(-1, 5.0) == -specfun.hankel2(1, 5.0)


def test_domain_errors():
    for bad in (0.0, -1.0, np.nan, 1e-4):
        with pytest.raises(DomainError):
            specfun.bessel_j(0, bad)
        with pytest.raises(DomainError):
            specfun.bessel_y(2, bad)
    with pytest.raises(DomainError):
        specfun.bessel_j(65, 1.0)
    with pytest.raises(DomainError):
        specfun.hankel2(-65, 1.0)
    with pytest.raises(DomainError):
        specfun.bessel_j(1.5, 1.0)


def test_wronskian_invariant():
    for n in range(0, 46):
        for x in X_GRID:
            target = 2.0 / (np.pi * x)
            w = specfun.bessel_j(n + 1, x) * specfun.bessel_y(n, x) - specfun.bessel_j(
                n, x
            ) * specfun.bessel_y(n + 1, x)
            assert abs(w - target) <= 1e-10 * target


def test_three_term_recurrence_invariant():
    for n in range(1, 46):
        for x in X_GRID:
            jm, j0, jp = (specfun.bessel_j(m, x) for m in (n - 1, n, n + 1))
            resid = abs(jm + jp - (2.0 * n / x) * j0)
            assert resid <= 1e-10 * max(abs(jm), abs(jp), 1e-300)
            ym, y0, yp = (specfun.bessel_y(m, x) for m in (n - 1, n, n + 1))
            resid = abs(ym + yp - (2.0 * n / x) * y0)
            assert resid <= 1e-10 * max(abs(ym), abs(yp), 1e-300)


def test_asymptotic_magnitude():
    for n in range(0, 46):
        for x in X_GRID[X_GRID >= max(10.0 * n, 0.1)]:
            mag = abs(specfun.hankel2(n, x))
            envelope = np.sqrt(2.0 / (np.pi * x))
            assert 0.5 * envelope <= mag <= 1.5 * envelope


def test_hankel2_orders_stack_consistency():
    x = np.array([0.5, 3.0, 55.0, 420.0])
    stack = specfun.hankel2_orders(6, x)
    assert stack.shape == (13, 4)
    for i, n in enumerate(range(-6, 7)):
        for j, xv in enumerate(x):
            assert stack[i, j] == specfun.hankel2(n, xv)


def test_hankel2_orders_rejects_bad_arguments():
    with pytest.raises(DomainError):
        specfun.hankel2_orders(3, np.array([1.0, 1e-5]))
    with pytest.raises(DomainError):
        specfun.hankel2_orders(70, np.array([1.0]))
