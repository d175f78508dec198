import numpy as np
import pytest
import scipy.special

from krein_string.bessel import bessel_j, bessel_j_grid, bessel_j_ladder


def test_values_at_zero():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert bessel_j(7, 0.0) == 0.0


def test_small_argument_leading_order():
    # J_2(s) ~ s^2 / 8
    for s in (1e-4, 1e-3, 1e-2):
        assert bessel_j(2, s) == pytest.approx(s * s / 8.0, rel=1e-3)


def test_against_library_oracle():
    # accuracy claim: <= 1e-12 absolute for n <= 200, x <= 1e4
    rng = np.random.default_rng(99)
    worst = 0.0
    for _ in range(250):
        n = int(rng.integers(0, 201))
        x = float(10 ** rng.uniform(-2, 4))
        worst = max(worst, abs(bessel_j(n, x) - scipy.special.jv(n, x)))
    assert worst < 1e-12


def test_three_term_recurrence_identity():
    # J_{n-1}(x) + J_{n+1}(x) = (2n/x) J_n(x) on a log-spaced sample
    worst = 0.0
    for n in (1, 2, 5, 12, 30, 60):
        for x in np.geomspace(0.05, 500.0, 40):
            lhs = bessel_j(n - 1, x) + bessel_j(n + 1, x)
            rhs = 2.0 * n / x * bessel_j(n, x)
            worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-10


def test_generating_series_for_sine():
    # sin(z sin theta) = 2 sum_k J_{2k+1}(z) sin((2k+1) theta)
    for z in (0.7, 3.0, 11.5, 40.0):
        ladder = bessel_j_ladder(int(z) + 60, z)
        for theta in (0.3, 1.0, 1.4):
            k = np.arange(0, (len(ladder) - 1) // 2)
            series = 2.0 * np.sum(ladder[2 * k + 1] * np.sin((2 * k + 1) * theta))
            assert series == pytest.approx(np.sin(z * np.sin(theta)), abs=1e-12)


def test_ladder_matches_scalar():
    ladder = bessel_j_ladder(40, 17.3)
    for n in (0, 3, 17, 40):
        assert ladder[n] == pytest.approx(bessel_j(n, 17.3), abs=1e-14)


def test_ladder_against_oracle():
    for x in (0.5, 8.0, 33.0, 260.0):
        ladder = bessel_j_ladder(128, x)
        ref = scipy.special.jv(np.arange(129), x)
        assert np.max(np.abs(ladder - ref)) < 1e-12


def test_grid_against_oracle():
    xs = np.concatenate(
        [
            np.linspace(0.0, 8.0, 101),
            np.geomspace(8.0, 36000.0, 400),
        ]
    )
    for n in (0, 2, 5):
        got = bessel_j_grid(n, xs)
        ref = scipy.special.jv(n, xs)
        assert np.max(np.abs(got - ref)) < 1e-12


def test_grid_matches_scalar():
    xs = np.array([0.0, 0.3, 7.9, 8.1, 120.0, 2500.0])
    got = bessel_j_grid(2, xs)
    for x, val in zip(xs, got):
        assert val == pytest.approx(bessel_j(2, float(x)), abs=1e-13)


def test_rejects_bad_arguments():
    with pytest.raises(ValueError):
        bessel_j(-1, 1.0)
    with pytest.raises(ValueError):
        bessel_j(2, -1.0)
    with pytest.raises(ValueError):
        bessel_j_grid(2, np.array([1.0, -2.0]))
