import numpy as np
import pytest

from krein_string import (
    GridError,
    StabilityError,
    StringSpec,
    TimeGrid,
    Waveform,
    apply_response_operator,
    build_matrices,
    check_integral_equation,
    compute_spectral_data,
    continuous_solution,
    mollified_delta,
    response_function,
    solve_forward_delta,
    solve_forward_ode,
    solve_forward_spectral,
    uniform_spec,
)
from krein_string.bessel import bessel_j_grid
from krein_string.forward import causal_convolution

from conftest import random_spec

SINGLE_SPEC = StringSpec([0.5, 0.5], [1.0])
SINGLE = build_matrices(SINGLE_SPEC)
SINGLE_DATA = compute_spectral_data(SINGLE)


def smooth_control(grid: TimeGrid) -> Waveform:
    t = grid.times
    return Waveform(grid, np.sin(3.0 * t) * np.exp(-t))


def test_grid_validation():
    with pytest.raises(GridError):
        TimeGrid(-1.0, 10)
    with pytest.raises(GridError):
        TimeGrid(1.0, 0)
    grid = TimeGrid(2.0, 4)
    assert grid.dt == 0.5
    assert np.allclose(grid.times, [0.0, 0.5, 1.0, 1.5, 2.0])
    with pytest.raises(GridError):
        Waveform(grid, np.zeros(3))


def test_response_single_mass_is_sine():
    grid = TimeGrid(2.0, 500)
    r = response_function(SINGLE_DATA, 0.5, grid)
    assert np.allclose(r.values, np.sin(2.0 * grid.times), atol=1e-14)
    assert r.values[0] == 0.0


def test_response_uniform_matches_bessel_before_reflection():
    # r_N(t) = (2/t) J_2(2Nt) is exact until the wave returns from x = 1
    n = 8
    data = compute_spectral_data(build_matrices(uniform_spec(n)))
    grid = TimeGrid(0.5, 400)
    r = response_function(data, 1.0 / n, grid)
    t = grid.times[1:]
    closed = 2.0 / t * bessel_j_grid(2, 2.0 * n * t)
    assert np.max(np.abs(r.values[1:] - closed)) < 1e-9


def test_response_derivative_at_zero(rng):
    # r'(0) = 1 / (m_1 l_1), by one-sided finite differences
    for _ in range(6):
        spec = random_spec(rng, int(rng.integers(2, 9)))
        data = compute_spectral_data(build_matrices(spec))
        h = 1e-6 / float(data.frequencies.max())
        grid = TimeGrid(4.0 * h, 4)
        r = response_function(data, float(spec.lengths[0]), grid)
        v = r.values
        deriv = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
        assert deriv == pytest.approx(1.0 / (spec.masses[0] * spec.lengths[0]), rel=1e-6)


def test_apply_response_operator_closed_form():
    # r = sin 2t against f = 1: int_0^t sin(2(t-s)) ds = (1 - cos 2t)/2
    grid = TimeGrid(1.0, 2000)
    r = Waveform(grid, np.sin(2.0 * grid.times))
    f = Waveform(grid, np.ones_like(grid.times))
    out = apply_response_operator(r, f)
    assert np.max(np.abs(out.values - 0.5 * (1.0 - np.cos(2.0 * grid.times)))) < 1e-7
    zero = apply_response_operator(r, Waveform(grid, np.zeros_like(grid.times)))
    assert np.all(zero.values == 0.0)


def test_apply_response_operator_grid_mismatch():
    r = Waveform(TimeGrid(1.0, 10), np.zeros(11))
    f = Waveform(TimeGrid(1.0, 20), np.zeros(21))
    with pytest.raises(GridError):
        apply_response_operator(r, f)


def test_response_operator_matches_first_component(rng):
    spec = random_spec(rng, 5)
    mats = build_matrices(spec)
    data = compute_spectral_data(mats)
    grid = TimeGrid(1.0, max(1000, int(80 * data.frequencies.max())))
    f = smooth_control(grid)
    l1 = float(spec.lengths[0])
    traj = solve_forward_spectral(mats, data, f, l1)
    r = response_function(data, l1, grid)
    out = apply_response_operator(r, f)
    # same quadrature on both sides: agreement is at rounding level
    assert np.max(np.abs(out.values - traj.states[:, 0])) < 1e-12


def test_causality():
    grid = TimeGrid(1.0, 200)
    r = Waveform(grid, np.sin(2.0 * grid.times))
    base = np.sin(grid.times)
    tampered = base.copy()
    cut = 120
    tampered[cut + 1 :] += 5.0
    out_a = apply_response_operator(r, Waveform(grid, base)).values
    out_b = apply_response_operator(r, Waveform(grid, tampered)).values
    assert np.array_equal(out_a[: cut + 1], out_b[: cut + 1])


def test_linearity(rng):
    grid = TimeGrid(1.0, 300)
    r = Waveform(grid, np.sin(2.0 * grid.times))
    f = rng.standard_normal(301)
    g = rng.standard_normal(301)
    lhs = apply_response_operator(r, Waveform(grid, 0.3 * f - 1.7 * g)).values
    rhs = 0.3 * apply_response_operator(r, Waveform(grid, f)).values
    rhs -= 1.7 * apply_response_operator(r, Waveform(grid, g)).values
    assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_zero_control_zero_trajectory():
    grid = TimeGrid(1.0, 100)
    zero = Waveform(grid, np.zeros(101))
    traj = solve_forward_spectral(SINGLE, SINGLE_DATA, zero, 0.5)
    assert np.all(traj.states == 0.0)
    traj = solve_forward_ode(SINGLE, zero, 0.5)
    assert np.all(traj.states == 0.0)


def test_nyquist_guard():
    grid = TimeGrid(1.0, 3)
    f = Waveform(grid, np.zeros(4))
    with pytest.raises(StabilityError, match="grid too coarse"):
        solve_forward_spectral(SINGLE, SINGLE_DATA, f, 0.5)


def test_rk4_stability_guard():
    grid = TimeGrid(10.0, 5)
    f = Waveform(grid, np.zeros(6))
    with pytest.raises(StabilityError, match="RK4 unstable"):
        solve_forward_ode(SINGLE, f, 0.5)


def test_ode_heaviside_closed_form():
    # single mass, f = 1: u'' = -4u + 2 from rest, so u = (1 - cos 2t)/2
    grid = TimeGrid(1.0, 2000)
    f = Waveform(grid, np.ones_like(grid.times))
    traj = solve_forward_ode(SINGLE, f, 0.5)
    assert np.max(np.abs(traj.states[:, 0] - 0.5 * (1.0 - np.cos(2.0 * grid.times)))) < 1e-10


def test_mollified_delta_converges_to_impulse_response():
    # u_1 under a narrowing mollifier approaches sin(2t), time-shifted by the
    # pulse center; compare after the pulse has fully entered
    errors = []
    for width in (0.02, 0.01, 0.005):
        grid = TimeGrid(1.0, 20000)
        f = mollified_delta(grid, width)
        traj = solve_forward_spectral(SINGLE, SINGLE_DATA, f, 0.5)
        start = int(round(10.0 * width / grid.dt))
        t = grid.times[start:]
        errors.append(np.max(np.abs(traj.states[start:, 0] - np.sin(2.0 * (t - 5.0 * width)))))
    assert errors[2] < errors[1] < errors[0]
    assert errors[2] < 2e-4


def test_oracle_equivalence(rng):
    for _ in range(3):
        spec = random_spec(rng, int(rng.integers(2, 9)))
        mats = build_matrices(spec)
        data = compute_spectral_data(mats)
        grid = TimeGrid(1.0, max(1500, int(80 * data.frequencies.max())))
        f = smooth_control(grid)
        l1 = float(spec.lengths[0])
        spectral = solve_forward_spectral(mats, data, f, l1)
        stepped = solve_forward_ode(mats, f, l1)
        assert np.max(np.abs(spectral.states - stepped.states)) < 1e-6


def test_delta_trajectory_matches_response():
    data = compute_spectral_data(build_matrices(uniform_spec(5)))
    grid = TimeGrid(1.0, 200)
    traj = solve_forward_delta(data, 0.2, grid)
    r = response_function(data, 0.2, grid)
    assert np.allclose(traj.states[:, 0], r.values, atol=1e-13)


def test_continuous_solution_interpolation():
    spec = StringSpec([0.2, 0.3, 0.5], [1.0, 2.0])
    mats = build_matrices(spec)
    data = compute_spectral_data(mats)
    grid = TimeGrid(1.0, 500)
    f = smooth_control(grid)
    traj = solve_forward_spectral(mats, data, f, 0.2)
    j = 250
    assert continuous_solution(spec, traj, f, 0.0, j) == f.values[j]
    assert continuous_solution(spec, traj, f, 1.0, j) == 0.0
    mid = continuous_solution(spec, traj, f, 0.35, j)  # halfway between x_1 and x_2
    assert mid == pytest.approx(0.5 * (traj.states[j, 0] + traj.states[j, 1]), rel=1e-12)
    with pytest.raises(ValueError):
        continuous_solution(spec, traj, f, 1.5, j)


def test_integral_equation_zero_control():
    grid = TimeGrid(1.0, 50)
    spec = StringSpec([0.2, 0.3, 0.5], [1.0, 2.0])
    f = Waveform(grid, np.zeros(51))
    from krein_string import Trajectory

    traj = Trajectory(grid, np.zeros((51, 2)))
    assert check_integral_equation(spec, traj, f) == 0.0


def test_integral_equation_residual_second_order(rng):
    spec = random_spec(rng, 4)
    mats = build_matrices(spec)
    data = compute_spectral_data(mats)
    residuals = {}
    for n in (1500, 3000):
        grid = TimeGrid(1.0, max(n, int(80 * data.frequencies.max())))
        f = smooth_control(grid)
        traj = solve_forward_spectral(mats, data, f, float(spec.lengths[0]))
        residuals[n] = check_integral_equation(spec, traj, f)
    assert residuals[1500] < 1e-6
    assert residuals[1500] / residuals[3000] > 3.5


def test_causal_convolution_against_dense_quadrature(rng):
    # trapezoid convolution equals the O(n^2) reference sum
    n = 120
    dt = 0.01
    kernel = rng.standard_normal(n + 1)
    values = rng.standard_normal(n + 1)
    fast = causal_convolution(kernel, values, dt)
    slow = np.zeros(n + 1)
    for j in range(1, n + 1):
        w = np.full(j + 1, dt)
        w[0] = w[-1] = 0.5 * dt
        slow[j] = np.sum(w * kernel[j::-1] * values[: j + 1])
    assert np.max(np.abs(fast - slow)) < 1e-12
