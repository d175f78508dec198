"""Forward dynamics: spectral solver, time-stepping oracle, response operator.

Two independent routes to the trajectory u^f(t):

* ``solve_forward_spectral`` sums modal Duhamel integrals
  u^f(t) = (1/l_1) sum_k [int_0^t sin(nu_k (t-tau))/nu_k f(tau) dtau]
  phi^k / omega_k with nu_k = sqrt(|lambda_k|), trapezoid quadrature.
* ``solve_forward_ode`` integrates M u_tt = -A u + (f/l_1, 0, ..) with a
  classical 4th-order Runge-Kutta scheme on the first-order reformulation.

The boundary response r(t) = (1/l_1) sum_k sin(nu_k t)/(nu_k omega_k)
satisfies (R f)(t) = int_0^t r(t-s) f(s) ds = u_1^f(t); the same discrete
convolution backs both identities, so they agree to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.linalg import eigvalsh_tridiagonal
from scipy.signal import fftconvolve

from .errors import GridError, StabilityError
from .model import StringSpec, SystemMatrices, positions
from .spectral import SpectralData

# Undersampled modal sines silently corrupt the quadrature; hard guard.
NYQUIST_LIMIT = 0.5
# Imaginary-axis stability bound of classical RK4.
RK4_LIMIT = 2.8

_FFT_THRESHOLD = 512


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid t_j = j T / n_steps on [0, T]."""

    horizon: float
    n_steps: int

    def __post_init__(self):
        if not (self.horizon > 0.0):
            raise GridError("horizon must be positive")
        if self.n_steps < 1:
            raise GridError("n_steps must be at least 1")

    @property
    def dt(self) -> float:
        return self.horizon / self.n_steps

    @property
    def times(self) -> np.ndarray:
        return np.linspace(0.0, self.horizon, self.n_steps + 1)

    def compatible(self, other: "TimeGrid") -> bool:
        return self.n_steps == other.n_steps and np.isclose(
            self.horizon, other.horizon, rtol=1e-12, atol=0.0
        )


@dataclass(frozen=True)
class Waveform:
    """Real samples, one per grid node."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.grid.n_steps + 1,):
            raise GridError(
                f"waveform needs {self.grid.n_steps + 1} samples, got {values.shape}"
            )
        values.flags.writeable = False
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class Trajectory:
    """Sampled state history; ``states[j]`` is u(t_j) in the inner space."""

    grid: TimeGrid
    states: np.ndarray
    velocities: np.ndarray | None = None

    def __post_init__(self):
        states = np.array(self.states, dtype=float)
        if states.ndim != 2 or states.shape[0] != self.grid.n_steps + 1:
            raise GridError("states must be (n_steps+1, n_masses)")
        states.flags.writeable = False
        object.__setattr__(self, "states", states)
        if self.velocities is not None:
            vel = np.array(self.velocities, dtype=float)
            vel.flags.writeable = False
            object.__setattr__(self, "velocities", vel)


def causal_convolution(kernel: np.ndarray, values: np.ndarray, dt: float) -> np.ndarray:
    """Trapezoid discretization of int_0^t kernel(t - s) values(s) ds."""
    kernel = np.asarray(kernel, dtype=float)
    values = np.asarray(values, dtype=float)
    n = len(kernel)
    if n > _FFT_THRESHOLD:
        full = fftconvolve(kernel, values)[:n]
    else:
        full = np.convolve(kernel, values)[:n]
    return dt * (full - 0.5 * kernel * values[0] - 0.5 * kernel[0] * values)


def check_nyquist(data: SpectralData, grid: TimeGrid) -> None:
    nu_max = float(np.max(data.frequencies))
    if nu_max * grid.dt >= NYQUIST_LIMIT:
        raise StabilityError(
            f"grid too coarse: sqrt(|lambda_max|)*dt = {nu_max * grid.dt:.3f} "
            f">= {NYQUIST_LIMIT} (need n_steps > {int(nu_max * grid.horizon / NYQUIST_LIMIT) + 1})"
        )


def solve_forward_spectral(
    mats: SystemMatrices,
    data: SpectralData,
    f: Waveform,
    l1: float,
) -> Trajectory:
    """Trajectory by modal expansion; f enters through Duhamel convolutions."""
    grid = f.grid
    check_nyquist(data, grid)
    t = grid.times
    states = np.zeros((grid.n_steps + 1, mats.order))
    # fixed k-ascending reduction keeps the output bit-reproducible
    for k in range(data.n_modes):
        nu = data.frequencies[k]
        modal = causal_convolution(np.sin(nu * t) / nu, f.values, grid.dt)
        states += np.outer(modal, data.vectors[k] / data.weights[k])
    states /= l1
    states[0, :] = 0.0
    return Trajectory(grid=grid, states=states)


def solve_forward_delta(data: SpectralData, l1: float, grid: TimeGrid) -> Trajectory:
    """Trajectory for the unit impulse control f = delta.

    The inner Duhamel integral collapses to sin(nu_k t)/nu_k exactly, so no
    mollifier enters.
    """
    check_nyquist(data, grid)
    t = grid.times
    states = np.zeros((grid.n_steps + 1, data.vectors.shape[1]))
    for k in range(data.n_modes):
        nu = data.frequencies[k]
        states += np.outer(np.sin(nu * t) / nu, data.vectors[k] / data.weights[k])
    states /= l1
    return Trajectory(grid=grid, states=states)


def mollified_delta(grid: TimeGrid, width: float, center: float | None = None) -> Waveform:
    """Unit-mass Gaussian approximation of delta(t), centered at 5*width by
    default so the pulse is causal on the grid."""
    if center is None:
        center = 5.0 * width
    t = grid.times
    vals = np.exp(-0.5 * ((t - center) / width) ** 2) / (width * np.sqrt(2.0 * np.pi))
    return Waveform(grid=grid, values=vals)


def _max_frequency(mats: SystemMatrices) -> float:
    m = mats.masses
    sqrt_m = np.sqrt(m)
    d = mats.diag / m
    e = mats.off_diag / (sqrt_m[:-1] * sqrt_m[1:]) if mats.order > 1 else np.empty(0)
    lam = eigvalsh_tridiagonal(d, e)
    return float(np.sqrt(-lam[0]))


def solve_forward_ode(mats: SystemMatrices, f: Waveform, l1: float) -> Trajectory:
    """Independent oracle: classical RK4 on (u, u_t).

    The stiffness matrix is negative definite, so the stable oscillatory
    dynamics is M u_tt = A u + (f/l_1) e_1; its modal form is exactly the
    spectral representation the other solver sums.  Control samples are
    interpolated with a cubic spline for the half-step stage values,
    keeping the interpolation error below the scheme's own.
    """
    grid = f.grid
    dt = grid.dt
    nu_max = _max_frequency(mats)
    if nu_max * dt >= RK4_LIMIT:
        raise StabilityError(
            f"RK4 unstable: sqrt(|lambda_max|)*dt = {nu_max * dt:.3f} >= {RK4_LIMIT}"
        )
    d = mats.order
    a_mat = mats.stiffness
    inv_m = 1.0 / mats.masses

    # block operator y' = L y + g(t), y = (u, v)
    op = np.zeros((2 * d, 2 * d))
    op[:d, d:] = np.eye(d)
    op[d:, :d] = inv_m[:, None] * a_mat

    t = grid.times
    spline = CubicSpline(t, f.values)
    f_half = spline(t[:-1] + 0.5 * dt)
    scale = 1.0 / (l1 * mats.masses[0])

    def forcing(fval: float) -> np.ndarray:
        g = np.zeros(2 * d)
        g[d] = fval * scale
        return g

    states = np.zeros((grid.n_steps + 1, d))
    vels = np.zeros((grid.n_steps + 1, d))
    y = np.zeros(2 * d)
    for j in range(grid.n_steps):
        g0 = forcing(f.values[j])
        gh = forcing(f_half[j])
        g1 = forcing(f.values[j + 1])
        k1 = op @ y + g0
        k2 = op @ (y + 0.5 * dt * k1) + gh
        k3 = op @ (y + 0.5 * dt * k2) + gh
        k4 = op @ (y + dt * k3) + g1
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        states[j + 1] = y[:d]
        vels[j + 1] = y[d:]
    return Trajectory(grid=grid, states=states, velocities=vels)


def response_function(data: SpectralData, l1: float, grid: TimeGrid) -> Waveform:
    """r(t) = (1/l_1) sum_k sin(nu_k t) / (nu_k omega_k) on the grid."""
    t = grid.times
    nu = data.frequencies
    vals = np.sin(np.outer(t, nu)) / (nu * data.weights)
    return Waveform(grid=grid, values=vals.sum(axis=1) / l1)


def apply_response_operator(r: Waveform, f: Waveform) -> Waveform:
    """(R f)(t) = int_0^t r(t-s) f(s) ds by trapezoid convolution."""
    if not r.grid.compatible(f.grid):
        raise GridError("response and control must share one grid")
    out = causal_convolution(r.values, f.values, r.grid.dt)
    return Waveform(grid=r.grid, values=out)


def continuous_solution(
    spec: StringSpec,
    traj: Trajectory,
    f: Waveform,
    x: float,
    t_index: int,
) -> float:
    """Piecewise-affine interpolant in x: f(t) at x=0, u_i(t) at masses, 0 at x=l."""
    xs = positions(spec)
    if x < 0.0 or x > xs[-1]:
        raise ValueError(f"x={x} outside [0, {xs[-1]}]")
    nodes = np.concatenate(([f.values[t_index]], traj.states[t_index], [0.0]))
    seg = int(np.searchsorted(xs, x, side="right")) - 1
    if seg >= len(xs) - 1:
        return float(nodes[-1])
    frac = (x - xs[seg]) / (xs[seg + 1] - xs[seg])
    return float((1.0 - frac) * nodes[seg] + frac * nodes[seg + 1])


def check_integral_equation(spec: StringSpec, traj: Trajectory, f: Waveform) -> float:
    """Max residual of the equivalent integral equation at the mass points.

    For atomic mass the left side is the finite sum
    sum_{x_j < x_i} x_j (x_i - x_j) m_j u_j(t); the right side pairs time
    integrals of (t - s) against f + u_i and against the exact spatial
    integral of the affine interpolant.  Both converge at O(dt^2).
    """
    if not traj.grid.compatible(f.grid):
        raise GridError("trajectory and control must share one grid")
    grid = traj.grid
    t = grid.times
    xs = positions(spec)
    u = traj.states
    n_mass = spec.n_masses

    # per-segment exact integrals of the affine interpolant, per time
    nodes = np.column_stack([f.values, u, np.zeros(grid.n_steps + 1)])
    seg_int = 0.5 * spec.lengths * (nodes[:, :-1] + nodes[:, 1:])

    worst = 0.0
    for i in range(1, n_mass + 1):
        if i > 1:
            coef = xs[1:i] * (xs[i] - xs[1:i]) * spec.masses[: i - 1]
            lhs = u[:, : i - 1] @ coef
        else:
            lhs = np.zeros(grid.n_steps + 1)
        spatial = np.sum(seg_int[:, :i], axis=1)
        rhs = xs[i] * causal_convolution(t, f.values + u[:, i - 1], grid.dt)
        rhs -= 2.0 * causal_convolution(t, spatial, grid.dt)
        worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst
