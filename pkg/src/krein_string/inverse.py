"""String recovery from the boundary response via the connecting operator.

The connecting operator on controls has kernel

    c(t, s) = (1/(2 l_1)) [P(2T - s - t) - P(|t - s|)],   P(tau) = int_0^tau r,

which reproduces the Gram identity (C f, g) = (M u^f(T), u^g(T)) of the
control map; it has exact rank N-1 for an N-segment string.  The control
steering the system to the first special state solves (C f_1)(t) = r(T - t);
masses, stiffness entries, and segment lengths then follow from the
recursion

    m_k = 1/(C f_k, f_k),  b_k = m_k^2 ((C f_k)'', f_k),  a_k = -b_k - a_{k-1},
    C f_{k+1} = (m_k (C f_k)'' - a_{k-1} C f_{k-1} - b_k C f_k) / a_k,

with a_0 = 1/l_1 in the parameter line (the image recursion starts with no
predecessor term), and l_{k+1} = 1/a_k.  All solves share one truncated
eigendecomposition of the quadrature-weighted kernel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import hankel, toeplitz

from .errors import GridError, RankError, RecoveryError, RegularizationError
from .forward import TimeGrid, Waveform

A_DIVISION_GUARD = 1e-10


@dataclass(frozen=True)
class Regularization:
    """Truncation threshold (relative to sigma_max) and the largest relative
    residual a solve may leave before it is reported as failed."""

    threshold: float = 1e-8
    max_residual: float = 5e-2


@dataclass(frozen=True)
class DiscretizedConnector:
    """Connector kernel sampled on the control grid with trapezoid weights."""

    grid: TimeGrid
    kernel: np.ndarray
    quad_weights: np.ndarray

    def __post_init__(self):
        for name in ("kernel", "quad_weights"):
            arr = np.array(getattr(self, name), dtype=float)
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def apply(self, values: np.ndarray) -> np.ndarray:
        """Operator action (C f)(t_i) = sum_j kernel[i, j] w_j f_j."""
        return self.kernel @ (self.quad_weights * values)

    def weighted_inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(np.sum(self.quad_weights * u * v))


def _trapezoid_weights(n_steps: int, dt: float) -> np.ndarray:
    w = np.full(n_steps + 1, dt)
    w[0] = w[-1] = 0.5 * dt
    return w


def _cumulative_trapezoid(values: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty(len(values))
    out[0] = 0.0
    np.cumsum(0.5 * dt * (values[1:] + values[:-1]), out=out[1:])
    return out


def build_connector(r: Waveform, l1: float, grid: TimeGrid) -> DiscretizedConnector:
    """Assemble the kernel from a response sampled on [0, 2T].

    ``r`` must live on a grid spanning twice the control horizon whose step
    divides the control step; sampling r finer than the control grid drives
    the cumulative-trapezoid error below the rank-detection floor.
    """
    n = grid.n_steps
    if not np.isclose(r.grid.horizon, 2.0 * grid.horizon, rtol=1e-9, atol=0.0):
        raise GridError(
            f"response covers [0, {r.grid.horizon}], need [0, {2.0 * grid.horizon}] "
            "(the kernel integrates r up to 2T)"
        )
    if r.grid.n_steps % (2 * n) != 0:
        raise GridError(
            f"response step must divide the control step: {r.grid.n_steps} "
            f"samples cannot map onto {2 * n}"
        )
    q = r.grid.n_steps // (2 * n)
    cumulative = _cumulative_trapezoid(r.values, r.grid.dt)[::q]
    scale = 1.0 / (2.0 * l1)
    # c(t_i, t_j) indexes the antiderivative at |i-j| and 2n-i-j
    kernel = scale * (hankel(cumulative[2 * n :: -1][: n + 1], cumulative[n::-1]) - toeplitz(cumulative[: n + 1]))
    return DiscretizedConnector(
        grid=grid, kernel=kernel, quad_weights=_trapezoid_weights(n, grid.dt)
    )


class ConnectorFactorization:
    """Shared truncated eigendecomposition of the weighted kernel.

    The kernel is symmetric positive semi-definite in the trapezoid inner
    product, so its weighted symmetrization D K D (D = diag(sqrt(w))) is
    an ordinary symmetric eigenproblem; truncation keeps singular values
    above ``reg.threshold * sigma_max`` with the cut refined to the largest
    relative gap when values straddle the threshold.
    """

    def __init__(self, connector: DiscretizedConnector, reg: Regularization | None = None):
        self.connector = connector
        self.reg = reg or Regularization()
        sqrt_w = np.sqrt(connector.quad_weights)
        sym = sqrt_w[:, None] * connector.kernel * sqrt_w[None, :]
        sym = 0.5 * (sym + sym.T)
        vals, vecs = np.linalg.eigh(sym)
        order = np.argsort(np.abs(vals))[::-1]
        self.singular_values = np.abs(vals)[order]
        self._vals = vals[order]
        self._vecs = vecs[:, order]
        self._sqrt_w = sqrt_w
        self.rank = _rank_by_threshold(self.singular_values, self.reg.threshold)

    @property
    def condition_number(self) -> float:
        if self.rank == 0:
            return np.inf
        return float(self.singular_values[0] / self.singular_values[self.rank - 1])

    def solve(self, rhs_values: np.ndarray) -> tuple[np.ndarray, float]:
        """Minimum-norm truncated solution of (C f) = rhs; returns
        (solution values, relative weighted residual)."""
        if self.rank == 0:
            raise RankError("connector has numerical rank 0")
        weighted_rhs = self._sqrt_w * rhs_values
        basis = self._vecs[:, : self.rank]
        coeffs = (basis.T @ weighted_rhs) / self._vals[: self.rank]
        solution_w = basis @ coeffs
        # residual measured against the full (untruncated) operator
        applied = self._vecs @ (self._vals * (self._vecs.T @ solution_w))
        rhs_norm = float(np.linalg.norm(weighted_rhs))
        residual = float(np.linalg.norm(applied - weighted_rhs)) / max(rhs_norm, 1e-300)
        return solution_w / self._sqrt_w, residual


def _rank_by_threshold(singular_values: np.ndarray, threshold: float) -> int:
    if len(singular_values) == 0 or singular_values[0] == 0.0:
        return 0
    rel = singular_values / singular_values[0]
    count = int(np.sum(rel >= threshold))
    # tie-break: values within a decade of the threshold move the cut to the
    # largest relative gap inside that band
    band = (rel >= threshold / 10.0) & (rel <= threshold * 10.0)
    idx = np.nonzero(band)[0]
    if len(idx) == 0:
        return count
    lo = max(int(idx[0]) - 1, 0)
    hi = min(int(idx[-1]) + 1, len(rel) - 1)
    if hi == lo:
        return count
    ratios = rel[lo:hi] / np.maximum(rel[lo + 1 : hi + 1], 1e-300)
    return lo + int(np.argmax(ratios)) + 1


def numerical_rank(connector: DiscretizedConnector, threshold: float = 1e-8) -> int:
    """Singular values above threshold * sigma_max, gap-refined at the cut."""
    return ConnectorFactorization(connector, Regularization(threshold=threshold)).rank


def solve_krein(
    connector: DiscretizedConnector,
    rhs: Waveform,
    reg: Regularization | None = None,
) -> Waveform:
    """Truncated minimum-norm solution of (C f)(t) = rhs(t)."""
    if not connector.grid.compatible(rhs.grid):
        raise GridError("right-hand side must live on the connector grid")
    fact = ConnectorFactorization(connector, reg)
    values, residual = fact.solve(rhs.values)
    limit = fact.reg.max_residual
    if residual > limit:
        raise RegularizationError(
            f"truncated solve leaves relative residual {residual:.3e} > {limit:.1e}"
        )
    return Waveform(grid=connector.grid, values=values)


def second_derivative(w: Waveform) -> Waveform:
    """Second differences, one-sided second-order stencils at the ends."""
    if w.grid.n_steps + 1 < 5:
        raise GridError("second derivative needs at least 5 grid nodes")
    return Waveform(grid=w.grid, values=_second_diff(w.values, w.grid.dt))


def _second_diff(values: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(values)
    out[1:-1] = values[2:] - 2.0 * values[1:-1] + values[:-2]
    out[0] = 2.0 * values[0] - 5.0 * values[1] + 4.0 * values[2] - values[3]
    out[-1] = 2.0 * values[-1] - 5.0 * values[-2] + 4.0 * values[-3] - values[-4]
    return out / dt**2


@dataclass(frozen=True)
class RecoveryDiagnostics:
    singular_values: np.ndarray
    rank: int
    residuals: np.ndarray
    condition_numbers: np.ndarray
    l1_input: float
    l1_estimate: float


@dataclass(frozen=True)
class RecoveryResult:
    """Recovered string parameters plus the special-state controls."""

    recovered_masses: np.ndarray
    recovered_b: np.ndarray
    recovered_a: np.ndarray
    recovered_lengths: np.ndarray
    controls: tuple[Waveform, ...]
    diagnostics: RecoveryDiagnostics

    @property
    def n_segments(self) -> int:
        return len(self.recovered_lengths)


def recover_string(
    r: Waveform,
    l1: float,
    grid: TimeGrid,
    reg: Regularization | None = None,
) -> RecoveryResult:
    """Full reconstruction from the response on [0, 2T].

    The mass count is read off the connector's numerical rank; the loop
    then alternates Krein solves with the parameter recursion.  The first
    segment length is taken as input (the kernel scale depends on it); the
    endpoint-derivative estimate -||f_1||^2 / f_1'(T) is reported in the
    diagnostics as a cross-check.
    """
    connector = build_connector(r, l1, grid)
    fact = ConnectorFactorization(connector, reg)
    reg = fact.reg
    n_detected = fact.rank
    if n_detected == 0:
        raise RankError("connector has numerical rank 0: response carries no string")

    n = grid.n_steps
    q = r.grid.n_steps // (2 * n)
    rhs = r.values[(n - np.arange(n + 1)) * q]  # r(T - t) on the control grid

    masses: list[float] = []
    b_entries: list[float] = []
    a_entries: list[float] = []
    controls: list[Waveform] = []
    residuals: list[float] = []

    f_values, residual = fact.solve(rhs)
    _check_residual(residual, reg, step=1)
    image = connector.apply(f_values)
    image_prev = np.zeros_like(image)
    a_param = 1.0 / l1  # physical a_0; the image recursion instead starts bare
    a_sys = 0.0

    for k in range(1, n_detected + 1):
        controls.append(Waveform(grid=grid, values=f_values))
        residuals.append(residual)
        gram = connector.weighted_inner(image, f_values)
        if gram <= 0.0:
            raise RecoveryError(
                f"step {k}: (C f_k, f_k) = {gram:.3e} would give a negative mass",
                step=k,
            )
        m_k = 1.0 / gram
        curvature = _second_diff(image, grid.dt)
        b_k = m_k**2 * connector.weighted_inner(curvature, f_values)
        a_k = -b_k - a_param
        if abs(a_k) < A_DIVISION_GUARD:
            raise RecoveryError(
                f"step {k}: recovered a_{k} = {a_k:.3e} below division guard", step=k
            )
        masses.append(m_k)
        b_entries.append(b_k)
        a_entries.append(a_k)
        if k < n_detected:
            next_rhs = (m_k * curvature - a_sys * image_prev - b_k * image) / a_k
            f_values, residual = fact.solve(next_rhs)
            _check_residual(residual, reg, step=k + 1)
            image_prev = image
            image = connector.apply(f_values)
            a_sys = a_k
        a_param = a_k

    lengths = np.concatenate(([l1], 1.0 / np.array(a_entries)))
    f1 = controls[0].values
    deriv_end = (3.0 * f1[-1] - 4.0 * f1[-2] + f1[-3]) / (2.0 * grid.dt)
    norm_sq = connector.weighted_inner(f1, f1)
    l1_estimate = -norm_sq / deriv_end if deriv_end != 0.0 else np.nan

    diagnostics = RecoveryDiagnostics(
        singular_values=fact.singular_values,
        rank=n_detected,
        residuals=np.array(residuals),
        condition_numbers=np.full(n_detected, fact.condition_number),
        l1_input=l1,
        l1_estimate=float(l1_estimate),
    )
    return RecoveryResult(
        recovered_masses=np.array(masses),
        recovered_b=np.array(b_entries),
        recovered_a=np.array(a_entries),
        recovered_lengths=lengths,
        controls=tuple(controls),
        diagnostics=diagnostics,
    )


def _check_residual(residual: float, reg: Regularization, step: int) -> None:
    if residual > reg.max_residual:
        raise RecoveryError(
            f"step {step}: Krein solve residual {residual:.3e} exceeds "
            f"{reg.max_residual:.1e}",
            step=step,
        )
