"""Uniform point-mass approximation of the unit-density string on (0, 1).

With n segments of length 1/n and n-1 masses of 1/n, eigenpairs are
available in closed form through Chebyshev polynomials of the second kind,
and the impulse-driven solution components are Bessel expressions

    u_j(t) = (2j/t) J_{2j}(2nt) = n (J_{2j-1}(2nt) + J_{2j+1}(2nt)).

The pairing routines here drive the convergence experiments: the response
(2/t) J_2(2nt) integrates to one and concentrates at t = 0 as n grows, the
corrected response n (u_1 - delta) pairs like a derivative at zero, and the
interpolated impulse solution paired with sine modes approaches sin(kt),
exposing the emergent unit wave speed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .bessel import bessel_j, bessel_j_grid, bessel_j_ladder
from .errors import TruncationError
from .model import StringSpec
from .spectral import SpectralData

# |J_2(s)| <= _J2_ENVELOPE / sqrt(s) for s >= 1/2; used in truncation bounds.
_J2_ENVELOPE = 0.9


@dataclass(frozen=True)
class UniformCase:
    """n equal segments and n-1 equal masses on (0, 1); requires n >= 2."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("uniform case needs n >= 2")

    @property
    def spec(self) -> StringSpec:
        return uniform_spec(self.n)


def uniform_spec(n: int) -> StringSpec:
    """StringSpec with lengths 1/n (n entries) and masses 1/n (n-1 entries)."""
    if n < 2:
        raise ValueError("uniform case needs n >= 2")
    return StringSpec(lengths=np.full(n, 1.0 / n), masses=np.full(n - 1, 1.0 / n))


def chebyshev_u(m: int, x):
    """Chebyshev polynomial of the second kind by the three-term recurrence."""
    if m < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    prev = np.ones_like(x)
    if m == 0:
        return prev if prev.ndim else float(prev)
    cur = 2.0 * x
    for _ in range(m - 1):
        prev, cur = cur, 2.0 * x * cur - prev
    return cur if cur.ndim else float(cur)


def uniform_eigen(n: int) -> SpectralData:
    """Closed-form spectral data of the uniform string.

    lambda_k = -4 n^2 cos^2(k pi / 2n) ascending in k, eigenvectors
    phi^k_j = U_{j-1}(-cos(k pi / n)) (first component one), weights from
    the definition (M phi, phi).
    """
    if n < 2:
        raise ValueError("uniform case needs n >= 2")
    k = np.arange(1, n)
    lam = -4.0 * n**2 * np.cos(k * np.pi / (2 * n)) ** 2
    x_k = np.cos(k * np.pi / n)
    vectors = np.empty((n - 1, n - 1))
    for j in range(n - 1):
        vectors[:, j] = chebyshev_u(j, -x_k)
    weights = np.sum(vectors**2, axis=1) / n
    return SpectralData(eigenvalues=lam, vectors=vectors, weights=weights)


def delta_solution(n: int, j: int, t: float) -> float:
    """Impulse-response component u_j(t) = (2j/t) J_{2j}(2nt)."""
    if not 1 <= j <= n - 1:
        raise ValueError(f"component index {j} outside 1..{n - 1}")
    if t <= 0.0:
        raise ValueError("t must be positive")
    return 2.0 * j / t * bessel_j(2 * j, 2.0 * n * t)


def response_uniform(n: int, t: float) -> float:
    """Response function r_n(t) = (2/t) J_2(2nt)."""
    if t <= 0.0:
        raise ValueError("t must be positive")
    return 2.0 / t * bessel_j(2, 2.0 * n * t)


# ---------------------------------------------------------------------------
# Test functions for distributional pairings.


@dataclass(frozen=True)
class TestFunction:
    """Smooth test function with optional analytic derivative and a bound on
    sup_{tau >= t} |xi(tau)| used by truncation estimates."""

    fn: Callable[[np.ndarray], np.ndarray]
    descriptor: str
    derivative: Callable[[np.ndarray], np.ndarray] | None = None
    tail_sup: Callable[[float], float] | None = None

    def __call__(self, t):
        return self.fn(np.asarray(t, dtype=float))

    def sup_beyond(self, t: float) -> float:
        if self.tail_sup is None:
            return 1.0
        return float(self.tail_sup(t))


def gaussian_bump(center: float, width: float) -> TestFunction:
    c, w = float(center), float(width)

    def fn(t):
        return np.exp(-0.5 * ((t - c) / w) ** 2)

    def deriv(t):
        return -((t - c) / w**2) * fn(t)

    def tail(t):
        return 1.0 if t <= c else float(np.exp(-0.5 * ((t - c) / w) ** 2))

    return TestFunction(fn, f"gauss:{c!r},{w!r}", deriv, tail)


def raised_cosine(center: float, halfwidth: float) -> TestFunction:
    c, w = float(center), float(halfwidth)

    def fn(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t - c) < w
        out = np.zeros_like(t)
        out[inside] = 0.5 * (1.0 + np.cos(np.pi * (t[inside] - c) / w))
        return out

    def deriv(t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t - c) < w
        out = np.zeros_like(t)
        out[inside] = -0.5 * np.pi / w * np.sin(np.pi * (t[inside] - c) / w)
        return out

    def tail(t):
        return 1.0 if t < c + w else 0.0

    return TestFunction(fn, f"rcos:{c!r},{w!r}", deriv, tail)


def sine_mode(k: float) -> TestFunction:
    k = float(k)
    return TestFunction(
        lambda t: np.sin(k * np.asarray(t, dtype=float)),
        f"sine:{k!r}",
        lambda t: k * np.cos(k * np.asarray(t, dtype=float)),
        lambda t: 1.0,
    )


def constant_one() -> TestFunction:
    return TestFunction(
        lambda t: np.ones_like(np.asarray(t, dtype=float)),
        "one",
        lambda t: np.zeros_like(np.asarray(t, dtype=float)),
        lambda t: 1.0,
    )


def parse_test_function(descriptor: str) -> TestFunction:
    """Build a test function from a CLI descriptor like ``gauss:0.0,0.3``."""
    name, _, args = descriptor.partition(":")
    try:
        if name == "gauss":
            c, w = (float(v) for v in args.split(","))
            return gaussian_bump(c, w)
        if name == "rcos":
            c, w = (float(v) for v in args.split(","))
            return raised_cosine(c, w)
        if name == "sine":
            return sine_mode(float(args))
        if name == "one":
            return constant_one()
    except ValueError as exc:
        raise ValueError(f"bad test-function arguments in {descriptor!r}") from exc
    raise ValueError(f"unknown test function {name!r}")


# ---------------------------------------------------------------------------
# Distributional pairings.


@dataclass(frozen=True)
class QuadratureControls:
    """Truncated-trapezoid settings for the improper pairings."""

    tol: float = 1e-4
    ds: float = 0.05
    s_cap: float = 5e5
    max_refinements: int = 2
    refine_tol: float = 1e-8


@dataclass(frozen=True)
class PairingResult:
    value: float
    truncation_bound: float
    s_max: float

    def __float__(self):
        return self.value


def _truncation_bound(n: int, xi: TestFunction, s_max: float) -> float:
    # tail of int (2/s)|J_2(s)| |xi(s/2n)| ds, with |J_2| <= 0.9/sqrt(s)
    return 4.0 * _J2_ENVELOPE * xi.sup_beyond(s_max / (2.0 * n)) / math.sqrt(s_max)


def _pair_on_window(n: int, xi: TestFunction, s_max: float, ds: float) -> float:
    m = max(int(math.ceil(s_max / ds)), 8)
    s = np.linspace(0.0, s_max, m + 1)
    g = np.zeros_like(s)
    g[1:] = (2.0 / s[1:]) * bessel_j_grid(2, s[1:]) * xi(s[1:] / (2.0 * n))
    return float(np.trapezoid(g, s))


def pair_response(n: int, xi: TestFunction, quad: QuadratureControls | None = None) -> PairingResult:
    """<r_n, xi> = int_0^inf (2/t) J_2(2nt) xi(t) dt after the substitution
    s = 2nt, truncated where the documented tail bound drops below tol."""
    quad = quad or QuadratureControls()
    s_max = 20.0
    while _truncation_bound(n, xi, s_max) > quad.tol:
        s_max *= 1.5
        if s_max > quad.s_cap:
            raise TruncationError(
                f"tail bound {_truncation_bound(n, xi, s_max):.3e} still above "
                f"tol={quad.tol:.1e} at s_max={s_max:.3e}"
            )
    ds = quad.ds
    value = _pair_on_window(n, xi, s_max, ds)
    for _ in range(quad.max_refinements):
        refined = _pair_on_window(n, xi, s_max, ds / 2.0)
        converged = abs(refined - value) <= quad.refine_tol
        value, ds = refined, ds / 2.0
        if converged:
            break
    return PairingResult(value=value, truncation_bound=_truncation_bound(n, xi, s_max), s_max=s_max)


def pair_corrected_response(
    n: int, xi: TestFunction, quad: QuadratureControls | None = None
) -> PairingResult:
    """Pairing of the corrected response n (u_1 - delta) with xi.

    Converges to xi'(0), the pairing with -delta', as n grows.
    """
    quad = quad or QuadratureControls(tol=1e-7)
    base = pair_response(n, xi, quad)
    xi0 = float(xi(0.0))
    return PairingResult(
        value=n * (base.value - xi0),
        truncation_bound=n * base.truncation_bound,
        s_max=base.s_max,
    )


def pair_solution_with_sine(n: int, t: float, k: int) -> float:
    """Exact integral of the affine-interpolated impulse solution at time t
    against sin(kx) on (0, 1)."""
    if not 0.0 < t:
        raise ValueError("t must be positive")
    if k <= 0:
        raise ValueError("k must be a positive integer")
    ladder = bessel_j_ladder(2 * n, 2.0 * n * t)
    j = np.arange(1, n)
    u = np.zeros(n + 1)
    u[1:n] = n * (ladder[2 * j - 1] + ladder[2 * j + 1])
    xs = np.arange(n + 1) / n

    x0, x1 = xs[:-1], xs[1:]
    u0, u1 = u[:-1], u[1:]
    beta = (u1 - u0) * n
    alpha = u0 - beta * x0
    # int sin(kx) dx and int x sin(kx) dx over each segment, closed form
    f_const = (-np.cos(k * x1) + np.cos(k * x0)) / k
    f_linear = (np.sin(k * x1) - k * x1 * np.cos(k * x1) - np.sin(k * x0) + k * x0 * np.cos(k * x0)) / k**2
    return float(np.sum(alpha * f_const + beta * f_linear))
