"""Forward and inverse dynamics of finite Krein-Stieltjes strings.

Point masses on an interval are driven by a Dirichlet boundary control;
the package solves the forward motion spectrally and by time stepping,
computes the boundary response function, reconstructs the string from
that response through the connecting operator and a Krein-type equation,
and reproduces the constant-density limit experiments of the uniform
point-mass approximation.
"""

from .errors import (
    DegenerateSpectrumError,
    GridError,
    KreinStringError,
    RankError,
    RecoveryError,
    RegularizationError,
    SpecError,
    StabilityError,
    TruncationError,
)
from .model import (
    StringSpec,
    SystemMatrices,
    build_matrices,
    positions,
    read_spec_file,
    validate_spec,
    write_spec_file,
)
from .spectral import (
    SpectralData,
    compute_spectral_data,
    evaluate_polynomials,
    spectral_function,
)
from .forward import (
    TimeGrid,
    Trajectory,
    Waveform,
    apply_response_operator,
    check_integral_equation,
    continuous_solution,
    mollified_delta,
    response_function,
    solve_forward_delta,
    solve_forward_ode,
    solve_forward_spectral,
)
from .inverse import (
    DiscretizedConnector,
    RecoveryResult,
    Regularization,
    build_connector,
    numerical_rank,
    recover_string,
    second_derivative,
    solve_krein,
)
from .bessel import bessel_j, bessel_j_grid, bessel_j_ladder
from .uniform import (
    QuadratureControls,
    TestFunction,
    UniformCase,
    chebyshev_u,
    delta_solution,
    pair_corrected_response,
    pair_response,
    pair_solution_with_sine,
    parse_test_function,
    response_uniform,
    uniform_eigen,
    uniform_spec,
)

__version__ = "0.1.0"
