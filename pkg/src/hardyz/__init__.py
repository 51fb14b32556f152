"""Hardy's Z-function on the critical line: Riemann-Siegel evaluation, shifted
Gram points, disconnected sets built from them, and numerical checks of the
mean-value, signum-area and Jacob's-ladder formulae."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    CoverageError,
    DomainError,
    HardyZError,
    MaxSubdivisionError,
    NoConvergenceError,
    PrecisionUnreachableError,
    SuspiciousZeroError,
)
from .special import (  # noqa: E402
    DEFAULT_CONFIG,
    EvalConfig,
    ThetaValue,
    ZValue,
    rs_z,
    rs_z_array,
    theta,
    z_oracle,
)
from .nupoints import NuPoint, WindowSpec, enumerate_window, solve_nu_point, theta_residual  # noqa: E402
from .sets import DisjointIntervalSet, SignPartition, build_sets, measure, sign_partition  # noqa: E402
from .quad import (  # noqa: E402
    IntegralResult,
    VerificationReport,
    integrate_set,
    verify_hardy_littlewood,
    verify_mean_value,
    verify_nu_sums,
    verify_signum_law,
)
from .ladder import LadderGrid, build_ladder, omega, reverse_point, verify_third_order  # noqa: E402

__all__ = [
    "CoverageError", "DomainError", "HardyZError", "MaxSubdivisionError", "NoConvergenceError",
    "PrecisionUnreachableError", "SuspiciousZeroError",
    "DEFAULT_CONFIG", "EvalConfig", "ThetaValue", "ZValue", "rs_z", "rs_z_array", "theta", "z_oracle",
    "NuPoint", "WindowSpec", "enumerate_window", "solve_nu_point", "theta_residual",
    "DisjointIntervalSet", "SignPartition", "build_sets", "measure", "sign_partition",
    "IntegralResult", "VerificationReport", "integrate_set", "verify_hardy_littlewood", "verify_mean_value",
    "verify_nu_sums", "verify_signum_law",
    "LadderGrid", "build_ladder", "omega", "reverse_point", "verify_third_order",
]
