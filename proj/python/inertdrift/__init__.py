"""Reflecting diffusions with inert drift: simulation and stationary-law checks."""

from ._core import (
    CoefficientSet,
    ConfigError,
    Domain,
    Error,
    GeometryError,
    NumericalError,
    Potential,
    RegularizedDistance,
    StationaryMeasure,
    TestReport,
    __version__,
    independence_test,
    k_moment_tests,
    ks_test,
    run,
    simulate,
    sliced_wasserstein1,
    solve_skorokhod,
    stationarity_residuals,
    wasserstein1,
)

__all__ = [
    "CoefficientSet",
    "ConfigError",
    "Domain",
    "Error",
    "GeometryError",
    "NumericalError",
    "Potential",
    "RegularizedDistance",
    "StationaryMeasure",
    "TestReport",
    "__version__",
    "independence_test",
    "k_moment_tests",
    "ks_test",
    "run",
    "simulate",
    "sliced_wasserstein1",
    "solve_skorokhod",
    "stationarity_residuals",
    "wasserstein1",
]
