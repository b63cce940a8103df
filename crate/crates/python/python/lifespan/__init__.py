"""Lifespan experiments for cyclic semilinear heat systems."""

from ._lifespan import (
    UpperBound,
    Experiment,
    Exponents,
    MinorantCheck,
    OdeRun,
    OdeSystem,
    Report,
    Simulation,
    TestFunction,
    exponents,
)

__all__ = [
    "UpperBound",
    "Experiment",
    "Exponents",
    "MinorantCheck",
    "OdeRun",
    "OdeSystem",
    "Report",
    "Simulation",
    "TestFunction",
    "exponents",
]
