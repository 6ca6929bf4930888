"""Spontaneously generated entanglement of two radiatively coupled V-type atoms."""

__version__ = "0.1.0"

from .dynamics import (Trajectory, analytic_pumpless, integrate, relaxation_time,  # noqa: E402
                       simulate)
from .entanglement import (NegativityResult, negativity, negativity_generic,  # noqa: E402
                           pt_eigenvalues_pumped, pt_eigenvalues_pumpless)
from .linalg import hermitian_eigenvalues, hermitian_eigh, partial_transpose_a  # noqa: E402
from .model import (PRESETS, ReducedState, SystemParams, build_generator,  # noqa: E402
                    rhs_pumped, rhs_pumpless)
from .steadystate import SteadyState, steady_analytic, steady_numeric  # noqa: E402
from .sweep import SweepTable, find_optimal_pump, sweep_distance, sweep_pump  # noqa: E402

__all__ = [
    "Trajectory", "analytic_pumpless", "integrate", "relaxation_time", "simulate",
    "NegativityResult", "negativity", "negativity_generic", "pt_eigenvalues_pumped",
    "pt_eigenvalues_pumpless", "hermitian_eigenvalues", "hermitian_eigh",
    "partial_transpose_a", "PRESETS", "ReducedState", "SystemParams", "build_generator",
    "rhs_pumped", "rhs_pumpless", "SteadyState", "steady_analytic", "steady_numeric",
    "SweepTable", "find_optimal_pump", "sweep_distance", "sweep_pump",
]
