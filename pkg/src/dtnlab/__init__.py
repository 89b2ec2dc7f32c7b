"""Dirichlet-to-Neumann maps on smooth planar domains.

Builds cut-cell discretizations of uniformly elliptic bulk operators
(linear and Bellman), evaluates and assembles the boundary
Dirichlet-to-Neumann map, extracts its drift / jump-kernel /
compensator decomposition, and verifies the theorem-level estimates
against closed-form oracles and power-law fits.
"""

__version__ = "0.1.0"

from .bulk import DiscreteOperator, DomainGrid, assemble_operator, build_grid
from .config import RunConfig, load_config
from .dtn import (DtnMatrix, DtnOperator, check_gcp, check_minmax,
                  check_sandwich, extremal_dtn, random_smooth)
from .errors import (ConfigError, DtnLabError, GeometryError, GridError,
                     InputError, ResolutionError, SolverError, SpecError)
from .estimates import (CheckRecord, EstimateReport, fit_power_law,
                        verify_annuli, verify_barrier,
                        verify_flat_and_disk_oracles, verify_green_suite,
                        verify_kernel_bounds, verify_reconstruction,
                        verify_ring_and_lower_bounds,
                        verify_tv_and_drift_holder)
from .geometry import AnnuliReport, BoundaryCurve, BoundaryGrid, \
    build_boundary_grid
from .levy import LevyDecomposition, bump_mass, decompose, \
    reconstruct_action, tv_distance
from .solvers import (BulkProblem, OperatorSpec, SolutionField,
                      compute_green, compute_harmonic_measure)
from .strip import StripKernel, half_plane_kernel, strip_kernel
from .suites import Workspace, run_suite, run_suites

__all__ = [
    "__version__",
    "AnnuliReport", "BoundaryCurve", "BoundaryGrid", "build_boundary_grid",
    "DomainGrid", "DiscreteOperator", "build_grid", "assemble_operator",
    "OperatorSpec", "BulkProblem", "SolutionField", "compute_green",
    "compute_harmonic_measure",
    "DtnOperator", "DtnMatrix", "extremal_dtn", "random_smooth",
    "check_gcp", "check_sandwich", "check_minmax",
    "LevyDecomposition", "decompose", "reconstruct_action", "tv_distance",
    "bump_mass",
    "CheckRecord", "EstimateReport", "fit_power_law",
    "verify_kernel_bounds", "verify_reconstruction",
    "verify_ring_and_lower_bounds", "verify_tv_and_drift_holder",
    "verify_green_suite", "verify_flat_and_disk_oracles", "verify_barrier",
    "verify_annuli",
    "StripKernel", "strip_kernel", "half_plane_kernel",
    "RunConfig", "load_config", "Workspace", "run_suite", "run_suites",
    "DtnLabError", "GeometryError", "GridError", "SpecError", "SolverError",
    "InputError", "ResolutionError", "ConfigError",
]
