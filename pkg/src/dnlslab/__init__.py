"""Numerical laboratory for the derivative NLS with a quintic term.

    i u_t + u_xx + i |u|^2 u_x + b |u|^4 u = 0

Periodic spectral grids, the closed-form two-parameter soliton family and
its degenerate member, conserved and variational functionals, a
pseudo-spectral time integrator, orbit-distance fitting and constrained
action minimization.
"""

__version__ = "0.1.0"

from .evolve import EvolveConfig, Stepper, Trajectory, rhs, run, step
from .functionals import (
    ConservedTriple,
    FunctionalParts,
    VariationalValues,
    action_gradient,
    action_S,
    conserved,
    energy,
    mass,
    momentum,
    n1,
    n2,
    nehari_K,
    parts_of,
    variational_values,
)
from .grid import Norms, ResolutionWarning, SpectralGrid
from .modulation import ModulationFit, fit_orbit, lambda0, orbit_distance, theorem_proximity, twisted_distance
from .soliton import (
    BracketError,
    DegenerateInfo,
    SolitonParams,
    build_soliton,
    endpoint_tail_corrections,
    gamma_of_b,
    kappa0,
    kaup_newell_gauge,
    ode_residual,
    periodic_half_width,
    profile_squared,
    scale_field,
    soliton_mass,
    soliton_parts,
)
from .variational import MinimizationResult, NehariError, minimize_action, nehari_rescale, rigidity_probe

__all__ = [
    "__version__",
    "BracketError",
    "ConservedTriple",
    "DegenerateInfo",
    "EvolveConfig",
    "FunctionalParts",
    "MinimizationResult",
    "ModulationFit",
    "NehariError",
    "Norms",
    "ResolutionWarning",
    "SolitonParams",
    "SpectralGrid",
    "Stepper",
    "Trajectory",
    "VariationalValues",
    "action_S",
    "action_gradient",
    "build_soliton",
    "conserved",
    "endpoint_tail_corrections",
    "energy",
    "fit_orbit",
    "gamma_of_b",
    "kappa0",
    "kaup_newell_gauge",
    "lambda0",
    "mass",
    "minimize_action",
    "momentum",
    "n1",
    "n2",
    "nehari_K",
    "nehari_rescale",
    "ode_residual",
    "orbit_distance",
    "parts_of",
    "periodic_half_width",
    "profile_squared",
    "rhs",
    "rigidity_probe",
    "run",
    "scale_field",
    "soliton_mass",
    "soliton_parts",
    "step",
    "theorem_proximity",
    "twisted_distance",
    "variational_values",
]
