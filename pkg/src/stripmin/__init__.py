"""Energy minimizers and symmetry breaking for a semilinear problem on a strip.

The package computes ground states of ``Delta u - L^2 u + u^p = 0`` on the
strip ``R^{N-1} x (0, 1)`` with Neumann boundary conditions, tracks the
Rayleigh-quotient energy ``c(L)`` against the t-independent (trivial) branch
``c*(L)``, locates the symmetry-breaking transition, expands the bifurcating
branch near it, and evaluates the test-function constants of the critical
regime.
"""

from .bifurcation import (
    BifurcationDiagram,
    BifurcationPoint,
    PitchforkExpansion,
    PitchforkReport,
    SweepOpts,
    grid_critical_length,
    locate_transition,
    pitchfork_expansion,
    sweep,
    transition_mode,
    validate_pitchfork,
)
from .config import RunConfig, load_config, template
from .critical import (
    CriticalConstants,
    fit_expansion,
    instanton_amplitude,
    instanton_residual,
    instanton_value,
    sobolev_constants,
    test_function_quotient,
)
from .errors import *  # noqa: F401,F403
from .errors import __all__ as _errors_all
from .fields import EnergyBreakdown, RadialProfile, StripField
from .grids import ProblemParams, RadialGrid, StripGrid, default_strip_grid, surface_area
from .radial import (
    TrivialBranch,
    closed_form_1d,
    extend_trivial_to_strip,
    shoot_ground_state,
    shooting_classification,
    trivial_branch_energy,
)
from .spectral import (
    CriticalLengthReport,
    critical_length,
    linearized_spectrum,
    principal_eigenvalue,
    stability_form,
    transverse_second_eigenvalue,
)
from .strip import (
    SolveOptions,
    energy_breakdown,
    large_L_asymptote,
    minimize_quotient,
    multistart_minimize,
    rearrange_monotone,
    rescale_between_formulations,
    symmetry_breaking_measure,
)

__all__ = [
    "BifurcationDiagram",
    "BifurcationPoint",
    "CriticalConstants",
    "CriticalLengthReport",
    "EnergyBreakdown",
    "PitchforkExpansion",
    "PitchforkReport",
    "ProblemParams",
    "RadialGrid",
    "RadialProfile",
    "RunConfig",
    "SolveOptions",
    "StripField",
    "StripGrid",
    "SweepOpts",
    "TrivialBranch",
    "closed_form_1d",
    "critical_length",
    "default_strip_grid",
    "energy_breakdown",
    "extend_trivial_to_strip",
    "fit_expansion",
    "grid_critical_length",
    "instanton_amplitude",
    "instanton_residual",
    "instanton_value",
    "large_L_asymptote",
    "linearized_spectrum",
    "load_config",
    "locate_transition",
    "minimize_quotient",
    "multistart_minimize",
    "pitchfork_expansion",
    "principal_eigenvalue",
    "rearrange_monotone",
    "rescale_between_formulations",
    "shoot_ground_state",
    "shooting_classification",
    "sobolev_constants",
    "stability_form",
    "surface_area",
    "sweep",
    "symmetry_breaking_measure",
    "template",
    "test_function_quotient",
    "transition_mode",
    "transverse_second_eigenvalue",
    "trivial_branch_energy",
    "validate_pitchfork",
]

__version__ = "0.1.0"
