"""Operator-splitting error laboratory for a 1D NO-NO2-O3 advection-reaction system."""
from .advection import AdvectionConfig, Field1D, Grid1D, advect, make_step_profile, superbee
from .mechanism import (
    LumpedPair,
    MechanismParams,
    SpeciesTriple,
    analytic_reference,
    chem_jacobian,
    chem_rhs,
    lumped,
    steady_state,
    transported_pulse,
)
from .metrics import ConvergenceEstimate, RRMSConfig, fit_order, l2_error, numerical_diffusion_estimate, rrms, rrms_species, rrms_species_mean
from .splitting import Pulse, RunResult, ScenarioConfig, SplittingSequence, run_simulation, split_step
from .stiffode import SolverConfig, StepSizeUnderflow, integrate_cell, integrate_cells, step_controller

__version__ = "0.1.0"
