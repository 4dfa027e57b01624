"""Stationary states, geometric phases, and echo diagnostics for a nonlinear two-mode dimer."""

__version__ = "0.1.0"

from .berry import (
    FrameLoop,
    PerturbationFrame,
    PhasePair,
    berry_phase_closed_form,
    berry_phase_constant_theta,
    berry_phase_discrete,
    berry_phase_perturbative,
    berry_phase_small_overlap,
    berry_phase_unit_overlap,
    companion_solid_angle,
    frame_from_deltas,
    frame_loop,
    solid_angle,
)
from .echo import (
    DriveSchedule,
    EchoTrace,
    WitnessReport,
    circular_drive,
    evolve_nonlinear,
    loschmidt_adiabatic,
    loschmidt_adiabatic_limit,
    loschmidt_dynamical,
    nonlinearity_witness,
    trace_mean,
    zero_drive,
)
from .errors import (
    AmbiguousRegimeError,
    AtDegeneracyError,
    BranchLostError,
    DegenerateFrameError,
    DimerPhaseError,
    InvalidStateError,
    LoopTooCoarseError,
    ModelDegenerateError,
    NearSingularLoopError,
    NonCoplanarLoopError,
    SingularLimitError,
    StepSizeError,
)
from .model import (
    Eigenstate,
    ModelParams,
    ParamPath,
    StationaryFamily,
    continue_branch,
    hamiltonian_apply,
    linear_path,
    phi_loop,
    quartic_coefficients,
    reconstruct_states,
    solve_quartic_real_roots,
    state_overlap,
    stationary_states,
)
from .triple import (
    TripleEigensystem,
    TripleFrame,
    delta_matrix,
    eigenvector_rows,
    encloses_degeneracy,
    transport_sign,
    triple_eigensystem,
    triple_frame,
)

__all__ = [
    "__version__",
    "AmbiguousRegimeError",
    "AtDegeneracyError",
    "BranchLostError",
    "DegenerateFrameError",
    "DimerPhaseError",
    "DriveSchedule",
    "EchoTrace",
    "Eigenstate",
    "FrameLoop",
    "InvalidStateError",
    "LoopTooCoarseError",
    "ModelDegenerateError",
    "ModelParams",
    "NearSingularLoopError",
    "NonCoplanarLoopError",
    "ParamPath",
    "PerturbationFrame",
    "PhasePair",
    "SingularLimitError",
    "StationaryFamily",
    "StepSizeError",
    "TripleEigensystem",
    "TripleFrame",
    "WitnessReport",
    "berry_phase_closed_form",
    "berry_phase_constant_theta",
    "berry_phase_discrete",
    "berry_phase_perturbative",
    "berry_phase_small_overlap",
    "berry_phase_unit_overlap",
    "circular_drive",
    "companion_solid_angle",
    "continue_branch",
    "delta_matrix",
    "eigenvector_rows",
    "encloses_degeneracy",
    "evolve_nonlinear",
    "frame_from_deltas",
    "frame_loop",
    "hamiltonian_apply",
    "linear_path",
    "loschmidt_adiabatic",
    "loschmidt_adiabatic_limit",
    "loschmidt_dynamical",
    "nonlinearity_witness",
    "phi_loop",
    "quartic_coefficients",
    "reconstruct_states",
    "solid_angle",
    "solve_quartic_real_roots",
    "state_overlap",
    "stationary_states",
    "trace_mean",
    "transport_sign",
    "triple_eigensystem",
    "triple_frame",
    "zero_drive",
]
