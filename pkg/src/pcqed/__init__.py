"""Two two-level atoms crossing a single-mode photonic-crystal cavity.

Closed-form and ODE evolution of the atom-photon-atom dynamics, pulse-area
gate calibration (entangler / dual-rail Hadamard, NOT, Z, SWAP), amplitude
sweeps over velocity and coupling ratio, and mode-field analysis (mode
volume, peak coupling, polarization fraction) for discretized cavity modes.
"""

from .core import (
    CONSTANTS,
    HBAR,
    EPS0,
    C_LIGHT,
    AmplitudeVector,
    AtomParams,
    CalibrationError,
    CavityParams,
    ConvergenceError,
    PhysicalConstants,
    basis_labels,
    g0_from_params,
    mode_volume_from_g0,
    photon_lifetime,
)
from .coupling import (
    CouplingTrace,
    GenericProfile,
    GenericProfileParams,
    generic_coupling,
    pulse_area,
    scaled_pair,
    trace_from_csv,
    trace_to_csv,
)
from .analytic import (
    PulseAreas,
    analytic_trajectory,
    closed_form_amplitudes,
    commutation_check,
    logical_unitary,
    series_amplitudes,
)
from .ode import (
    SubspaceHamiltonian,
    Trajectory,
    build_subspace,
    drive_from_profile,
    evolve,
    trajectory_to_csv,
    two_excitation_return,
)
from .fieldgrid import (
    FieldGrid,
    PathSpec,
    coupling_trace_from_field,
    grid_from_json,
    grid_to_json,
    mode_volume,
    peak_energy_point,
    polarization_fraction,
    synthesize_mode,
)
from .gates import (
    ENTANGLER_HADAMARD,
    IDENTITY,
    NOT,
    SWAP,
    TARGETS,
    Z,
    GateReport,
    GateSettings,
    GateTarget,
    calibrate_velocity,
    effective_interaction_time,
    fidelity,
    operation_time,
    truth_table,
)
from .sweep import SweepGrid, slice_surface, surface, surfaces_to_csv

__version__ = "0.1.0"
