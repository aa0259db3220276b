"""Driven Kerr resonator: multi-tone drives, Lindblad dynamics, photon statistics."""

from .errors import (
    BlockadeError,
    CatalogError,
    NonUniqueSteadyStateError,
    ScenarioParseError,
    StiffnessError,
    TruncationError,
)
from .fock import annihilation_op, coherent_density, creation_op, fock_density, kerr_op, number_op
from .lindblad import (
    IntegratorOptions,
    StateDiagnostics,
    StepStats,
    Trajectory,
    check_state,
    lindblad_rhs,
    propagate,
)
from .model import (
    DriveSpec,
    DriveTone,
    PhysicalParams,
    SystemParams,
    drive_amplitude,
    eigen_energy,
    hamiltonian_at,
    params_from_physical,
    resonant_detunings,
)
from .observables import (
    CriteriaReport,
    ObservableSeries,
    compute_series,
    evaluate_criteria,
    g_n,
    mean_photon,
    photon_distribution,
    poisson_distribution,
    window_average,
)
from .oracle import liouvillian, piecewise_exponential_propagate, steady_state, trace_distance
from .scenarios import Scenario, builtin, builtin_names, load, save

__version__ = "0.1.0"
