"""Driven three-level atoms: master equations for the four standard
configurations, partial dressed-state maps that make the two-laser and
single-laser members of each family exactly equivalent, and the observables
(photon statistics, emission spectra, quantum-jump trajectories) that
exhibit the equivalence.
"""

__version__ = "0.1.0"

from .systems import Config, LindbladModel, SystemParams, build_model
from .equivalence import (
    EquivalenceMap,
    EquivalenceReport,
    basis_unitary,
    dipole_angle,
    map_fig1a_to_fig1b,
    map_fig2a_to_fig2b,
    map_rates,
    map_system,
    mixing_angle_fig1,
    mixing_angle_fig2,
    verify_equivalence,
)
from .dynamics import (
    Liouvillian,
    liouvillian,
    propagate,
    propagate_series,
    slowest_decay_rate,
    steady_state,
)
from .observables import (
    BrightDarkStats,
    JumpRecord,
    Kind,
    McRun,
    SampledFunction,
    bright_dark_stats,
    emission_spectrum,
    g2,
    interjump_gaps,
    mc_trajectories,
    populations,
    waiting_time,
)
from .errors import (
    DegenerateBasisError,
    NonUniqueSteadyStateError,
    PropagationError,
    ScenarioError,
    UndefinedAngleError,
)

__all__ = [
    "__version__",
    "Config", "SystemParams", "LindbladModel", "build_model",
    "EquivalenceMap", "EquivalenceReport", "mixing_angle_fig1",
    "mixing_angle_fig2", "basis_unitary", "map_rates", "dipole_angle",
    "map_fig1a_to_fig1b", "map_fig2a_to_fig2b", "map_system",
    "verify_equivalence",
    "Liouvillian", "liouvillian", "propagate", "propagate_series",
    "steady_state", "slowest_decay_rate",
    "SampledFunction", "Kind", "JumpRecord", "McRun", "BrightDarkStats",
    "g2", "waiting_time", "emission_spectrum", "populations",
    "mc_trajectories", "interjump_gaps", "bright_dark_stats",
    "DegenerateBasisError", "UndefinedAngleError", "PropagationError",
    "NonUniqueSteadyStateError", "ScenarioError",
]
