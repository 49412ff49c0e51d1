"""Central table of default numerical tolerances and grid choices.

Scenario files may override any entry per run; the CLI reads defaults from
here so that every reported check carries an explicit tolerance.
"""

DEFAULT_TOLERANCES = {
    # max Frobenius distance between rotated and directly propagated states
    "equivalence": 1e-8,
    # pointwise distance for g2 / waiting-time curves of mapped pairs
    "photon_statistics": 1e-8,
    # relative sup-norm distance for incoherent spectra of mapped pairs
    "spectrum_rel": 1e-6,
    # trace drift of any propagated density matrix
    "trace": 1e-9,
    # most negative admissible density-matrix eigenvalue
    "positivity": -1e-9,
    # residual of the trace functional as a left null vector of a Liouvillian
    "left_null": 1e-12,
    # singular-value threshold (relative to sigma_max) for null spaces
    "null_space": 1e-10,
    # Hermiticity tolerance accepted by the Hermitian eigensolver
    "hermiticity": 1e-10,
}

DEFAULT_TIME_GRID = (0.0, 20.0, 201)     # units of 1/Gamma_ref
DEFAULT_OMEGA_GRID = (-10.0, 10.0, 2001)  # units of Gamma_ref

# quantum-jump ensembles
DEFAULT_N_TRAJ = 1000
DEFAULT_MC_DT = 0.05
DEFAULT_DARK_THRESHOLD = 10.0

# emission-spectrum quadrature: tau horizon = HORIZON_FACTOR / slowest decay
# rate of the Liouvillian, sampled at DEFAULT_N_TAU points
SPECTRUM_HORIZON_FACTOR = 20.0
DEFAULT_N_TAU = 2**14
