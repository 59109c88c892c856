"""kerrflow: driven-dissipative Kerr resonator toolkit.

Classifies the mean-field phase-space flow (fixed points, chirality,
connectivity, topology phase diagram) and computes its quantum signatures:
Lindblad steady states, Wigner functions, photon-counting jump
trajectories, and the frequency-resolved chirality spectrum by both a
trajectory estimator and a Lindblad-spectral decomposition.
"""

from .errors import (
    ConfigError,
    ConvergenceError,
    DegenerateSteadyStateError,
    EscapeError,
    InvalidParameterError,
    KerrflowError,
    ResourceCapError,
    SpectralWeightError,
    TruncationError,
)
from .model import (
    ModelParams,
    ScaledParams,
    detuning_from_frequencies,
    to_physical,
    to_scaled,
)
from .semiclassics import (
    Chirality,
    FixedPoint,
    FlowField,
    FlowGraph,
    FPClass,
    RegionLabel,
    classify,
    fixed_points,
    flow_graph,
    integrate_flow,
    linearize,
    mean_field_rhs,
    phase_diagram,
)
from .hilbert import (
    DensityMatrix,
    FockSpace,
    LiouvillianSpectrum,
    OperatorMatrix,
    StateVector,
    WignerGrid,
    annihilation,
    choose_truncation,
    coherent_state,
    hamiltonian,
    liouvillian,
    liouvillian_spectrum,
    number_op,
    quadrature_ops,
    rssp,
    steady_state,
    steady_state_auto,
    vacuum_state,
    wigner,
)
from .trajectories import (
    EnsembleSpec,
    JumpPropagator,
    TrajectoryRecord,
    ensemble_expectations,
    evolve_trajectory,
    run_ensemble,
)
from .spectra import (
    ChiralitySpectrum,
    SpectralPeak,
    SpectrumRoute,
    bogoliubov_peaks,
    extract_peaks,
    lag_correlator,
    zeta_from_liouvillian,
    zeta_from_trajectories,
)

__version__ = "0.1.0"
