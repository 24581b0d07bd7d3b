"""Ergotropy decay and anomalous-relaxation analysis for small dissipative batteries."""

from .channels import (
    GADC,
    ChannelSpec,
    NonMarkovADC,
    Pauli,
    QutritADC,
    default_horizon,
    hamiltonian,
    jump_operators,
    n_bose_from_temperature,
    steady_state,
)
from .errors import (
    ConfigError,
    DimensionError,
    DomainError,
    ErgofluxError,
    EXIT_CODES,
    ModelError,
    NumericError,
    OrderingError,
)
from .ergotropy import (
    ErgotropyBreakdown,
    ergotropy,
    ergotropy_breakdown,
    incoherent_vanish_time,
    iso_ergotropic_mx,
    passive_state,
    qutrit_table_ergotropy,
)
from .liouville import Liouvillian, build_liouvillian, evolve_spectral
from .mpemba import (
    CrossingReport,
    LemmaReport,
    Trajectory,
    crossing_time_pure_gadc,
    detect_crossings,
    distance_curve,
    ergotropy_crossings,
    ergotropy_curve,
    mpemba_parameter,
    predict_emc_gadc,
    predict_emc_pauli,
    state_mpemba_crossings,
    trajectory,
    verify_lemma_monotonicity,
)
from .regions import (
    AxisSpec,
    GridSpec,
    RegionMap,
    scan_crossing_count_nm,
    scan_emc_qubit,
    scan_mpemba_parameter_pure,
    scan_qutrit_simplex,
    scan_state_vs_emc,
)
from .states import (
    BatteryHamiltonian,
    BlochVector,
    DensityMatrix,
    QutritDiagonal,
    bloch_to_density,
    density_to_bloch,
    eigen_sorted,
    l1_coherence,
    trace_distance,
)

__version__ = "0.1.0"

__all__ = [
    "AxisSpec",
    "BatteryHamiltonian",
    "BlochVector",
    "ChannelSpec",
    "ConfigError",
    "CrossingReport",
    "DensityMatrix",
    "DimensionError",
    "DomainError",
    "EXIT_CODES",
    "ErgofluxError",
    "ErgotropyBreakdown",
    "GADC",
    "GridSpec",
    "LemmaReport",
    "Liouvillian",
    "ModelError",
    "NonMarkovADC",
    "NumericError",
    "OrderingError",
    "Pauli",
    "QutritADC",
    "QutritDiagonal",
    "RegionMap",
    "Trajectory",
    "bloch_to_density",
    "build_liouvillian",
    "crossing_time_pure_gadc",
    "default_horizon",
    "density_to_bloch",
    "detect_crossings",
    "distance_curve",
    "eigen_sorted",
    "ergotropy",
    "ergotropy_breakdown",
    "ergotropy_crossings",
    "ergotropy_curve",
    "evolve_spectral",
    "hamiltonian",
    "incoherent_vanish_time",
    "iso_ergotropic_mx",
    "jump_operators",
    "l1_coherence",
    "mpemba_parameter",
    "n_bose_from_temperature",
    "passive_state",
    "predict_emc_gadc",
    "predict_emc_pauli",
    "qutrit_table_ergotropy",
    "scan_crossing_count_nm",
    "scan_emc_qubit",
    "scan_mpemba_parameter_pure",
    "scan_qutrit_simplex",
    "scan_state_vs_emc",
    "state_mpemba_crossings",
    "steady_state",
    "trace_distance",
    "trajectory",
    "verify_lemma_monotonicity",
]
