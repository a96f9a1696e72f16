"""Few-mode state-vector toolkit for single-rail entanglement protocols.

Layers, bottom up: sparse Fock states over named modes (``fock``),
linear-optics and measurement primitives (``optics``), the heralded
generation / swapping / concentration protocols (``protocols``),
closed-form yield analytics with an exact enumeration oracle
(``analytics``), and a batch CLI (``cli``).
"""

from .errors import (
    CapacityError,
    ConfigError,
    ContractError,
    DegenerateStateError,
    ParameterWarning,
    RegisterError,
    SingleRailError,
)
from .fock import (
    DEFAULT_CUTOFF,
    NORM_TOL,
    FockState,
    ModeRegister,
    basis_state,
    single_photon,
    superpose,
    vacuum,
)
from .optics import (
    BeamSplitter,
    DetectionOutcome,
    QndConfig,
    QndOutcome,
    apply_beam_splitter,
    detect_single_photon,
    phase_flip,
    qnd_measure,
)
from .protocols import (
    Herald,
    HeraldEvent,
    IterationLedger,
    MonteCarloStats,
    ProtocolResult,
    RoundEntry,
    SingleRailPair,
    SourceParams,
    Tag,
    concentration_round,
    generate_entanglement,
    herald_action,
    iterate_concentration,
    recyclable_to_pair,
    run_monte_carlo,
    swap,
    swap_chain,
    swap_chain_trace,
)
from .analytics import (
    MonteCarloRound,
    OracleRound,
    YieldReport,
    YieldTerm,
    compare_yield,
    entanglement_ratio,
    monte_carlo_yield,
    yield_oracle,
    yield_series,
    yield_term,
)

__version__ = "0.1.0"

__all__ = [
    "BeamSplitter",
    "CapacityError",
    "ConfigError",
    "ContractError",
    "DEFAULT_CUTOFF",
    "DegenerateStateError",
    "DetectionOutcome",
    "FockState",
    "Herald",
    "HeraldEvent",
    "IterationLedger",
    "ModeRegister",
    "MonteCarloRound",
    "MonteCarloStats",
    "NORM_TOL",
    "OracleRound",
    "ParameterWarning",
    "ProtocolResult",
    "QndConfig",
    "QndOutcome",
    "RegisterError",
    "RoundEntry",
    "SingleRailError",
    "SingleRailPair",
    "SourceParams",
    "Tag",
    "YieldReport",
    "YieldTerm",
    "apply_beam_splitter",
    "basis_state",
    "compare_yield",
    "concentration_round",
    "detect_single_photon",
    "entanglement_ratio",
    "generate_entanglement",
    "herald_action",
    "iterate_concentration",
    "monte_carlo_yield",
    "phase_flip",
    "qnd_measure",
    "recyclable_to_pair",
    "run_monte_carlo",
    "single_photon",
    "superpose",
    "swap",
    "swap_chain",
    "swap_chain_trace",
    "vacuum",
    "yield_oracle",
    "yield_series",
    "yield_term",
]
