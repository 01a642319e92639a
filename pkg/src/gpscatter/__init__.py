"""One-dimensional nonlinear Schrodinger (Gross-Pitaevskii) barrier
scattering: stationary transmission under fixed-output boundary conditions,
unit-transmission resonance location, split-potential equality checks, and
time-dependent cross-validation."""

from .errors import (
    ClosedIncomingChannel,
    ConfigError,
    DegenerateAmplitude,
    DomainError,
    EmptyRange,
    EvanescentLocal,
    GPScatterError,
    GridTooCoarse,
    IntegrationError,
    NegativeRadicand,
    NonFiniteState,
    NoResonanceInBracket,
    NoSteadyState,
    NotResonant,
    SolveFailure,
    StepLimitExceeded,
    StepUnderflow,
    UnstableStep,
)
from .integrator import IntegratorConfig, WaveState, integrate, integrate_sampled
from .linref import (
    LinearSplitReport,
    TransferMatrix,
    compose,
    linear_split_reflection_check,
    potential_matrix,
    rect_resonance_energies,
    rect_well_transmission,
    reflection,
    step_matrix,
    transmission,
)
from .model import (
    DoubleGaussian,
    LeftPart,
    PhysicalParams,
    Potential,
    RectangularWell,
    RightPart,
    Tabulated,
    Zero,
    breakpoints,
    load_tabulated,
    potential_eval,
    reflect,
    split,
    support,
    wavenumber,
)
from .resonance import (
    SplitReport,
    TransmissionCurve,
    find_resonance,
    split_check,
    split_sweep,
    sweep,
)
from .scatter import (
    ConjugationReport,
    Direction,
    ScatterProblem,
    ScatterResult,
    conjugation_check,
    extract_incoming_amplitude,
    outgoing_state,
    solve_scattering,
    source_density,
    source_strength,
)
from .tdse import (
    Absorber,
    Grid,
    Snapshot,
    SourceSpec,
    propagate,
    steady_state_transmission,
)

__version__ = "0.1.0"
