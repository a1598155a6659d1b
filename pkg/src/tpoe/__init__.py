"""Pseudo-spectral solver and verification harness for time-periodic
Stokes/Oseen systems on a truncated space-time torus."""

from .errors import (
    ConfigError,
    DomainMismatch,
    EmptySweep,
    IncompatibleMean,
    InvalidExponent,
    InvalidGrid,
    NonHermitian,
    NonSolenoidal,
    NotPurelyPeriodic,
    SingularMode,
    SnapshotFormatError,
    TpoeError,
    UnknownRecipe,
)
from .spectral import (
    DualIndex,
    SpaceTimeField,
    SpectralField,
    TorusDomain,
    embed_spectrum,
    forward,
    inverse,
    plancherel_norm,
    refine,
    spectral_derivative,
)
from .symbols import (
    CutoffSpec,
    OseenParams,
    cutoff_chi,
    evaluate_M,
    evaluate_m,
    helmholtz_symbol,
    phi_embed,
    pressure_symbol,
    steady_symbol,
)
from .solver import (
    SolutionBundle,
    apply_helmholtz,
    apply_operator,
    apply_operator_fd,
    fluctuation,
    recover_pressure,
    solve_full,
    solve_steady,
    solve_time_periodic,
    time_average,
)
from .norms import (
    NormKind,
    NormTag,
    lq_norm,
    pressure_norm,
    sobolev_norm_21q,
    steady_kind_for,
    steady_norm,
)
from .analysis import (
    ConvergenceRow,
    MarcinkiewiczReport,
    ScanGrid,
    SweepRecord,
    constant_sweep,
    convergence_study,
    fit_log_trend,
    manufactured_case,
    marcinkiewicz_scan,
    random_band_limited_field,
    roundtrip_verify,
    transference_check,
)
from .snapshot import load_field, save_bundle, save_field

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ConvergenceRow",
    "CutoffSpec",
    "DomainMismatch",
    "DualIndex",
    "EmptySweep",
    "IncompatibleMean",
    "InvalidExponent",
    "InvalidGrid",
    "MarcinkiewiczReport",
    "NonHermitian",
    "NonSolenoidal",
    "NormKind",
    "NormTag",
    "NotPurelyPeriodic",
    "OseenParams",
    "ScanGrid",
    "SingularMode",
    "SnapshotFormatError",
    "SolutionBundle",
    "SpaceTimeField",
    "SpectralField",
    "SweepRecord",
    "TorusDomain",
    "TpoeError",
    "UnknownRecipe",
    "apply_helmholtz",
    "apply_operator",
    "apply_operator_fd",
    "constant_sweep",
    "convergence_study",
    "cutoff_chi",
    "embed_spectrum",
    "evaluate_M",
    "evaluate_m",
    "fit_log_trend",
    "fluctuation",
    "forward",
    "helmholtz_symbol",
    "inverse",
    "load_field",
    "lq_norm",
    "manufactured_case",
    "marcinkiewicz_scan",
    "phi_embed",
    "plancherel_norm",
    "pressure_norm",
    "pressure_symbol",
    "random_band_limited_field",
    "recover_pressure",
    "refine",
    "roundtrip_verify",
    "save_bundle",
    "save_field",
    "sobolev_norm_21q",
    "solve_full",
    "solve_steady",
    "solve_time_periodic",
    "spectral_derivative",
    "steady_kind_for",
    "steady_norm",
    "steady_symbol",
    "time_average",
    "transference_check",
]
