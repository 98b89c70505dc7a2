"""Coupled kicked tops: structured Floquet evolution, entanglement
production, and correlation-kernel rate estimates."""

from .classical import (
    LyapunovEstimate,
    RegimeStats,
    chaotic_sea_points,
    classical_step,
    lyapunov,
    regime_scan,
    sphere_point,
    to_angles,
)
from .correlation import (
    CorrelationTable,
    DecayFit,
    PtPrediction,
    RateFit,
    WindowPolicy,
    coth_rate,
    d_kernel,
    entropy_scale,
    equilibration_time,
    fit_exponential_decay,
    fit_linear_region,
    heisenberg_correlation,
    pt_entropy,
    pt_entropy_series,
    pt_rate,
)
from .entanglement import (
    EntropySeries,
    HusimiGrid,
    entropies_from_state,
    husimi,
    linear_entropy,
    reduce_first,
    reduce_second,
    sphere_grid,
    von_neumann,
)
from .errors import (
    ConfigError,
    DecayNotResolvableError,
    FitRegionError,
    NumericalInvariantError,
)
from .floquet import (
    SingleTopFloquet,
    StructuredFloquet,
    build_coupled,
    build_single_top,
    evolve,
    product_state,
    step,
)
from .spin import (
    SpinOperators,
    SpinQuantum,
    as_spin,
    build_operators,
    coherent_state,
    expectation,
    m_values,
)

__version__ = "0.1.0"
