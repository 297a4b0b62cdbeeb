"""Maximum-likelihood non-decreasing and non-increasing response estimates."""

from .errors import (
    ConfigurationError,
    DomainError,
    FormatError,
    MonotoneMLEError,
    ObservabilityError,
    StructuralError,
)
from .families import (
    BERNOULLI,
    EXPONENTIAL,
    GEOMETRIC,
    POISSON,
    FamilySpec,
    Kind,
    binomial_log_coefficient,
    log_pdf,
    normal,
    sample,
    validate_observable,
)
from .fit import (
    Block,
    Direction,
    MonotoneEstimate,
    PrefixStats,
    block_end,
    brute_force_fit,
    fit,
    fit_nondecreasing,
    fit_nonincreasing,
    log_likelihood,
    pool_adjacent_violators,
    prefix_mean,
)
from .simulation import (
    HypothesisSpec,
    SimulationReport,
    Statistic,
    delta_statistic,
    generate_table,
    run_study,
)
from .table import ObservationTable
from .tabular import Format, emit_fit, load_dataset, parse_table, write_long

__version__ = "0.1.0"
