"""Bounded transformed gamma processes for infrastructure deterioration.

Model construction and densities live in :mod:`btgp.models`, fitting and
model selection in :mod:`btgp.inference`, derived analytics in
:mod:`btgp.analysis` and replacement policies in :mod:`btgp.policy`.
"""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    BTGPError,
    CensusError,
    DataError,
    DegeneratePolicyError,
    DomainError,
    FitError,
    InputError,
    NoInteriorMaximumError,
    OptimizationError,
    ParameterDomainError,
    SelectionError,
    TruncationError,
    UnsupportedOperationError,
)
from .kernel import GammaParams, gamma_cdf, gamma_pdf, gamma_quantile, sample_gamma  # noqa: E402
from .models import (  # noqa: E402
    VARIANT_ORDER,
    ModelSpec,
    Orientation,
    Variant,
    increment_pdf,
    inverse_transform,
    marginal_pdf,
    mean_variance,
    remaining_life,
    simulate_paths,
    survival,
    transform,
)
from .inference import (  # noqa: E402
    AssetHistory,
    FitOptions,
    FittedModel,
    census,
    cleanse,
    fit_mle,
    log_likelihood,
    select_best_model,
)
from .analysis import matched_mean_bngp, mumv, mumv_grid, predictive_band  # noqa: E402
from .policy import (  # noqa: E402
    ABRPolicy,
    CBRPolicy,
    CostConfig,
    abr_rate,
    cbr_rate,
    optimize_abr,
    optimize_cbr,
    simulate_policy,
)
