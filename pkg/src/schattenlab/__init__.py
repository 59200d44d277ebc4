"""schattenlab: singular-value log-gas densities of Schatten unit balls,
their exact moment identities, and the thin-shell / negative-correlation
statistics, all with verifiable numerics."""

__version__ = "0.1.0"

from .ensembles import (  # noqa: F401
    BETA,
    EnsembleParams,
    GasMapping,
    Quaternion,
    SchattenSpec,
    ensemble_of,
)
from .density import log_f, log_f_p, homogeneity_degree  # noqa: F401
from .gammafn import GammaRatio, gamma_gap, gamma_ratio, log_gamma  # noqa: F401
from .matrixlab import (  # noqa: F401
    EntryIdentityTerms,
    MatrixSample,
    SvdResult,
    entry_identity_terms,
    random_matrix,
    schatten_norm,
    svd,
    symmetry_transform,
)
from .moments import (  # noqa: F401
    MomentEstimate,
    OracleFailure,
    SigmaEstimate,
    VarMpEstimate,
    closed_form_moment,
    estimate_moment,
    quadrature_moment,
    quadrature_moments,
    sigma_pipeline,
    var_mp_pipeline,
)
from .samplers import (  # noqa: F401
    SampleBatch,
    SamplerUnavailable,
    ball_pushforward,
    exact_p2_sample,
    gas_sample,
    matrix_hit_and_run,
    mcmc_sample,
)
from .verify import CheckReport, SUITES, run_suite  # noqa: F401
