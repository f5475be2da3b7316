"""Bayesian inference for option underlyings with the change-of-measure likelihood."""

from ._kernels import BACKEND
from .distributions import GIGParams, NormalParams, gig_density, gig_logpdf, gig_moments, gig_sample
from .errors import (
    BoundaryCaseError,
    DataError,
    DomainError,
    GibbsRunError,
    ImproperPriorError,
    InvalidInputError,
    NumericError,
    RNBayesError,
    UnsupportedModelError,
    UnsupportedMomentError,
)
from .inference import (
    GibbsConfig,
    PosteriorDraws,
    conditional_mu,
    conditional_sigma2,
    consistency_diagnostic,
    effective_sample_size,
    gibbs_run,
    merging_diagnostic,
    posterior_summary,
)
from .likelihoods import (
    GbmParams,
    JumpModelParams,
    cumulant_k,
    esscher_theta,
    likelihood_discrete,
    likelihood_gbm,
    likelihood_jump,
    rn_density_gbm,
)
from .model_selection import (
    GbmModel,
    JumpDiffusionModel,
    ModelSpec,
    compare_models,
    marginal_likelihood,
    model_posterior,
)
from .paths import (
    JumpDist,
    PricePath,
    ReturnStat,
    dump_price_series,
    load_price_series,
    log_return,
    simulate_gbm,
    simulate_jump_diffusion,
)
from .pricing import OptionSpec, PriceEstimate, bs_call, price_model_averaged, price_posterior
from .priors import FlatPrior, GIGPrior, MixturePrior, NormalPrior, PointMass, PriorSpec

__version__ = "0.1.0"
