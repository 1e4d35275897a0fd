"""Simulation and limit theory for W_p scale mixture random vectors."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import ConfigurationError, InconclusiveOracleError, NumericalError, WpmixError
from .rng import RandomStream, substream
from .geometry import IndexPartition, NormSpec, SphereSampler, a_norm, lq_norm, make_partition, sample_sphere
from .laws import (
    beta_mixing,
    exponential_radial,
    finite_endpoint_radial,
    kotz3_radial,
    pareto_radial,
    point_mass_mixing,
    power_beta_mixing,
    power_endpoint_radial,
    spherical_mixing,
    uniform_mixing,
)
from .mixture import BivariateModel, WpMixtureModel, make_model, sample_bivariate, sample_mixture
from .conditional import (
    ConditionalLaw,
    cond_cdf,
    cond_pdf,
    cond_quantile,
    cond_sample,
    make_conditional,
    slab_conditional_oracle,
)
from .limits import (
    exceedance_experiment,
    frechet_limit,
    joint_limit_sample,
    kotz_limit,
    weibull_limit,
)
from .concomitants import (
    ConcomitantExperiment,
    concomitant_extract,
    eta_limit_cdf,
    normalizing_constants,
    run_concomitant_experiment,
)
from .harness import convergence_sweep, ks_distance, ks_two_sample
