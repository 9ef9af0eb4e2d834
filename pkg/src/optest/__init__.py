"""Optimum statistical test procedures.

Construction of minimum error-sum tests (likelihood-ratio regions and their
closed forms), locally optimum score tests, the locally optimum unbiased
test, and the unknown-variance plug-in test, together with analytic error
probabilities, seeded Monte Carlo verification, and an exhaustive-region
optimality oracle for small discrete spaces.
"""

from optest.dist import chi2_sf, std_normal_cdf, std_normal_pdf, std_normal_quantile
from optest.error_eval import (
    CertificationReport,
    DiscreteSpace,
    ErrorReport,
    SweepResult,
    analytic_alpha_lou,
    analytic_errors_fixed_alpha,
    analytic_errors_locally_optimum,
    analytic_errors_normal_mean,
    analytic_errors_normal_variance,
    brute_force_certify,
    convergence_sweep,
    discrete_space_from_models,
    monte_carlo_errors,
)
from optest.exceptions import (
    CapacityError,
    DegenerateProblemError,
    DegenerateSampleError,
    UnsupportedFamilyError,
)
from optest.local import (
    UnbiasednessReport,
    locally_optimum_test,
    locally_optimum_unbiased_test,
    normal_mean_lou_test,
    normal_mean_score_test,
    unbiasedness_defect,
)
from optest.models import (
    ExpFamilyModel,
    NormalMeanModel,
    NormalVarianceModel,
    SampleBatch,
    SimpleTestProblem,
    Support,
    as_batch,
    bernoulli,
    exponential_rate,
    log_likelihood,
    normal_mean_expfam,
    poisson,
    score_ratio,
    second_ratio,
)
from optest.optimum import (
    build_lr_test,
    expfam_test,
    fixed_alpha_comparator,
    log_ratio_constant,
    normal_mean_test,
    normal_variance_test,
)
from optest.plugin import (
    PluginEquivalenceReport,
    ProfileLikelihood,
    check_plugin_equivalence,
    mle_sigma2,
    plugin_test,
    profile_log_likelihood,
)
from optest.procedures import Decision, Direction, TestProcedure

__version__ = "0.1.0"
