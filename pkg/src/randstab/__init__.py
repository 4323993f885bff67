"""Random-sum stability: transforms, compounder identification and samplers."""
from ._kernels import backend
from .discrete import (
    DiscretePgf,
    PmfTable,
    SibuyaBernoulli,
    as_discrete,
    check_d_type,
    d_type_transform,
    discrete_gen_sml,
    discrete_linnik,
    discrete_ml,
    discrete_stable,
    discretize,
    extract_pmf,
    is_pgf_coeffs,
    parse_discrete,
)
from .identify import (
    CompounderCurve,
    IdentifiedCompounder,
    check_power_pgf,
    classify_compounder,
    identify,
    identify_from_lt,
    identify_from_pgf,
    invert_monotone_transform,
)
from .sampling import (
    RandomSource,
    SampleBatch,
    binomial_thin,
    sample_compounder,
    sample_discrete,
    sample_discrete_via_poisson_mixture,
    sample_gen_ml,
    sample_lt,
    sample_positive_stable,
    sample_random_sum,
    sample_symmetric_cf,
)
from .stability import GridSpec, StabilityReport, solve_scale, verify
from .stats import McVerdict, ks_two_sample, tv_distance_pmf
from .transforms import (
    BernoulliShift,
    Degenerate,
    DomainError,
    Gamma,
    GeneralizedLinnik,
    GenSemiAlphaLaplace,
    GenSemiML,
    Geometric1,
    Harris,
    Linnik,
    MittagLeffler,
    PositiveLinnik,
    PositiveStable,
    ScaleFunction,
    SemiAlphaLaplace,
    SemiML,
    SemiStable,
    Sibuya,
    eval_cf,
    eval_lt,
    eval_pgf,
    parse_descriptor,
)

__version__ = "0.1.0"

__all__ = [
    "as_discrete",
    "backend",
    "BernoulliShift",
    "binomial_thin",
    "check_d_type",
    "check_power_pgf",
    "classify_compounder",
    "CompounderCurve",
    "d_type_transform",
    "Degenerate",
    "discrete_gen_sml",
    "discrete_linnik",
    "discrete_ml",
    "discrete_stable",
    "DiscretePgf",
    "discretize",
    "DomainError",
    "eval_cf",
    "eval_lt",
    "eval_pgf",
    "extract_pmf",
    "Gamma",
    "GeneralizedLinnik",
    "GenSemiAlphaLaplace",
    "GenSemiML",
    "Geometric1",
    "GridSpec",
    "Harris",
    "IdentifiedCompounder",
    "identify",
    "identify_from_lt",
    "identify_from_pgf",
    "invert_monotone_transform",
    "is_pgf_coeffs",
    "ks_two_sample",
    "Linnik",
    "McVerdict",
    "MittagLeffler",
    "parse_descriptor",
    "parse_discrete",
    "PmfTable",
    "PositiveLinnik",
    "PositiveStable",
    "RandomSource",
    "sample_compounder",
    "sample_discrete",
    "sample_discrete_via_poisson_mixture",
    "sample_gen_ml",
    "sample_lt",
    "sample_positive_stable",
    "sample_random_sum",
    "sample_symmetric_cf",
    "SampleBatch",
    "ScaleFunction",
    "SemiAlphaLaplace",
    "SemiML",
    "SemiStable",
    "Sibuya",
    "SibuyaBernoulli",
    "solve_scale",
    "StabilityReport",
    "tv_distance_pmf",
    "verify",
]
