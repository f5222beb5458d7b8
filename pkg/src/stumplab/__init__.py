"""PAC learnability lab for decision stumps on the nonnegative reals."""

from .learner import LabeledExample, choose, error, filter_positive, label, label_sample
from .measure import (
    Atom,
    Distribution,
    Exponential,
    Icc,
    Ico,
    Interval,
    Ioc,
    Ioo,
    Seed,
    Uniform,
    cdf,
    left_limit_cdf,
    measure_interval,
    parse_literal,
    sample,
    sample_vector,
    validate,
)
from .pac import (
    ExperimentConfig,
    TrialReport,
    VerificationReport,
    complexity,
    exact_success_probability,
    min_sample_count,
    run_trial,
    sweep,
    verify_pac,
)
from .theta import ThetaCertificate, certify_theta, exact_theta_exists, theta

__version__ = "0.1.0"
