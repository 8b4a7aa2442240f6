"""Zero-error perfect samplers from simulatable finite Markov chains."""

from .core import (
    BitSource,
    ChainModel,
    Rational,
    StateSpace,
    bernoulli_exact,
    categorical_exact,
    simulate,
    transition_matrix,
)
from .distributions import FiniteDist, d_inf, d_max, residual, tv_distance
from .errors import (
    CertificateViolation,
    DomainError,
    ModelError,
    MultiplicityError,
    PerfectMCError,
    ResourceError,
    SupportError,
)
from .mixing import MixingCertificate, tau_from_ell1, tau_from_gap, tau_uniform_brute
from .samplers import PerfectSampler, SampleReport, main_theorem_sampler, mc_perfect_sampler
from .stationary import check_reversible, gibbs_from_weights, solve_stationary

__version__ = "0.1.0"
