"""Non-uniform Berry-Esseen bounds: kernels, samplers, tail models, certification.

Submodules
----------
gaussian   Stable normal CDF/tail kernels and the Stein equation solution.
chaos      Finite-rank diagonal Wiener chaos: sampling, moments, exact q=2 CDF.
expfun     Brownian exponential functional: moments, sampling, rate bound.
bounds     Non-uniform bound formulas with pluggable tail models.
empirical  ECDFs, discrepancy curves, DKW bands, certification.
sampling   Reproducible chunked Philox substreams.
cli        Scenario runner with bit-stable CSV/JSON output.

Names that are unambiguous across submodules are re-exported here; samplers
and moment helpers live on their submodule (nubes.chaos.sample_batch,
nubes.expfun.moments, ...).
"""

from . import bounds, chaos, cli, empirical, expfun, gaussian, sampling
from .bounds import (
    BoundCurve,
    BoundInputs,
    BoundRow,
    EmpiricalTail,
    ExactCdfTail,
    ExpFunTail,
    MajorChaosTail,
    MarkovTail,
    TailModel,
    UnitTail,
    chaos_bound,
    evaluate_curve,
    nonuniform_bound,
    tail_probability,
    uniform_bound,
)
from .chaos import ChaosMoments, DiagonalChaosSpec, exact_cdf_q2_rank1, hermite
from .empirical import (
    CertifyReport,
    DiscrepancyRow,
    EmpiricalCdf,
    build_ecdf,
    certify,
    discrepancy_curve,
    dkw_epsilon,
    empirical_tail,
)
from .expfun import ExpFunMoments, ExpFunParams, PathConfig, Scheme, clt_rate_bound
from .gaussian import (
    Branch,
    LemmaReport,
    SteinSolutionPoint,
    check_lemma,
    normal_cdf,
    normal_tail,
    scaled_tail,
    stein_derivative,
    stein_ode_residual_fd,
    stein_solution,
    stein_value,
)

__version__ = "0.1.0"
