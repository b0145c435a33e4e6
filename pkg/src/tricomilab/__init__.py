"""Numerical laboratory for the semilinear Tricomi equation u_tt - t u_xx = |u|^p."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    ConeOverflowError,
    ConeSingularityError,
    ConeViolationError,
    DomainError,
    InputError,
    NoAdmissiblePairError,
    TricomiLabError,
    UsageError,
)
from .specfun import (  # noqa: E402
    EvalDomain,
    airy_lambda,
    airy_lambda_prime,
    airy_pair,
    bessel_k,
    char_radius,
    gauss_hyp_unit,
    hyp0f1_neg,
    kummer_phi,
)
from .fields import FieldState, Grid1D, InitialData, TrajectoryRecord  # noqa: E402
from .propagator import (  # noqa: E402
    LinearPropagator,
    cone_leak,
    decay_fit,
    evolve_homogeneous_exact,
    linear_trajectory,
)
from .duhamel import SourceTerm, duhamel_kernel, duhamel_solve  # noqa: E402
from .weights import WeightSpec  # noqa: E402
from .solver import (  # noqa: E402
    NonlinearitySpec,
    PicardReport,
    RunOutcome,
    StepControl,
    estimate_blowup_time,
    picard_iterate,
    run,
)
from .blowup import (  # noqa: E402
    RiccatiWitness,
    exponent_case,
    functional_G,
    functional_G1,
    riccati_check,
)
from .strichartz import (  # noqa: E402
    AlphaBeta,
    ExponentReport,
    alphabeta_solve,
    critical_exponents,
    gamma_admissible,
    glassey_apply,
    glassey_ratio_scan,
    inhomogeneous_inequality_sample,
    weighted_norm,
)
from .experiments import ExperimentConfig, SweepResult, dichotomy_plotdata, run_experiment  # noqa: E402
