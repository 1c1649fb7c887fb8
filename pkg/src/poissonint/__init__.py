"""Poisson integrators from generating functions on bi-realisations.

The package builds structure-preserving one-step maps for Hamiltonian
systems on Poisson manifolds: a truncated generating function solves the
Hamilton-Jacobi recursion on an explicit chart of the local symplectic
groupoid, and the induced map is a Poisson diffeomorphism converging at
the truncation order.  Supporting modules provide the scalar rings for
derivatives (dual numbers and truncated jets), an expression language
for Hamiltonians, Magnus-series backward analysis, reference schemes,
and a benchmark harness with a CLI.
"""

from .birealisations import (
    BiRealisation,
    bireal_for,
    canonical_symplectic,
    log_canonical_bireal,
    so3_dual_cayley,
)
from .errors import (
    ConfigError,
    DomainError,
    NewtonDiverged,
    NumericalFailure,
    ParseError,
    PoissonIntError,
    UsageError,
)
from .expressions import diff, evaluate, parse, to_text
from .generating import (
    GeneratingFunction,
    eval_S,
    grad_S,
    hj_coefficients,
    hj_residual,
    variation_function,
    variation_jet,
)
from .harness import (
    DriftReport,
    OrderStudyResult,
    RunConfig,
    TrajectoryRecord,
    drift_report,
    load_config,
    order_study,
    record_from_csv,
    run,
    run_fixtures,
    write_order_study,
    write_trajectory,
)
from .integrators import (
    StepConfig,
    StepMap,
    compose_steps,
    counterexample_step,
    exact_flow,
    hj_step,
    kahan_lv_step,
    make_hj_step,
    make_rk4_step,
    rk4_step,
    strang,
)
from .magnus import (
    MagnusSeries,
    TimeDepHamiltonian,
    bernoulli,
    magnus_flow_check,
    magnus_truncate,
)
from .poisson import (
    PoissonStructure,
    bracket,
    canonical,
    casimir_values,
    counterexample_2d,
    from_id,
    ham_vector_field,
    log_canonical,
    so3_dual,
)
from .rings import Dual, TJet, dual_lift, real_part

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "BiRealisation",
    "bireal_for",
    "canonical_symplectic",
    "log_canonical_bireal",
    "so3_dual_cayley",
    "ConfigError",
    "DomainError",
    "NewtonDiverged",
    "NumericalFailure",
    "ParseError",
    "PoissonIntError",
    "UsageError",
    "diff",
    "evaluate",
    "parse",
    "to_text",
    "GeneratingFunction",
    "eval_S",
    "grad_S",
    "hj_coefficients",
    "hj_residual",
    "variation_function",
    "variation_jet",
    "DriftReport",
    "OrderStudyResult",
    "RunConfig",
    "TrajectoryRecord",
    "drift_report",
    "load_config",
    "order_study",
    "record_from_csv",
    "run",
    "run_fixtures",
    "write_order_study",
    "write_trajectory",
    "StepConfig",
    "StepMap",
    "compose_steps",
    "counterexample_step",
    "exact_flow",
    "hj_step",
    "kahan_lv_step",
    "make_hj_step",
    "make_rk4_step",
    "rk4_step",
    "strang",
    "MagnusSeries",
    "TimeDepHamiltonian",
    "bernoulli",
    "magnus_flow_check",
    "magnus_truncate",
    "PoissonStructure",
    "bracket",
    "canonical",
    "casimir_values",
    "counterexample_2d",
    "from_id",
    "ham_vector_field",
    "log_canonical",
    "so3_dual",
    "Dual",
    "TJet",
    "dual_lift",
    "real_part",
]
