"""paramvariety: input-output equations and parameter varieties of
polynomial state-space models via Groebner-basis elimination.

Given a model definition and measured (or model-generated pseudo-) output
jets, the toolkit derives the model's input-output equation, solves for its
coefficient values, emits the polynomial constraints cutting out every
data-consistent parameter, and runs the extension check certifying that no
spurious parameters remain.
"""

from ._kernels import BACKEND as KERNEL_BACKEND
from .algebra import (
    DiffVar,
    MonomialOrder,
    ParamPoly,
    ParamRat,
    Poly,
    leading_term,
    lex_compare,
    poly_divide,
    rat_arith,
)
from .groebner import (
    GBLimits,
    IdealGens,
    ReducedGB,
    buchberger,
    elimination_subset,
    reduce_basis,
    s_polynomial,
)
from .model import (
    ModelSpec,
    ProlongedSystem,
    load_model,
    parse_model,
    prolong,
    total_derivative,
)
from .ioeq import IOEquationBasis, derive_io_basis, normalize_io
from .datalab import (
    DataSet,
    JetSample,
    Trajectory,
    central_difference,
    exact_viral_solution,
    integrate_model,
    jet_at,
    make_dataset,
)
from .variety import (
    SolveResult,
    VarietyConstraints,
    build_linear_system,
    sample_variety,
    solve_coefficients,
    variety_constraints,
)
from .extension import (
    ExtensionReport,
    check_extension,
    extension_sets,
    reconstruct_state_jet,
    run_extension_check,
)

__version__ = "0.1.0"
