"""Exact bounds and representability tests for 1-RDM interaction functionals.

Small-system toolkit: full-configuration sector diagonalization,
certified lower/upper bounds of the pair-interaction functional at a
given one-electron reduced density matrix, membership tests for
candidate (W, gamma) pairs, and a bivariational max-min demonstration
with cutting planes.
"""

from .determinants import (
    DimensionOverflowError,
    Sector,
    annihilate,
    apply_single,
    build_one_body,
    build_two_body,
    create,
    enumerate_sector,
    occupied,
    spin_orbital,
)
from .dualbounds import (
    BoundOptions,
    BoundResult,
    InadmissibleGammaError,
    OracleInfeasibleError,
    dual_objective,
    lower_bound,
    maximize_dual,
    primal_certificate,
    primal_oracle,
    upper_bound,
)
from .functionals import (
    CANDIDATES,
    CandidateFunctional,
    ColemanVerdict,
    FunctionalPoint,
    coleman_check,
    hf_two_rdm,
    hf_vee,
    trace_condition,
)
from .integrals import (
    FcidumpError,
    OneBodyOperator,
    SystemSpec,
    TwoBodyIntegrals,
    builtin_model,
    pair_matrix_min_eig,
    read_fcidump,
    rotate_system,
    rotate_tensor,
    write_fcidump,
)
from .manybody import (
    Ensemble,
    GroundSpace,
    ManyBodyBasis,
    OneRDM,
    TwoRDM,
    ground_state,
    one_rdm,
    two_rdm,
    vee_expectation,
)
from .nrepcheck import (
    CutRound,
    HalfSpace,
    InfeasibleConstraintsError,
    Verdict,
    check_pair,
    cutting_plane,
    default_box,
    make_halfspace,
    max_min,
    reduce_lambda,
    sampled_lambda0_check,
)
from .oraclebench import ExtremeSearchResult, enumerate_extremes

__version__ = "0.1.0"

__all__ = [
    "BoundOptions",
    "BoundResult",
    "CANDIDATES",
    "CandidateFunctional",
    "ColemanVerdict",
    "CutRound",
    "DimensionOverflowError",
    "Ensemble",
    "ExtremeSearchResult",
    "FcidumpError",
    "FunctionalPoint",
    "GroundSpace",
    "HalfSpace",
    "InadmissibleGammaError",
    "InfeasibleConstraintsError",
    "ManyBodyBasis",
    "OneBodyOperator",
    "OneRDM",
    "OracleInfeasibleError",
    "Sector",
    "SystemSpec",
    "TwoBodyIntegrals",
    "TwoRDM",
    "Verdict",
    "annihilate",
    "apply_single",
    "build_one_body",
    "build_two_body",
    "builtin_model",
    "check_pair",
    "coleman_check",
    "create",
    "cutting_plane",
    "default_box",
    "dual_objective",
    "enumerate_extremes",
    "enumerate_sector",
    "ground_state",
    "hf_two_rdm",
    "hf_vee",
    "lower_bound",
    "make_halfspace",
    "max_min",
    "maximize_dual",
    "occupied",
    "one_rdm",
    "pair_matrix_min_eig",
    "primal_certificate",
    "primal_oracle",
    "read_fcidump",
    "reduce_lambda",
    "rotate_system",
    "rotate_tensor",
    "sampled_lambda0_check",
    "spin_orbital",
    "trace_condition",
    "two_rdm",
    "upper_bound",
    "vee_expectation",
    "write_fcidump",
]
