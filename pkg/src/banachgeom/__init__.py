"""Numerical toolkit for diameter-2, Daugavet and octahedrality geometry
on finitely presented normed spaces, with seminorm codes, finite dual
access and bounded formula evaluation."""

from .spaces import (
    PresentedSpace,
    Functional,
    facet_space,
    vertex_space,
    lp_space,
    sum_inf,
    sum_1,
    quotient_space,
    construct_space,
    builtin_space,
    norm_eval,
    dual_norm_eval,
    ball_vertices,
    dual_ball_vertices,
    linmax,
    is_polytopal,
)
from .codes import (
    QVec,
    qvec,
    basis_qvec,
    enumerate_qvecs,
    SeminormCode,
    encode_space,
    seminorm_eval,
    kernel_test,
    classify_code,
    code_distance,
)
from .dual import (
    DualAssignment,
    t_mu,
    k_mu_membership,
    knocerrado,
    LIMIT,
    verify_k_counterexample,
)
from .verdict import Verdict

__version__ = "0.1.0"
