"""Numerics for invariant metrics on the 3x3 spectral unit ball."""

from .calg import (
    OMEGA,
    BranchCut,
    Cubic,
    CyclicityReport,
    NotCyclic,
    SingularInput,
    SpectraMismatch,
    adjugate,
    companion,
    cubic_roots,
    cyclicity,
    elem_sym,
    format_complex,
    mat_exp,
    mat_log,
    parse_complex,
    similarity,
)
from .discs import (
    DiscCertificate,
    EndpointMismatch,
    LiftedDisc,
    NoFeasiblePoint,
    NotAdmissible,
    Phi3NotFlat,
    PolyMap3,
    ThetaFormViolated,
    boundary_margin,
    full_lift,
    lempert_upper,
    optimize_disc,
    paper_disc,
    relation3_residual,
    rescale_disc,
    tilde_lift,
)
from .domains import MembershipVerdict, SpecPoint, h_g3, membership, weighted_scale
from .experiments import (
    ExampleRow,
    LimitCertificate,
    NotDegreeTwo,
    PaperMatrices,
    PropBRow,
    ZeroT,
    example_run,
    kappa_upper_check,
    limit_certificate,
    paper_matrices,
    prop_b_run,
    sigma_expansion,
    step1_asymptotics,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
