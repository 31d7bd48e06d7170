"""ratlin: strong linearizations of rational matrices in recurrence bases.

Build rational eigenvalue problems as G = D + G_sp, linearize them through
one-sided or structured pencil families, solve the pencils, recover the
eigenvectors of G, and verify everything against brute-force oracles.
"""

from .basis import (
    DegreeGradedBasis,
    ThreeTermBasis,
    degree_graded_pencil,
    eval_phi,
    m_phi_pencil,
    monomial_change_matrix,
    rev_phi_at_zero,
    standard_basis,
    to_monomial,
)
from .linearize import (
    AnsatzSpec,
    Pencil,
    PencilMeta,
    TransformSpec,
    block_transpose,
    build_F,
    build_block_kronecker_symmetric_odd,
    build_degree_graded,
    build_family,
    build_hermitian,
    build_m1,
    build_m2,
    build_symmetric,
    solve_dm_pencil,
    strict_equiv,
    transfer_eval,
)
from .ratmodel import (
    HermitianRealization,
    PoleResidue,
    PolyMat,
    RationalMatrix,
    StateSpaceRealization,
    SymmetricRealization,
    check_least_order,
    evaluate,
    is_minimal,
    rev_eval,
    system_matrix,
)
from .realize import (
    MarkovSequence,
    from_pole_residue,
    hermitian_from_hankel,
    hermitian_similarity,
    markov_parameters,
    minimal_reduction,
    symmetric_from_hankel,
    symmetric_similarity,
    to_hermitian_realization,
    to_symmetric_realization,
)
from .solve import (
    EigenSolution,
    RecoveredPair,
    lift_left,
    lift_right,
    recover_infinity,
    recover_left,
    recover_right,
    solve_gep,
    solve_rep,
    system_lift,
    system_recover,
)
from .verify import (
    VerifyReport,
    check_dual_bases,
    check_minimal_basis,
    check_strong_linearization,
    check_structure,
    det_poly,
    oracle_eigenvalues,
)

__version__ = "0.1.0"
