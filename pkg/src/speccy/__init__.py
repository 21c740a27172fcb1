"""Exact arithmetic of quadratic lattices, Weil representations, theta
series, Eisenstein coefficients, and CM special-divisor degrees, with a
cross-verified ledger of the finite-part degree identities."""

from .cm import (
    CMDegree,
    QuaternionAlgebra,
    QuaternionOrder,
    construct_Bpinfty,
    degree_bruteforce,
    degree_formula,
    embed_cm,
)
from .eisenstein import EisensteinPackage, EisensteinTable, a_plus, eisenstein_qexp, s_mu
from .imq import (
    ImQField,
    L_chi,
    L_derivative_data,
    LogLinear,
    completed_lambda,
    diff_set,
    hilbert_symbol,
    rankin_selberg_L,
    rho,
    rho_bruteforce,
)
from .lattice import (
    Coset,
    DiscriminantGroup,
    QuadLattice,
    SublatticeEmbedding,
    discriminant_group,
    enumerate_coset_vectors,
    even_clifford_binary,
    glue_cosets,
    is_maximal,
    orthogonal_complement,
)
from .pullback import (
    EmbeddingContext,
    LedgerReport,
    cotaut_degree,
    finite_heart_degree,
    lambda_mmu,
    pullback_table,
    verify_ledger,
)
from .qseries import (
    PrincipalPart,
    VVFormQ,
    constant_term_pairing,
    extend_by_zero,
    hejhal_principal_part,
    pair,
    rep_number,
    theta_series,
)
from .weil import MetaWord, WeilRep

__version__ = "0.1.0"
