"""convexa: exact computations with finite posets, lattices of order-convex sets,
their identities, and embedding constructions."""

from .convexity import ConvexSet, CoLattice, co_lattice, convex_join, restrict_eval
from .decide import (
    PosetCatalog,
    decide_identity_in_SUB,
    enumerate_posets,
    search_quasi_counterexample,
)
from .embed import (
    EmbeddingResult,
    GammaBuild,
    RBuild,
    RPoint,
    build_Gamma,
    build_R,
    phi,
    project_to_r,
    psi,
    size_bound,
)
from .identities import (
    AxiomReport,
    builtin_identity,
    builtin_quasi_identity,
    builtin_term,
    check_theta,
    check_theta_sampled,
    satisfies_SUB_bruteforce,
    satisfies_SUB_fast,
    satisfies_jirr_axiom,
)
from .jdep import (
    C_set,
    D_relation,
    D_sets,
    JoinCover,
    StirlitzTrack,
    UdavBondPartition,
    conjugates,
    has_D_cycle,
    is_stirlitz_track,
    minimal_nontrivial_join_covers,
    stirlitz_tracks,
    udav_bond_partition,
)
from .lattice import (
    FiniteLattice,
    JirrInfo,
    build_lattice,
    check_identity,
    check_quasi_identity,
    eval_term,
    format_lattice,
    generated_sublattice,
    join_irreducibles,
    parse_lattice,
    validate_lattice,
)
from .poset import (
    Crown,
    Poset,
    build_poset,
    find_crown,
    find_path,
    format_poset,
    is_crown_free,
    is_order_convex,
    is_tree_like,
    parse_poset,
)
from .terms import Join, Meet, QuasiIdentity, Term, Var, node_count, parse_term, to_sexp

__version__ = "0.1.0"
