"""Hypercube linear algebra for polydisk objects.

Finite models of logarithmic-connection data (residues with Euler-paired
arrow maps) and perverse-sheaf data (monodromies with canonical/variation
maps) on the subset lattice of a normal crossing divisor, with axiom
validators, residue eigenvalue analysis, transforms between the two
sides, degeneration families, and a Jordan-Holder engine.  A FastAPI
service (:mod:`rhcube.service`) exposes every operation; the ``rhcube``
CLI is a thin client of that service.
"""

from .linalg import (
    DEFAULT_RANK_TOL,
    DEFAULT_TOL,
    FundamentalDomain,
    commute_residual,
    expm_2pii,
    kernel_basis,
    phi_matrix,
    principal_log_over_2pii,
    rank_tol,
    solve_intertwiners,
)
from .modalg import (
    InconclusiveError,
    LinearPresentation,
    generated_submodule,
    is_simple,
    is_stable,
    isomorphic,
    jordan_holder,
    presentation_of,
    semisimplify,
)
from .objects import (
    Filtration,
    InvalidObjectError,
    MalformedObjectError,
    NonInvariantSubspaceError,
    ValidationReport,
    degenerate,
    degeneration_intertwiner,
    trivial_filtration,
)
from .predmod import (
    PreDModule,
    constant,
    delta,
    esnault,
    extension,
    extension_filtration,
    from_commuting_residues,
    from_local_system,
    good_residual_eigenvalues,
    point_object,
    simple_interval,
)
from .rh import inverse_rh, rh, rh_jacobian_rank
from .strata import (
    PolydiskContext,
    StratumIndex,
    cover_Y_star,
    cover_Z,
    cover_Z_star,
    enumerate_strata,
)
from .verdier import VerdierObject, monodromy_consistency

__version__ = "0.1.0"
