"""Term clones of small finite algebras, linear identity systems, and
realizability in idempotent reducts of modules over finite rings."""

from .affine import (
    AffineOperation,
    Realizable,
    Unrealizable,
    affine_satisfies,
    coefficient_system,
    enumerate_idempotent_affine,
    finite_ring_verdict,
)
from .algebra import (
    CloneSlice,
    FiniteAlgebra,
    TermOperation,
    builtin_algebras,
    classify_operation,
    generate_term_operations,
    make_algebra,
    make_majority_first,
    make_meet3,
    make_semilattice,
    product,
)
from .classify import (
    check_example3,
    classify_signature,
    full_report,
    minimal_unrealizable_subsystems,
)
from .identities import (
    Identity,
    IdentitySystem,
    Interpretation,
    canonicalize,
    find_interpretations,
    format_system,
    parse_system,
    satisfies,
    theory_of,
    two_variable_consequence,
)
from .snf import smith_normal_form

__all__ = [name for name in dir() if not name.startswith("_")]
