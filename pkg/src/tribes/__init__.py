"""Weak factorization systems on the tribe of finite groupoids.

Groupoids, normal cloven fibrations, path objects, constructive lifting
and a brute-force oracle that checks every constructed answer.
"""

__version__ = "0.1.0"

from .errors import (
    BudgetExceeded,
    CodomainMismatch,
    DocumentSyntaxError,
    DomainMismatch,
    InvalidFibration,
    NoWitness,
    NotACone,
    NotAFibration,
    PreconditionViolated,
    SchemaError,
    TribeError,
    ValidationError,
    Violation,
)
from .groupoid import (
    Functor,
    Groupoid,
    compose_functors,
    connected,
    cyclic,
    discrete,
    disjoint_union,
    from_group,
    from_terminal,
    functor_equal,
    identity_functor,
    inclusion,
    interval,
    terminal,
    to_terminal,
    two,
    validate_functor,
    validate_groupoid,
    z2,
)
from .fibration import (
    NormalClovenFibration,
    PullbackSquare,
    base_change_fibration,
    compose_fibrations,
    derive_canonical_cleavage,
    fibration,
    identity_fibration,
    mediating_arrow,
    product,
    pullback,
    terminal_fibration,
    validate_fibration,
)
from .paths import (
    PathObject,
    diagonal,
    mapping_path_object,
    path_object,
    stability,
    stability_iso,
)
from .wfs import (
    Factorization,
    FactorizationUnit,
    Filler,
    LiftingProblem,
    UnitPullback,
    factorize,
    fill_unit_square,
    filler_failures,
    reduce_lifting_problem,
    solve_lifting,
    transport,
)
from .oracle import (
    SearchBudget,
    enumerate_functors,
    find_fillers,
    has_llp,
    llp_counterexample,
)
from .verify import VerificationReport, random_fibration, random_groupoid, verify_wfs
