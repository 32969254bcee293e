"""Exact engine for contraction families of sl2 weight-ladder modules.

Builds the one-parameter module families interpolating between a semisimple
module at t = 1 and its motion-group limit at t = 0, verifies their algebraic
identities in zero-tolerance rational arithmetic, and materializes the
correspondence table between the two endpoints.
"""

__version__ = "0.1.0"

from .exactnum import (
    GaussRational,
    PoleError,
    Scalar,
    TPoly,
    eval_at,
    gauss,
    limit_at_zero,
    normalize,
)
from .families import (
    FamilySpec,
    build_family,
    discrete_family,
    finite_dim_branch,
    minimal_ktype_family,
    principal_family,
    rees_lambda0_family,
    specialize,
)
from .geometry import (
    FlagPoint,
    OrbitKind,
    SStarPoint,
    k_orbit_of,
    lambda_involution,
    phi_map,
)
from .intertwine import (
    AlphaSequence,
    alpha,
    alpha_limits,
    apply_intertwiner,
    composition_defect,
    equivariance_defect,
    finite_rank_image,
)
from .ladder import (
    DomainError,
    IndexSet,
    LadderFamily,
    ModuleElement,
    apply,
    bracket_defect,
    casimir_defect,
    generated_submodule,
    ladder_isomorphic,
)
from .contraction import (
    BijectionRow,
    InconsistencyError,
    MackeyDatum,
    SupportDescriptor,
    SupportKind,
    UnclassifiedSupportError,
    bijection_table,
    contract,
    irreducible_quotient,
    mackey_collisions,
    schmid_check,
    split_rees_odd,
    support,
    tempered_sample_specs,
)
from .dsl import DslError, DslSemanticError, DslSyntaxError, ModuleDoc, parse_module_doc

__all__ = [
    "__version__",
    "GaussRational", "PoleError", "Scalar", "TPoly", "eval_at", "gauss",
    "limit_at_zero", "normalize",
    "FamilySpec", "build_family", "discrete_family", "finite_dim_branch",
    "minimal_ktype_family", "principal_family", "rees_lambda0_family", "specialize",
    "FlagPoint", "OrbitKind", "SStarPoint", "k_orbit_of", "lambda_involution", "phi_map",
    "AlphaSequence", "alpha", "alpha_limits", "apply_intertwiner",
    "composition_defect", "equivariance_defect", "finite_rank_image",
    "DomainError", "IndexSet", "LadderFamily", "ModuleElement", "apply",
    "bracket_defect", "casimir_defect", "generated_submodule", "ladder_isomorphic",
    "BijectionRow", "InconsistencyError", "MackeyDatum", "SupportDescriptor",
    "SupportKind", "UnclassifiedSupportError", "bijection_table", "contract",
    "irreducible_quotient", "mackey_collisions", "schmid_check", "split_rees_odd",
    "support", "tempered_sample_specs",
    "DslError", "DslSemanticError", "DslSyntaxError", "ModuleDoc", "parse_module_doc",
]
