"""Truncated multivariable weighted shifts and the von Neumann inequality."""

__version__ = "0.1.0"

from .errors import CommutationError, DomainError, ShiftlabError, StructureError  # noqa: E402
from .multiindex import BasisEnumeration, enumerate_basis, increment, leq  # noqa: E402
from .weights import (  # noqa: E402
    BetaFamily,
    WeightFamily,
    beta_from_weights,
    random_contractive_family,
    validate_commuting,
    weights_from_beta,
)
from .shiftbuild import TruncatedShift, apply_monomial, build, compress  # noqa: E402
from .vncheck import (  # noqa: E402
    MatrixPolynomial,
    eval_at_point,
    eval_at_tuple,
    op_norm,
    sup_norm_torus,
    vn_check,
    vn_ratio,
)

__all__ = [
    "BasisEnumeration", "BetaFamily", "CommutationError", "DomainError", "MatrixPolynomial",
    "ShiftlabError", "StructureError", "TruncatedShift", "WeightFamily", "apply_monomial",
    "beta_from_weights", "build", "compress", "enumerate_basis", "eval_at_point",
    "eval_at_tuple", "increment", "leq", "op_norm", "random_contractive_family",
    "sup_norm_torus", "validate_commuting", "vn_check", "vn_ratio", "weights_from_beta",
]
