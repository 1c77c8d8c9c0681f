"""Embedding problems, prescribed automorphism groups of non-normal number
fields, and the trinomial gadget that kills unwanted automorphisms."""
from .algebra.factor import factor_over_Q, is_irreducible_over_QT, resultant
from .algebra.numberfield import NumberField, factor_over_number_field, roots_in_field
from .algebra.poly import ExactPoly, RatExpr, as_poly, parse_poly
from .catalog import catalog_self_check, check_catalog, find_entry, get_entry, load_catalog
from .certificate import verify_certificate, verify_file
from .embedding import (
    EmbeddingProblem,
    SolutionCertificate,
    base_change,
    is_split,
    push_solution,
    reduce_via_fiber_product,
    verify_solution,
)
from .errors import AutfieldError
from .fields import (
    Embedding,
    automorphism_group,
    galois_closure,
    normalizer_model_check,
    restriction_map,
    splitting_field,
)
from .funcfield import GaloisFunctionField
from .gadgets import gadget_distinctness, make_gadget
from .groups import FiniteGroup, GroupHom, fiber_product, find_lift, find_section, standard_group
from .pipeline import PipelineRequest, realize_aut
from .specialization import (
    GeometricSolution,
    hilbert_search,
    regularity_spot_check,
    specialize,
    specialize_solution,
)
from .tower import kill_automorphisms

__version__ = "0.1.0"

__all__ = [
    "AutfieldError",
    "Embedding",
    "EmbeddingProblem",
    "ExactPoly",
    "FiniteGroup",
    "GaloisFunctionField",
    "GeometricSolution",
    "GroupHom",
    "NumberField",
    "PipelineRequest",
    "RatExpr",
    "SolutionCertificate",
    "as_poly",
    "automorphism_group",
    "base_change",
    "catalog_self_check",
    "check_catalog",
    "factor_over_Q",
    "factor_over_number_field",
    "fiber_product",
    "find_entry",
    "find_lift",
    "find_section",
    "gadget_distinctness",
    "galois_closure",
    "get_entry",
    "hilbert_search",
    "is_irreducible_over_QT",
    "is_split",
    "kill_automorphisms",
    "load_catalog",
    "make_gadget",
    "normalizer_model_check",
    "parse_poly",
    "push_solution",
    "realize_aut",
    "reduce_via_fiber_product",
    "regularity_spot_check",
    "restriction_map",
    "resultant",
    "roots_in_field",
    "specialize",
    "specialize_solution",
    "splitting_field",
    "standard_group",
    "verify_certificate",
    "verify_file",
    "verify_solution",
]
