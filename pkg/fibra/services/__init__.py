"""Library layer: finite algebras, bundles, fibered algebras, holonomy and representations."""

from .algebra import FiniteAlgebra, GroupStructure, Signature, validate_algebra
from .bundle import BaseSpace, BundleAtlas, Section, validate_atlas
from .errors import FibraError
from .fibered_algebra import FiberedAlgebra, make_fibered_algebra
from .holonomy import classify_holonomic, holonomy_group
from .representation import FiberedGroup, GroupRepresentation, make_representation

__all__ = [
    "BaseSpace",
    "BundleAtlas",
    "FiberedAlgebra",
    "FiberedGroup",
    "FibraError",
    "FiniteAlgebra",
    "GroupRepresentation",
    "GroupStructure",
    "Section",
    "Signature",
    "classify_holonomic",
    "holonomy_group",
    "make_fibered_algebra",
    "make_representation",
    "validate_algebra",
    "validate_atlas",
]
