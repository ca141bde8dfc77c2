"""Numerical toolkit for rigidity of rank-one factors in products of compact symmetric spaces."""

__version__ = "0.1.0"

from .errors import (
    ConfigError,
    DegeneracyError,
    DimensionMismatchError,
    DomainError,
    InternalConsistencyError,
    InvalidDimensionError,
    SymspaceError,
)
from .lie import LieAlgebra, build_so, build_sp, build_su
from .product import ProductSpace, build_product
from .simons import SubmanifoldGerm, random_germ, simons_total
from .symmetric import SymmetricPair, build_cpn_pair, build_hpn_pair, build_sphere_pair
from .submersion import build_fibration
from .triple import CandidateSubspace, pi1_injectivity_check, triple_residual
