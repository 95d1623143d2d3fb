"""Exact profile functions of polynomial maps on the p-adic Berkovich line."""

from .berkovich import (
    BerkPoint,
    Skeleton,
    convex_hull,
    m_D,
    make_divisor,
    path_distance,
    psi,
    psi_D,
    r_sigma,
    retract,
)
from .errors import (
    BerklineError,
    ClippedTuple,
    ConstantPolynomial,
    DegenerateAt,
    DegreeTooLarge,
    DirectionOutsideBall,
    DivisorTooSmall,
    DomainError,
    InadmissibleDivisor,
    InvalidProfile,
    MissingInfinity,
    NonConstantEdgeSlope,
    NonIntegerSlope,
    NoRationalRepresentative,
    NotSplit,
    SchemaError,
    ZeroPolynomial,
)
from .family import FamilySpec, family_invariant, family_scan
from .plmap import PLMap
from .poly import NewtonPolygon, Poly, gauss_norm_val, newton_polygon, split_roots
from .profile import (
    BranchTuple,
    ProfileTuple,
    SkeletonMap,
    admissible_divisor,
    backward_branching_direct,
    branch_to_profile,
    eval_profile,
    invert_profile,
    lift_path,
    local_degree,
    normalize_profile,
    profile_at,
    profile_to_branch,
    quotient_profile,
    skeleton_map,
)
from .radial import RadialSet, membership, mult_locus, sample_fiber, verify_radiality
from .valuation import INF, ValuedContext, format_ext, parse_ext

__version__ = "0.1.0"

__all__ = [
    "BerkPoint",
    "BerklineError",
    "BranchTuple",
    "ClippedTuple",
    "ConstantPolynomial",
    "DegenerateAt",
    "DegreeTooLarge",
    "DirectionOutsideBall",
    "DivisorTooSmall",
    "DomainError",
    "FamilySpec",
    "INF",
    "InadmissibleDivisor",
    "InvalidProfile",
    "MissingInfinity",
    "NewtonPolygon",
    "NoRationalRepresentative",
    "NonConstantEdgeSlope",
    "NonIntegerSlope",
    "NotSplit",
    "PLMap",
    "Poly",
    "ProfileTuple",
    "RadialSet",
    "SchemaError",
    "Skeleton",
    "SkeletonMap",
    "ValuedContext",
    "ZeroPolynomial",
    "admissible_divisor",
    "backward_branching_direct",
    "branch_to_profile",
    "convex_hull",
    "eval_profile",
    "family_invariant",
    "family_scan",
    "format_ext",
    "gauss_norm_val",
    "invert_profile",
    "lift_path",
    "local_degree",
    "m_D",
    "make_divisor",
    "membership",
    "mult_locus",
    "newton_polygon",
    "normalize_profile",
    "parse_ext",
    "path_distance",
    "profile_at",
    "profile_to_branch",
    "psi",
    "psi_D",
    "quotient_profile",
    "r_sigma",
    "retract",
    "sample_fiber",
    "skeleton_map",
    "split_roots",
    "verify_radiality",
]
