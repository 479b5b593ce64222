"""Exact mod-2 Borsuk-Ulam obstructions for products of spheres and Stiefel manifolds."""

__version__ = "0.1.0"

from .obstruction import (  # noqa: E402
    DEFAULT_MEMO,
    DerivationNode,
    MemoTable,
    ObstructionResult,
    Rule,
    choose_peel,
    compute_r,
    peel,
    reduce_zero_factors,
    verify_certificate,
)
from .repcore import (  # noqa: E402
    Character,
    DimensionMismatch,
    ParseError,
    Representation,
    canonical_key,
    gram_representation,
    pairing,
    parse_alphas,
    parse_character,
    parse_dims,
    project_forget,
    render,
)
