"""Stiefel manifold checks built on the product-of-spheres obstruction.

The Stiefel manifold V_{n,k} sits inside (S^{n-1})^k as the zero set of the
pairwise inner products, which take values in the Gram representation.  A
target V with dim V = k(n-1) - C(k,2) is obstructed when
r(n-1, ..., n-1; V + Gram) = 1.  The same computation on the filtered product
S^{n-k} x ... x S^{n-1} covers the orthogonality variety M.
"""

from __future__ import annotations

import enum
from collections import Counter
from dataclasses import asdict, dataclass
from math import comb
from typing import Sequence

from .obstruction import MemoTable, DEFAULT_MEMO, compute_r
from .repcore import (
    Character,
    DimensionMismatch,
    Representation,
    SphereDims,
    gram_representation,
)


class EmptyVariety(DimensionMismatch):
    pass


class Conclusion(str, enum.Enum):
    ZERO_GUARANTEED = "ZERO_GUARANTEED"
    INCONCLUSIVE = "INCONCLUSIVE"


class Backing(str, enum.Enum):
    THM_MAIN2 = "THM_MAIN2"
    COR_MAIN = "COR_MAIN"
    GENERALIZED_UNPROVEN = "GENERALIZED_UNPROVEN"


@dataclass(frozen=True)
class StiefelVerdict:
    n: int | None
    k: int
    m: int
    dims: SphereDims
    condition_parity: int
    conclusion: Conclusion
    theorem_backing: Backing

    def to_dict(self) -> dict:
        d = asdict(self)
        d["dims"] = list(self.dims)
        d["conclusion"] = self.conclusion.value
        d["theorem_backing"] = self.theorem_backing.value
        return d


def stiefel_dim_target(n: int, k: int) -> int:
    """m = k(n-1) - C(k,2)."""
    return k * (n - 1) - comb(k, 2)


def _check_nk(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")


def theorem_main_target(n: int, k: int) -> Representation:
    """(n - j) copies of eps_j for j = 1..k."""
    _check_nk(n, k)
    summands = []
    for j in range(1, k + 1):
        summands += [Character.basis(k, j)] * (n - j)
    return Representation(k, tuple(summands))


def fadell_husseini_target(n: int, k: int) -> Representation:
    _check_nk(n, k)
    summands = []
    for j in range(1, k + 1):
        summands += [Character.basis(k, j)] * (n - k)
    return Representation(k, tuple(summands))


def _verdict(n, k, m, dims, parity, backing) -> StiefelVerdict:
    conclusion = Conclusion.ZERO_GUARANTEED if parity == 1 else Conclusion.INCONCLUSIVE
    return StiefelVerdict(n, k, m, tuple(dims), parity, conclusion, backing)


def theorem_main2_check(n: int, k: int, rep: Representation, *, memo: MemoTable | None = DEFAULT_MEMO) -> StiefelVerdict:
    _check_nk(n, k)
    if rep.k != k:
        raise DimensionMismatch(f"representation has rank {rep.k}, expected {k}", expected=k, actual=rep.k)
    m = stiefel_dim_target(n, k)
    if rep.dim != m:
        raise DimensionMismatch(
            f"target must have dimension m = k(n-1) - C(k,2) = {m}, got {rep.dim}", expected=m, actual=rep.dim)
    dims = (n - 1,) * k
    parity = compute_r(dims, rep + gram_representation(k), memo=memo).parity
    return _verdict(n, k, m, dims, parity, Backing.THM_MAIN2)


def variety_nonempty(m_vec: Sequence[int]) -> bool:
    return all(m >= i for i, m in enumerate(sorted(m_vec)))


def variety_check(m_vec: Sequence[int], rep: Representation, *, memo: MemoTable | None = DEFAULT_MEMO) -> StiefelVerdict:
    """Obstruction for maps from {x in S^{m_1} x ... x S^{m_k} : pairwise orthogonal}."""
    m_vec = tuple(m_vec)
    k = len(m_vec)
    if rep.k != k:
        raise DimensionMismatch(f"representation has rank {rep.k}, expected {k}", expected=k, actual=rep.k)
    if any(m < 0 for m in m_vec):
        raise ValueError(f"sphere dimensions must be non-negative: {m_vec}")
    expected = sum(m_vec) - comb(k, 2)
    if rep.dim != expected:
        raise DimensionMismatch(
            f"target must have dimension sum(dims) - C(k,2) = {expected}, got {rep.dim}",
            expected=expected, actual=rep.dim)
    if not variety_nonempty(m_vec):
        raise EmptyVariety(f"no {k} pairwise orthogonal unit vectors fit in spheres of dimensions {m_vec}")

    n = None
    backing = Backing.GENERALIZED_UNPROVEN
    if k >= 1:
        top = m_vec[-1] + 1
        if (m_vec == tuple(range(top - k, top)) and top >= k
                and Counter(rep.masks) == Counter(fadell_husseini_target(top, k).masks)):
            n = top
            backing = Backing.COR_MAIN
        if backing is Backing.GENERALIZED_UNPROVEN and len(set(m_vec)) == 1 and top >= k:
            n = top
            backing = Backing.THM_MAIN2
    parity = compute_r(m_vec, rep + gram_representation(k), memo=memo).parity
    return _verdict(n, k, rep.dim, m_vec, parity, backing)
