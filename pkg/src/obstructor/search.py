"""Exhaustive enumeration of representations and order-preserving fan-out."""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from itertools import combinations_with_replacement, permutations
from math import comb
from typing import Callable, Iterable, Sequence, TypeVar

from .obstruction import compute_r
from .repcore import Representation, SphereDims

T = TypeVar("T")
R = TypeVar("R")

DEFAULT_MAX_TOTAL = 12
DEFAULT_MAX_CANDIDATES = 500_000


class SearchLimitExceeded(ValueError):
    pass


def parallel_map(fn: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """Map preserving input order; ``fn`` must be picklable when jobs > 1.

    Each worker process keeps its own memo table.
    """
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (jobs * 4))
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=chunk))


def _evaluate(task: tuple[SphereDims, int, tuple[int, ...]]) -> int:
    dims, k, masks = task
    return compute_r(dims, Representation.from_masks(k, masks)).parity


def nonzero_alphabet(k: int) -> list[int]:
    return list(range(1, 1 << k))


def _permute_mask(mask: int, k: int, perm: Sequence[int]) -> int:
    # coordinate perm[j] of the result is coordinate j of the input (0-based)
    out = 0
    for j in range(k):
        if (mask >> (k - 1 - j)) & 1:
            out |= 1 << (k - 1 - perm[j])
    return out


def dims_symmetries(dims: SphereDims) -> list[tuple[int, ...]]:
    k = len(dims)
    return [p for p in permutations(range(k)) if all(dims[p[j]] == dims[j] for j in range(k))]


def is_canonical(masks: tuple[int, ...], k: int, symmetries: Iterable[Sequence[int]]) -> bool:
    for perm in symmetries:
        image = tuple(sorted(_permute_mask(m, k, perm) for m in masks))
        if image < masks:
            return False
    return True


@dataclass
class SearchResult:
    dims: SphereDims
    alphabet: list[int]
    candidates: int
    hits: list[tuple[int, ...]]


def search(
    dims: Sequence[int],
    alphabet: Sequence[int] | None = None,
    *,
    up_to_symmetry: bool = False,
    jobs: int = 1,
    max_total: int = DEFAULT_MAX_TOTAL,
    max_candidates: int = DEFAULT_MAX_CANDIDATES,
) -> SearchResult:
    """All multisets of characters of size sum(dims) with r = 1, sorted.

    With ``up_to_symmetry`` only the lexicographically least member of each
    orbit under factor permutations that fix ``dims`` is kept.
    """
    dims = tuple(dims)
    k = len(dims)
    total = sum(dims)
    if total > max_total:
        raise SearchLimitExceeded(f"sum of dims {total} exceeds the limit {max_total}")
    letters = sorted(set(nonzero_alphabet(k) if alphabet is None else alphabet))
    if any(not 0 <= a < (1 << k) for a in letters):
        raise ValueError("alphabet characters must have rank k")
    count = comb(len(letters) + total - 1, total) if letters else int(total == 0)
    if count > max_candidates:
        raise SearchLimitExceeded(f"{count} candidate multisets exceed the limit {max_candidates}")
    candidates = list(combinations_with_replacement(letters, total))
    if up_to_symmetry:
        syms = [p for p in dims_symmetries(dims) if p != tuple(range(k))]
        candidates = [c for c in candidates if is_canonical(c, k, syms)]
    parities = parallel_map(_evaluate, [(dims, k, c) for c in candidates], jobs)
    hits = [c for c, p in zip(candidates, parities) if p == 1]
    return SearchResult(dims, letters, len(candidates), hits)
