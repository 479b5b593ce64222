"""Characters of (Z/2)^k, representations built from them, and sphere dimensions.

A character is stored as an integer mask together with its rank ``k``.
Coordinate 1 is the most significant bit, so the mask read in binary with
``k`` digits is exactly the textual form ("110" has coordinate 1 set).
Numeric order on masks therefore coincides with lexicographic order on the
bitstrings, which is the total order used for canonical keys.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

MAX_RANK = 16

SphereDims = tuple[int, ...]


class ParseError(ValueError):
    pass


class DimensionMismatch(ValueError):
    def __init__(self, message: str, expected: int | None = None, actual: int | None = None):
        super().__init__(message)
        self.expected = expected
        self.actual = actual


def _check_rank(k: int) -> None:
    if k < 0:
        raise ValueError(f"rank must be non-negative, got {k}")
    if k > MAX_RANK:
        raise ValueError(f"rank {k} exceeds the supported maximum {MAX_RANK}")


@dataclass(frozen=True, order=True)
class Character:
    k: int
    mask: int

    def __post_init__(self):
        _check_rank(self.k)
        if not 0 <= self.mask < (1 << self.k) and not (self.k == 0 and self.mask == 0):
            raise ValueError(f"mask {self.mask} does not fit rank {self.k}")

    @classmethod
    def from_bits(cls, bits: Sequence[int]) -> Character:
        mask = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bits must be 0/1, got {b!r}")
            mask = (mask << 1) | b
        return cls(len(bits), mask)

    @classmethod
    def basis(cls, k: int, j: int) -> Character:
        """The generator eps_j (1-based) as a character of rank k."""
        if not 1 <= j <= k:
            raise IndexError(f"factor index {j} out of range 1..{k}")
        return cls(k, 1 << (k - j))

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> (self.k - j)) & 1 for j in range(1, self.k + 1))

    @property
    def weight(self) -> int:
        return bin(self.mask).count("1")

    def __str__(self) -> str:
        return render(self)


def render(alpha: Character) -> str:
    return format(alpha.mask, f"0{alpha.k}b") if alpha.k else ""


def parse_character(text: str, k: int) -> Character:
    _check_rank(k)
    if len(text) != k:
        raise ParseError(f"character {text!r} has length {len(text)}, expected {k}")
    if any(c not in "01" for c in text):
        raise ParseError(f"character {text!r} may only contain '0' and '1'")
    return Character(k, int(text, 2) if text else 0)


def pairing(alpha: Character, j: int) -> int:
    """<alpha, eps_j> for a 1-based factor index j."""
    if not 1 <= j <= alpha.k:
        raise IndexError(f"factor index {j} out of range 1..{alpha.k}")
    return (alpha.mask >> (alpha.k - j)) & 1


def forget_mask(mask: int, k: int, i: int) -> int:
    shift = k - i
    return ((mask >> (shift + 1)) << shift) | (mask & ((1 << shift) - 1))


def project_forget(alpha: Character, i: int) -> Character:
    """Delete coordinate i (1-based), giving a character of rank k-1."""
    if not 1 <= i <= alpha.k:
        raise IndexError(f"factor index {i} out of range 1..{alpha.k}")
    return Character(alpha.k - 1, forget_mask(alpha.mask, alpha.k, i))


@dataclass(frozen=True)
class Representation:
    k: int
    summands: tuple[Character, ...] = ()

    def __post_init__(self):
        _check_rank(self.k)
        object.__setattr__(self, "summands", tuple(self.summands))
        for a in self.summands:
            if a.k != self.k:
                raise ValueError(f"summand {a} has rank {a.k}, representation has rank {self.k}")

    @classmethod
    def from_masks(cls, k: int, masks: Iterable[int]) -> Representation:
        return cls(k, tuple(Character(k, m) for m in masks))

    @property
    def dim(self) -> int:
        return len(self.summands)

    @property
    def masks(self) -> tuple[int, ...]:
        return tuple(a.mask for a in self.summands)

    def __add__(self, other: Representation) -> Representation:
        if other.k != self.k:
            raise ValueError("cannot add representations of different rank")
        return Representation(self.k, self.summands + other.summands)

    def __len__(self) -> int:
        return len(self.summands)

    def __str__(self) -> str:
        return format_alphas(self)


_TOKEN = re.compile(r"^([01]*)(?:\^(\d+))?$")


def parse_alphas(text: str, k: int) -> Representation:
    """Parse a comma separated list such as ``"110^3,011"``."""
    _check_rank(k)
    summands: list[Character] = []
    text = text.strip()
    if not text:
        return Representation(k)
    for token in text.split(","):
        token = token.strip()
        m = _TOKEN.match(token)
        if not m or (not m.group(1) and k > 0):
            raise ParseError(f"malformed character token {token!r}")
        alpha = parse_character(m.group(1), k)
        count = int(m.group(2)) if m.group(2) is not None else 1
        summands.extend([alpha] * count)
    return Representation(k, tuple(summands))


def format_alphas(rep: Representation) -> str:
    """Inverse of parse_alphas; consecutive repeats are folded into ``^m``."""
    parts = []
    i = 0
    s = rep.summands
    while i < len(s):
        j = i
        while j < len(s) and s[j] == s[i]:
            j += 1
        text = render(s[i])
        parts.append(text if j - i == 1 else f"{text}^{j - i}")
        i = j
    return ",".join(parts)


def parse_dims(text: str) -> SphereDims:
    text = text.strip()
    if not text:
        return ()
    try:
        dims = tuple(int(t) for t in text.split(","))
    except ValueError:
        raise ParseError(f"malformed dims {text!r}") from None
    if any(n < 0 for n in dims):
        raise ParseError(f"sphere dimensions must be non-negative: {text!r}")
    _check_rank(len(dims))
    return dims


def gram_representation(k: int) -> Representation:
    """One summand eps_i + eps_j for every pair i < j, in lexicographic pair order."""
    _check_rank(k)
    masks = [(1 << (k - i)) | (1 << (k - j)) for i, j in combinations(range(1, k + 1), 2)]
    return Representation.from_masks(k, masks)


def check_balance(dims: Sequence[int], rep: Representation) -> None:
    if rep.k != len(dims):
        raise DimensionMismatch(
            f"representation has rank {rep.k} but {len(dims)} sphere dimensions were given",
            expected=len(dims), actual=rep.k)
    if any(n < 0 for n in dims):
        raise DimensionMismatch(f"negative sphere dimension in {tuple(dims)}")
    total = sum(dims)
    if rep.dim != total:
        raise DimensionMismatch(
            f"representation has dimension {rep.dim} but the product of spheres has dimension {total}",
            expected=total, actual=rep.dim)


def canonical_key(dims: Sequence[int], rep: Representation | Sequence[int]) -> tuple:
    masks = rep.masks if isinstance(rep, Representation) else tuple(rep)
    return tuple(dims), tuple(sorted(masks))
