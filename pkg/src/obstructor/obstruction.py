"""Memoized evaluation of the mod-2 obstruction r(n_1, ..., n_k; V).

The recursion peels one summand alpha at a time::

    r(n; V + V_alpha) = sum_j <alpha, eps_j> r(n - e_j; V)   (mod 2)

after first forgetting every factor with n_i = 0.  The empty problem
(k = 0) has parity 1.
"""

from __future__ import annotations

import enum
import os
import threading
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterator, Sequence

from .repcore import (
    Character,
    Representation,
    SphereDims,
    canonical_key,
    check_balance,
    forget_mask,
    parse_character,
    render,
)

CACHE_HEADER = "obstructor-cache v1"

# policy(masks) -> 0-based position of the summand to peel
PeelPolicy = Callable[[Sequence[int]], int]


class CacheFormatError(ValueError):
    pass


class MemoTable:
    """Parity cache keyed by canonical_key; safe for concurrent threads."""

    def __init__(self):
        self._data: dict[tuple, int] = {}
        self._lock = threading.Lock()

    def get(self, key):
        return self._data.get(key)

    def put(self, key, parity: int) -> None:
        with self._lock:
            old = self._data.setdefault(key, parity)
        if old != parity:
            raise RuntimeError(f"conflicting parities cached for {key}")

    def merge(self, items) -> None:
        for key, parity in items:
            self.put(key, parity)

    def items(self) -> list[tuple[tuple, int]]:
        with self._lock:
            return list(self._data.items())

    def clear(self) -> None:
        with self._lock:
            self._data.clear()

    def __len__(self) -> int:
        return len(self._data)

    def __contains__(self, key) -> bool:
        return key in self._data

    def save(self, path: str | os.PathLike) -> None:
        lines = [CACHE_HEADER]
        for (dims, masks), parity in sorted(self.items()):
            k = len(dims)
            alphas = ",".join(format(m, f"0{k}b") if k else "" for m in masks)
            lines.append(f"{k};{','.join(map(str, dims))};{alphas};{parity}")
        tmp = Path(f"{path}.tmp")
        tmp.write_text("\n".join(lines) + "\n")
        os.replace(tmp, path)

    def load(self, path: str | os.PathLike) -> int:
        """Merge records from a cache file; returns the number of records read.

        The file is fully validated before anything is merged.
        """
        text = Path(path).read_text()
        lines = text.splitlines()
        if not lines or lines[0].strip() != CACHE_HEADER:
            raise CacheFormatError(f"{path}: missing header {CACHE_HEADER!r}")
        records = []
        for lineno, line in enumerate(lines[1:], start=2):
            if not line.strip():
                continue
            records.append(_parse_record(line, f"{path}:{lineno}"))
        self.merge(records)
        return len(records)


def _parse_record(line: str, where: str):
    fields = line.strip().split(";")
    if len(fields) != 4:
        raise CacheFormatError(f"{where}: expected 4 fields, got {len(fields)}")
    k_text, dims_text, alphas_text, parity_text = fields
    try:
        k = int(k_text)
        dims = tuple(int(t) for t in dims_text.split(",")) if dims_text else ()
        alphas = tuple(parse_character(t, k).mask for t in alphas_text.split(",")) if alphas_text else ()
    except ValueError as exc:
        raise CacheFormatError(f"{where}: {exc}") from None
    if len(dims) != k or any(n < 0 for n in dims):
        raise CacheFormatError(f"{where}: dims do not match k={k}")
    if len(alphas) != sum(dims):
        raise CacheFormatError(f"{where}: dimension balance violated")
    if list(alphas) != sorted(alphas):
        raise CacheFormatError(f"{where}: characters are not in canonical order")
    if parity_text not in ("0", "1"):
        raise CacheFormatError(f"{where}: parity must be 0 or 1")
    return (dims, alphas), int(parity_text)


DEFAULT_MEMO = MemoTable()


class Rule(str, enum.Enum):
    BASE = "BASE"
    REDUCE_ZERO_FACTOR = "REDUCE_ZERO_FACTOR"
    PEEL = "PEEL"
    FASTPATH_EQ2 = "FASTPATH_EQ2"


@dataclass
class DerivationNode:
    dims: SphereDims
    rep: Representation
    rule: Rule
    parity: int
    peeled: int | None = None  # 1-based summand position
    children: list[DerivationNode] = field(default_factory=list)

    def to_dict(self) -> dict:
        d = {
            "rule": self.rule.value,
            "dims": list(self.dims),
            "alphas": [render(a) for a in self.rep.summands],
            "parity": self.parity,
        }
        if self.peeled is not None:
            d["peeled"] = self.peeled
        d["children"] = [c.to_dict() for c in self.children]
        return d

    def walk(self) -> Iterator[DerivationNode]:
        yield self
        for c in self.children:
            yield from c.walk()

    def render_tree(self, indent: str = "  ") -> str:
        lines: list[str] = []

        def visit(node: DerivationNode, depth: int) -> None:
            dims = ",".join(map(str, node.dims))
            alphas = ",".join(render(a) for a in node.rep.summands)
            tag = node.rule.value
            if node.peeled is not None:
                tag += f" #{node.peeled}"
            lines.append(f"{indent * depth}{tag} r({dims}; [{alphas}]) = {node.parity}")
            for c in node.children:
                visit(c, depth + 1)

        visit(self, 0)
        return "\n".join(lines)


@dataclass
class ObstructionResult:
    parity: int
    certificate: DerivationNode | None = None


def min_weight_policy(masks: Sequence[int]) -> int:
    best = 0
    best_w = None
    for i, m in enumerate(masks):
        w = bin(m).count("1")
        if best_w is None or w < best_w:
            best, best_w = i, w
            if w <= 1:
                break
    return best


def first_policy(masks: Sequence[int]) -> int:
    return 0


def last_policy(masks: Sequence[int]) -> int:
    return len(masks) - 1


def choose_peel(rep: Representation) -> int:
    """1-based position of a minimal-weight summand (lowest position on ties)."""
    if not rep.summands:
        raise ValueError("cannot choose a summand of an empty representation")
    return min_weight_policy(rep.masks) + 1


def _reduce(dims: tuple[int, ...], masks: tuple[int, ...]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    k = len(dims)
    # delete from the right so earlier indices stay valid
    for i in range(k, 0, -1):
        if dims[i - 1] == 0:
            masks = tuple(forget_mask(m, k, i) for m in masks)
            dims = dims[: i - 1] + dims[i:]
            k -= 1
    return dims, masks


def reduce_zero_factors(dims: Sequence[int], rep: Representation) -> tuple[SphereDims, Representation]:
    if rep.k != len(dims):
        raise ValueError("rank of representation does not match number of factors")
    new_dims, masks = _reduce(tuple(dims), rep.masks)
    return new_dims, Representation.from_masks(len(new_dims), masks)


def _peel(dims: tuple[int, ...], masks: tuple[int, ...], pos: int):
    k = len(dims)
    alpha = masks[pos]
    rest = masks[:pos] + masks[pos + 1:]
    out = []
    for j in range(1, k + 1):
        if (alpha >> (k - j)) & 1:
            out.append((dims[: j - 1] + (dims[j - 1] - 1,) + dims[j:], rest))
    return out


def peel(dims: Sequence[int], rep: Representation, index: int) -> list[tuple[int, SphereDims, Representation]]:
    """Subproblems of one recursion step, as (weight bit, dims, rep) triples.

    Only terms with weight bit 1 are returned; the list is empty for the
    zero character.  ``index`` is 1-based.
    """
    dims = tuple(dims)
    if rep.k != len(dims) or any(n < 1 for n in dims):
        raise AssertionError(f"peel requires all dims >= 1 and matching rank, got {dims}")
    if not 1 <= index <= rep.dim:
        raise AssertionError(f"peel index {index} out of range 1..{rep.dim}")
    return [(1, d, Representation.from_masks(rep.k, m)) for d, m in _peel(dims, rep.masks, index - 1)]


class _Evaluator:
    def __init__(self, memo: MemoTable | None, policy: PeelPolicy):
        self.memo = memo
        self.policy = policy

    def parity(self, dims: tuple[int, ...], masks: tuple[int, ...]) -> int:
        if 0 in dims:
            dims, masks = _reduce(dims, masks)
        if not dims:
            return 1
        key = (dims, tuple(sorted(masks))) if self.memo is not None else None
        if key is not None:
            hit = self.memo.get(key)
            if hit is not None:
                return hit
        total = 0
        for sub_dims, sub_masks in _peel(dims, masks, self.policy(masks)):
            total ^= self.parity(sub_dims, sub_masks)
        if key is not None:
            self.memo.put(key, total)
        return total

    def certificate(self, dims: tuple[int, ...], masks: tuple[int, ...], shared: dict) -> DerivationNode:
        exact = (dims, masks)
        if exact in shared:
            return shared[exact]
        k = len(dims)
        rep = Representation.from_masks(k, masks)
        if 0 in dims:
            child = self.certificate(*_reduce(dims, masks), shared)
            node = DerivationNode(dims, rep, Rule.REDUCE_ZERO_FACTOR, child.parity, children=[child])
        elif not dims:
            node = DerivationNode(dims, rep, Rule.BASE, 1)
        else:
            pos = self.policy(masks)
            children = [self.certificate(d, m, shared) for d, m in _peel(dims, masks, pos)]
            parity = 0
            for c in children:
                parity ^= c.parity
            rule = Rule.FASTPATH_EQ2 if bin(masks[pos]).count("1") == 1 else Rule.PEEL
            node = DerivationNode(dims, rep, rule, parity, peeled=pos + 1, children=children)
        shared[exact] = node
        return node


def compute_r(
    dims: Sequence[int],
    rep: Representation,
    want_certificate: bool = False,
    *,
    memo: MemoTable | None = DEFAULT_MEMO,
    policy: PeelPolicy = min_weight_policy,
) -> ObstructionResult:
    """Parity of r(dims; rep).  Pass ``memo=None`` to disable caching."""
    dims = tuple(dims)
    check_balance(dims, rep)
    ev = _Evaluator(memo, policy)
    if want_certificate:
        cert = ev.certificate(dims, rep.masks, {})
        return ObstructionResult(cert.parity, cert)
    return ObstructionResult(ev.parity(dims, rep.masks))


def r_value(dims: Sequence[int], rep: Representation, **kwargs) -> int:
    return compute_r(dims, rep, **kwargs).parity


def verify_certificate(node: DerivationNode) -> bool:
    """Recheck every step of a certificate without trusting stored parities."""
    dims = tuple(node.dims)
    masks = node.rep.masks
    if node.rule is Rule.BASE:
        return not dims and not masks and node.parity == 1 and not node.children
    if node.rule is Rule.REDUCE_ZERO_FACTOR:
        if 0 not in dims or len(node.children) != 1:
            return False
        child = node.children[0]
        if (tuple(child.dims), child.rep.masks) != _reduce(dims, masks):
            return False
        return verify_certificate(child) and node.parity == child.parity
    if not dims or 0 in dims or node.peeled is None or not 1 <= node.peeled <= len(masks):
        return False
    alpha = masks[node.peeled - 1]
    if (node.rule is Rule.FASTPATH_EQ2) != (bin(alpha).count("1") == 1):
        return False
    expected = _peel(dims, masks, node.peeled - 1)
    got = [(tuple(c.dims), c.rep.masks) for c in node.children]
    if got != expected:
        return False
    parity = 0
    for c in node.children:
        if not verify_certificate(c):
            return False
        parity ^= c.parity
    return parity == node.parity


__all__ = [
    "CACHE_HEADER",
    "CacheFormatError",
    "Character",
    "DEFAULT_MEMO",
    "DerivationNode",
    "MemoTable",
    "ObstructionResult",
    "Rule",
    "canonical_key",
    "choose_peel",
    "compute_r",
    "first_policy",
    "last_policy",
    "min_weight_policy",
    "peel",
    "r_value",
    "reduce_zero_factors",
    "verify_certificate",
]
