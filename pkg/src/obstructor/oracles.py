"""Independent checks for the obstruction engine.

Nothing here calls the recursion except crosscheck_peel_orders, whose
purpose is to run it under many peel orders and compare.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Sequence

import sympy

from .obstruction import (
    MemoTable,
    PeelPolicy,
    _peel,
    _reduce,
    compute_r,
    first_policy,
    last_policy,
    min_weight_policy,
)
from .repcore import Character, Representation, SphereDims, check_balance, gram_representation
from .stiefel import fadell_husseini_target, theorem_main_target


def binom_parity(a: int, b: int) -> int:
    """C(a, b) mod 2: odd iff b and a - b share no binary digit."""
    if a < 0 or b < 0 or b > a:
        return 0
    return int(b & (a - b) == 0)


def diagonal_r_k2(n1: int, n2: int) -> int:
    return binom_parity(n1 + n2, n1)


# --- peel order cross-check -------------------------------------------------

def random_policy(seed: int) -> PeelPolicy:
    rng = random.Random(seed)
    return lambda masks: rng.randrange(len(masks))


@dataclass
class CrosscheckReport:
    agree: bool
    parity: int | None
    policies: dict[str, int] = field(default_factory=dict)
    exhaustive: bool = False
    states_checked: int = 0
    partial: bool = False


class _BudgetExhausted(Exception):
    pass


def _all_choices_parity(dims, masks, seen: dict, counter: list, budget: int) -> int:
    """Value of a problem, checking that every distinct peel choice agrees.

    Raises ValueError on disagreement.  Each (state, choice) pair costs one
    unit of budget.
    """
    if 0 in dims:
        dims, masks = _reduce(dims, masks)
    if not dims:
        return 1
    key = (dims, tuple(sorted(masks)))
    if key in seen:
        return seen[key]
    values = set()
    for alpha in sorted(set(masks)):
        counter[0] += 1
        if counter[0] > budget:
            raise _BudgetExhausted
        pos = masks.index(alpha)
        v = 0
        for d, m in _peel(dims, masks, pos):
            v ^= _all_choices_parity(d, m, seen, counter, budget)
        values.add(v)
    if len(values) != 1:
        raise ValueError(f"peel choices disagree on {key}")
    (value,) = values
    seen[key] = value
    return value


def crosscheck_peel_orders(
    dims: Sequence[int], rep: Representation, budget: int = 100_000, random_orders: int = 4, seed: int = 0
) -> CrosscheckReport:
    dims = tuple(dims)
    check_balance(dims, rep)
    policies: dict[str, PeelPolicy] = {
        "first": first_policy,
        "last": last_policy,
        "min-weight": min_weight_policy,
    }
    for i in range(random_orders):
        policies[f"random-{seed + i}"] = random_policy(seed + i)
    report = CrosscheckReport(agree=True, parity=None)
    for name, policy in policies.items():
        report.policies[name] = compute_r(dims, rep, memo=MemoTable(), policy=policy).parity
    counter = [0]
    try:
        report.policies["exhaustive"] = _all_choices_parity(dims, rep.masks, {}, counter, budget)
        report.exhaustive = True
    except _BudgetExhausted:
        report.partial = True
    except ValueError:
        report.exhaustive = True
        report.agree = False
    report.states_checked = min(counter[0], budget)
    values = set(report.policies.values())
    report.agree = report.agree and len(values) == 1
    report.parity = values.pop() if len(values) == 1 else None
    return report


# --- explicit Gram witness --------------------------------------------------

@dataclass(frozen=True)
class ZeroCount:
    total: int
    per_fundamental_domain: int


def gram_zero_set(k: int) -> list[tuple[sympy.Matrix, ...]]:
    """All zeros of (x_1..x_k) -> (<x_i, x_j>)_{i<j} on S^{k-1} x ... x S^0.

    Factor i is the unit sphere of span(e_1..e_{k-i+1}) in R^k.  Factors are
    solved from S^0 upward: each new vector must be a unit vector in its
    subspace orthogonal to all vectors already fixed, which is computed as an
    exact nullspace.  The solution set must be finite at each stage.
    """
    if k < 2:
        raise ValueError(f"the Gram witness needs k >= 2, got {k}")
    partial: list[tuple[sympy.Matrix, ...]] = [()]
    for i in range(k, 0, -1):
        d = k - i + 1
        grown = []
        for chosen in partial:
            if chosen:
                constraints = sympy.Matrix([list(v[:d]) for v in chosen])
                basis = constraints.nullspace()
            else:
                basis = [sympy.eye(d)[:, c] for c in range(d)]
            if len(basis) != 1:
                raise ValueError(f"zero set is not isolated at factor {i} (solution space of dim {len(basis)})")
            v = basis[0]
            v = v / sympy.sqrt(v.dot(v))
            for sign in (1, -1):
                full = sympy.Matrix.vstack(sign * v, sympy.zeros(k - d, 1))
                grown.append((full,) + chosen)
        partial = grown
    return partial


def count_gram_zeros(k: int) -> ZeroCount:
    zeros = gram_zero_set(k)
    in_domain = 0
    for xs in zeros:
        for i, x in enumerate(xs, start=1):
            assert sympy.simplify(x.dot(x)) == 1
            for y in xs[i:]:
                assert sympy.simplify(x.dot(y)) == 0
        # upper hemisphere: last coordinate of the factor's own subspace
        tops = [x[k - i] for i, x in enumerate(xs, start=1)]
        if any(t == 0 for t in tops):
            raise ValueError("a zero lies on the boundary of the fundamental domain")
        if all(t > 0 for t in tops):
            in_domain += 1
    return ZeroCount(len(zeros), in_domain)


# --- reference families ---------------------------------------------------

FAMILIES = ("classical_bu", "diagonal_k2", "reduction", "mani", "theorem_main", "corollary_main", "section3_example")


def _repeat(k: int, masks: Sequence[int], times: int) -> Representation:
    return Representation.from_masks(k, list(masks) * times)


def family_instance(name: str, params: Sequence[int] | int) -> tuple[SphereDims, Representation]:
    p = (params,) if isinstance(params, int) else tuple(params)
    if name == "classical_bu":
        k = len(p)
        summands = []
        for j, n in enumerate(p, start=1):
            summands += [Character.basis(k, j)] * n
        return p, Representation(k, tuple(summands))
    if name == "diagonal_k2":
        n1, n2 = p
        return (n1, n2), _repeat(2, [0b11], n1 + n2)
    if name == "reduction":
        (k,) = p
        return tuple(range(k - 1, -1, -1)), gram_representation(k)
    if name == "mani":
        (t,) = p
        return (3 * 2**t - 1, 3 * 2**t - 2), _repeat(2, [0b10, 0b01, 0b11], 2 ** (t + 1) - 1)
    if name == "theorem_main":
        n, k = p
        return (n - 1,) * k, theorem_main_target(n, k) + gram_representation(k)
    if name == "corollary_main":
        n, k = p
        return tuple(range(n - k, n)), fadell_husseini_target(n, k) + gram_representation(k)
    if name == "section3_example":
        (n,) = p
        return (n - 1, n - 2), _repeat(2, [0b11], 2 * n - 4) + gram_representation(2)
    raise KeyError(f"unknown family {name!r}")


def family_value(name: str, params: Sequence[int] | int) -> int:
    """The parity asserted for a family instance, without running the recursion."""
    p = (params,) if isinstance(params, int) else tuple(params)
    if name == "diagonal_k2":
        return diagonal_r_k2(*p)
    if name == "section3_example":
        (n,) = p
        return binom_parity(2 * n - 3, n - 1)
    if name in FAMILIES:
        family_instance(name, p)  # validates params
        return 1
    raise KeyError(f"unknown family {name!r}")


def family_params(name: str, bound: int) -> list[tuple[int, ...]]:
    """Parameter range used by the table command."""
    if name == "classical_bu":
        return [(n,) for n in range(1, bound + 1)]
    if name == "diagonal_k2":
        return [(n1, s - n1) for s in range(bound + 1) for n1 in range(s, -1, -1)]
    if name == "reduction":
        return [(k,) for k in range(2, bound + 1)]
    if name == "mani":
        return [(t,) for t in range(bound + 1)]
    if name in ("theorem_main", "corollary_main"):
        return [(n, k) for n in range(2, bound + 1) for k in range(2, n + 1)]
    if name == "section3_example":
        out = []
        p = 2
        while p + 1 <= bound:
            out.append((p + 1,))
            p *= 2
        return out
    raise KeyError(f"unknown family {name!r}")


__all__ = [
    "CrosscheckReport",
    "FAMILIES",
    "ZeroCount",
    "binom_parity",
    "count_gram_zeros",
    "crosscheck_peel_orders",
    "diagonal_r_k2",
    "family_instance",
    "family_params",
    "family_value",
    "gram_zero_set",
    "random_policy",
]
