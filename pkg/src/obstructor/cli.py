"""Command line front end.

Exit codes: 0 success (whatever the parity), 2 bad input, 3 dimension
mismatch, 4 search/table limit exceeded, 5 a table row disagreed with its
oracle.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .obstruction import DEFAULT_MEMO, CacheFormatError, compute_r
from .oracles import (
    FAMILIES,
    count_gram_zeros,
    family_instance,
    family_params,
    family_value,
)
from .repcore import (
    DimensionMismatch,
    ParseError,
    Representation,
    parse_alphas,
    parse_dims,
    render,
)
from .search import DEFAULT_MAX_CANDIDATES, DEFAULT_MAX_TOTAL, SearchLimitExceeded, parallel_map, search
from .stiefel import (
    fadell_husseini_target,
    theorem_main2_check,
    theorem_main_target,
    variety_check,
)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_DIMENSION = 3
EXIT_LIMIT = 4
EXIT_MISMATCH = 5

CACHE_ENV = "OBSTRUCTOR_CACHE"

# largest parameter accepted per table family
TABLE_LIMITS = {
    "classical_bu": 200,
    "diagonal_k2": 64,
    "reduction": 12,
    "mani": 5,
    "theorem_main": 12,
    "corollary_main": 12,
    "section3_example": 1025,
}

ZERO_MSG = "every equivariant map has a zero"
INCONCLUSIVE_MSG = "inconclusive"


class InputError(ValueError):
    pass


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        payload["version"] = __version__
        print(json.dumps(payload, sort_keys=True))
    else:
        print(text)


def _conclusion(parity: int) -> str:
    return ZERO_MSG if parity == 1 else INCONCLUSIVE_MSG


def _alphas_list(rep: Representation) -> list[str]:
    return [render(a) for a in rep.summands]


def cmd_r(args) -> int:
    dims = parse_dims(args.dims)
    rep = parse_alphas(args.alphas, len(dims))
    result = compute_r(dims, rep, want_certificate=args.certificate)
    payload = {
        "command": "r",
        "dims": list(dims),
        "alphas": _alphas_list(rep),
        "parity": result.parity,
        "conclusion": _conclusion(result.parity),
    }
    lines = [f"r({','.join(map(str, dims))}; {rep}) = {result.parity}", _conclusion(result.parity)]
    if result.certificate is not None:
        payload["certificate"] = result.certificate.to_dict()
        lines += ["", result.certificate.render_tree()]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def _verdict_text(v) -> str:
    n = "-" if v.n is None else v.n
    msg = ZERO_MSG if v.condition_parity == 1 else INCONCLUSIVE_MSG
    return "\n".join([
        f"n = {n}, k = {v.k}, m = {v.m}",
        f"sphere dims = ({','.join(map(str, v.dims))})",
        f"condition parity = {v.condition_parity}",
        f"conclusion = {v.conclusion.value} ({msg})",
        f"backing = {v.theorem_backing.value}",
    ])


def _verdict_payload(command: str, v, rep: Representation) -> dict:
    d = v.to_dict()
    d.update(command=command, alphas=_alphas_list(rep), parity=v.condition_parity)
    d["conclusion"] = v.conclusion.value
    return d


def cmd_stiefel(args) -> int:
    n, k = args.n, args.k
    if not 1 <= k <= n:
        raise InputError(f"need 1 <= k <= n, got n={n}, k={k}")
    if args.alphas is not None:
        rep = parse_alphas(args.alphas, k)
    elif args.target == "fh":
        rep = fadell_husseini_target(n, k)
    else:
        rep = theorem_main_target(n, k)
    v = theorem_main2_check(n, k, rep)
    _emit(args, _verdict_payload("stiefel", v, rep), _verdict_text(v))
    return EXIT_OK


def cmd_variety(args) -> int:
    dims = parse_dims(args.dims)
    k = len(dims)
    if args.alphas is not None:
        rep = parse_alphas(args.alphas, k)
    else:
        n = max(dims, default=-1) + 1
        if k == 0 or dims != tuple(range(n - k, n)):
            raise InputError("--target fh needs dims of the form n-k,...,n-1")
        rep = fadell_husseini_target(n, k)
    v = variety_check(dims, rep)
    _emit(args, _verdict_payload("variety", v, rep), _verdict_text(v))
    return EXIT_OK


def cmd_search(args) -> int:
    dims = parse_dims(args.dims)
    k = len(dims)
    alphabet = None
    if args.alphabet is not None:
        alphabet = sorted({a.mask for a in parse_alphas(args.alphabet, k).summands})
    elif args.include_zero:
        alphabet = list(range(1 << k))
    res = search(
        dims, alphabet,
        up_to_symmetry=args.up_to_symmetry, jobs=args.jobs,
        max_total=args.max_total, max_candidates=args.max_candidates,
    )
    fmt = lambda masks: [format(m, f"0{k}b") for m in masks]
    payload = {
        "command": "search",
        "dims": list(dims),
        "alphas": fmt(res.alphabet),
        "up_to_symmetry": args.up_to_symmetry,
        "candidates": res.candidates,
        "results": [fmt(h) for h in res.hits],
    }
    lines = [f"# dims ({','.join(map(str, dims))}), {res.candidates} multisets, {len(res.hits)} with parity 1"]
    lines += ["{" + ",".join(fmt(h)) + "}" for h in res.hits]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK


def cmd_witness(args) -> int:
    k = args.k
    if k < 2:
        raise InputError("witness needs k >= 2")
    zc = count_gram_zeros(k)
    dims, rep = family_instance("reduction", k)
    r = compute_r(dims, rep).parity
    agree = zc.per_fundamental_domain % 2 == r
    payload = {
        "command": "witness",
        "k": k,
        "dims": list(dims),
        "alphas": _alphas_list(rep),
        "total_zeros": zc.total,
        "zeros_per_fundamental_domain": zc.per_fundamental_domain,
        "parity": r,
        "agree": agree,
    }
    text = "\n".join([
        f"Gram map on S^{k - 1} x ... x S^0, k = {k}",
        f"zeros: {zc.total} total, {zc.per_fundamental_domain} per fundamental domain",
        f"r({','.join(map(str, dims))}; gram({k})) = {r}",
        f"agree: {'yes' if agree else 'NO'}",
    ])
    _emit(args, payload, text)
    return EXIT_OK if agree else EXIT_MISMATCH


def _table_row(task: tuple[str, tuple[int, ...]]) -> tuple[int, int]:
    family, params = task
    dims, rep = family_instance(family, params)
    return compute_r(dims, rep).parity, family_value(family, params)


def _sierpinski(rows, bound: int) -> str:
    cell = {p: c for p, (c, _) in rows}
    out = []
    for s in range(bound + 1):
        pad = " " * (bound - s)
        out.append(pad + " ".join("#" if cell[(n1, s - n1)] else "." for n1 in range(s, -1, -1)))
    return "\n".join(out)


def cmd_table(args) -> int:
    family = args.family
    if family not in FAMILIES:
        raise InputError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    if args.max < 0:
        raise InputError("--max must be non-negative")
    if args.max > TABLE_LIMITS[family]:
        raise SearchLimitExceeded(f"--max {args.max} exceeds the limit {TABLE_LIMITS[family]} for {family}")
    params = family_params(family, args.max)
    values = parallel_map(_table_row, [(family, p) for p in params], args.jobs)
    rows = list(zip(params, values))
    ok = all(c == o for _, (c, o) in rows)
    payload = {
        "command": "table",
        "family": family,
        "max": args.max,
        "rows": [{"params": list(p), "computed": c, "oracle": o, "match": c == o} for p, (c, o) in rows],
        "all_match": ok,
    }
    lines = [f"{'params':<16}{'computed':>9}{'oracle':>8}  match"]
    for p, (c, o) in rows:
        lines.append(f"{','.join(map(str, p)):<16}{c:>9}{o:>8}  {'yes' if c == o else 'NO'}")
    if args.grid and family == "diagonal_k2":
        lines += ["", _sierpinski(rows, args.max)]
    _emit(args, payload, "\n".join(lines))
    return EXIT_OK if ok else EXIT_MISMATCH


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="emit one JSON object")
    common.add_argument("--cache", help=f"memo cache file (default: ${CACHE_ENV})")
    common.add_argument("--no-cache", action="store_true", help="ignore any cache file")
    common.add_argument("--jobs", type=int, default=1, help="worker processes")

    parser = argparse.ArgumentParser(prog="obstructor", description="mod-2 Borsuk-Ulam obstruction calculator")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("r", parents=[common], help="compute r(n_1..n_k; V)")
    p.add_argument("--dims", required=True, help="comma separated sphere dimensions, e.g. 2,1,0")
    p.add_argument("--alphas", required=True, help="characters, e.g. 110,101,011 or 11^3")
    p.add_argument("--certificate", action="store_true", help="print the derivation tree")
    p.set_defaults(func=cmd_r)

    p = sub.add_parser("stiefel", parents=[common], help="check maps V_{n,k} -> S(V)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--target", choices=["main", "fh"], default="main")
    g.add_argument("--alphas")
    p.set_defaults(func=cmd_stiefel)

    p = sub.add_parser("variety", parents=[common], help="check maps from an orthogonality variety")
    p.add_argument("--dims", required=True, help="sphere dimensions m_1..m_k")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alphas")
    g.add_argument("--target", choices=["fh"])
    p.set_defaults(func=cmd_variety)

    p = sub.add_parser("search", parents=[common], help="enumerate representations with r = 1")
    p.add_argument("--dims", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--alphabet", help="restrict to these characters")
    g.add_argument("--include-zero", action="store_true", help="allow the trivial character")
    p.add_argument("--up-to-symmetry", action="store_true",
                   help="one representative per orbit of factor permutations fixing dims")
    p.add_argument("--max-total", type=int, default=DEFAULT_MAX_TOTAL)
    p.add_argument("--max-candidates", type=int, default=DEFAULT_MAX_CANDIDATES)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("witness", parents=[common], help="zeros of the explicit Gram map")
    p.add_argument("--k", type=int, required=True)
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("table", parents=[common], help="compare a family against its closed form")
    p.add_argument("--family", required=True)
    p.add_argument("--max", type=int, required=True, help="range bound (meaning depends on family)")
    p.add_argument("--grid", action="store_true", help="also draw diagonal_k2 as a triangle")
    p.set_defaults(func=cmd_table)
    return parser


def _cache_path(args) -> Path | None:
    if args.no_cache:
        return None
    path = args.cache or os.environ.get(CACHE_ENV)
    return Path(path) if path else None


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.jobs < 1:
        print("error: --jobs must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    cache = _cache_path(args)
    try:
        if cache is not None and cache.exists():
            DEFAULT_MEMO.load(cache)
        code = args.func(args)
    except CacheFormatError as exc:
        print(f"error: bad cache file: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DimensionMismatch as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except SearchLimitExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (ParseError, InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if cache is not None:
        DEFAULT_MEMO.save(cache)
    return code


if __name__ == "__main__":
    sys.exit(main())
