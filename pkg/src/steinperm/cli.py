"""Command-line interface.

Subcommands:

* ``verify``  -- run the exact identity suite for one statistic at one n
* ``example`` -- reproduce the built-in worked example (n = 7, position 3)
* ``dist``    -- exact integer distribution of a statistic
* ``rate``    -- normal-approximation rate table over a list of n
* ``bounds``  -- bound ingredients and bound values, exact or Monte Carlo
* ``sample``  -- draw reproducible samples of the exchangeable pair

Exit codes: 0 on success (and all checks passing), 1 when a check
fails, 2 on usage or input errors.  Output is JSON by default (CSV
where tabular), deterministic for a fixed configuration including the
seed.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

import numpy as np

from . import _sn, analysis, exact_dist, exchangeability, stein_bounds
from .chain import move_to_end, sample_pair, unit_step_check
from .exchangeability import (
    builtin_phi,
    check_conditions,
    is_exchangeable,
    lambda_map,
    theta,
)
from .perm_core import (
    DEFAULT_ENUM_LIMIT,
    EnumerationLimitError,
    MatrixFormatError,
    Permutation,
    StatisticKind,
    StatisticSpec,
    custom_spec,
    descent_count,
    format_rational,
    load_matrix_file,
    spec_for,
    variance_formula,
    x_stat,
)


class UsageError(Exception):
    """Bad flag combinations or malformed input files (exit code 2)."""


# ---------------------------------------------------------------- output

def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)


def _emit_json(obj, out_path: str | None) -> None:
    _emit(json.dumps(obj, indent=2, sort_keys=True) + "\n", out_path)


def _warn(text: str) -> None:
    sys.stderr.write(f"warning: {text}\n")


# ------------------------------------------------------------- selection

def _selected_spec(args, need_n: bool = True) -> StatisticSpec:
    """Build the statistic from --stat/--n or from --matrix."""
    if args.matrix is not None:
        matrix = load_matrix_file(args.matrix)
        if getattr(args, "n", None) is not None and args.n != matrix.n:
            raise UsageError(f"--n {args.n} disagrees with the {matrix.n}x{matrix.n} matrix")
        return custom_spec(matrix)
    if args.stat is None:
        raise UsageError("select a statistic with --stat or --matrix")
    if need_n and getattr(args, "n", None) is None:
        raise UsageError("--stat needs --n")
    return spec_for(args.stat, args.n)


def _enum_limit(args) -> int | None:
    limit = getattr(args, "enum_limit", None)
    if limit is not None and limit > DEFAULT_ENUM_LIMIT:
        _warn(
            f"enumeration limit raised to {limit}; a full sweep visits {limit}! "
            "permutations and may run very long"
        )
    return limit


# ---------------------------------------------------------------- verify

def _run_checks(spec: StatisticSpec, limit: int | None) -> list[tuple[str, bool]]:
    """The exact identity suite behind ``verify``."""
    m = spec.matrix
    n = spec.n
    var = variance_formula(m).variance
    if var <= 0:
        raise UsageError("statistic has zero variance; nothing to verify on the W scale")
    mint, scale = _sn.integer_matrix(m)

    ok_delta = True
    ok_drift = True
    sum_x = 0
    sum_x2 = 0
    sum_d2 = 0
    for perms in _sn.chunks(n, _sn.checked_chunk_size(n, mint)):
        inner = _sn.inner_sums(perms, mint)
        x = inner.sum(axis=1)
        d = -2 * inner
        for i in range(n):
            xm = _sn.inner_sums(_sn.moved(perms, i), mint).sum(axis=1)
            if not np.array_equal(xm, x + d[:, i]):
                ok_delta = False
        if not np.array_equal(d.sum(axis=1), -2 * x):
            ok_drift = False
        sum_x += int(x.sum())
        sum_x2 += int((x * x).sum())
        sum_d2 += int((d * d).sum())
    nfact = math.factorial(n)
    mean = Fraction(sum_x, nfact * scale)
    bf_var = Fraction(sum_x2, nfact * scale**2) - mean * mean

    checks = [
        ("statistic_delta_consistency", ok_delta),
        ("drift_identity", ok_drift),
        ("variance_formula_vs_enumeration", mean == 0 and bf_var == var),
        ("pair_second_moment_identity", Fraction(sum_d2, scale**2) == 4 * nfact * var),
        ("pair_exchangeable", is_exchangeable(m, n, limit)),
    ]

    ing = stein_bounds.ingredients_exact(spec, limit)
    checks.append(("normalized_second_moment_is_4_over_n", ing.e_diff_sq_w == Fraction(4, n)))
    checks.append(("conditional_variance_order", ing.var_cond_w_w <= ing.var_cond_pi_w))
    checks.append(
        ("third_moment_jensen_floor", ing.e_abs_diff_cubed_x**2 * n**3 >= 64 * var**3)
    )

    if spec.kind in (StatisticKind.DESCENTS, StatisticKind.INVERSIONS):
        ok_theta = True
        universe = range(1, n + 1)
        for mask in range(1, 1 << n):
            s = tuple(v for v in universe if mask >> (v - 1) & 1)
            th = theta(spec, s)
            if not check_conditions(m, s, th, phis=lambda i, s=s: builtin_phi(spec, s, i)):
                ok_theta = False
        checks.append(("flip_bijection_conditions", ok_theta))

        ok_lambda = True
        for perms in _sn.chunks(n):
            for row in perms.tolist():
                p = Permutation(tuple(v + 1 for v in row))
                xp_val = x_stat(spec, p)
                for i in range(1, n + 1):
                    lam_p = lambda_map(spec, p, i)
                    if x_stat(spec, lam_p) != x_stat(spec, move_to_end(p, i)):
                        ok_lambda = False
                    if x_stat(spec, move_to_end(lam_p, i)) != xp_val:
                        ok_lambda = False
        checks.append(("relabeling_swaps_pair_values", ok_lambda))

    if spec.kind is StatisticKind.DESCENTS:
        checks.append(("descent_unit_step", unit_step_check(n, limit)))
    return checks


def cmd_verify(args) -> int:
    spec = _selected_spec(args)
    limit = _enum_limit(args)
    checks = _run_checks(spec, limit)
    report = {
        "n": spec.n,
        "statistic": spec.kind.value,
        "checks": [{"name": name, "pass": ok} for name, ok in checks],
        "all_pass": all(ok for _, ok in checks),
    }
    _emit_json(report, args.out)
    return 0 if report["all_pass"] else 1


# --------------------------------------------------------------- example

_EXAMPLE_PI = (6, 4, 1, 5, 3, 2, 7)
_EXAMPLE_POSITION = 3
_EXAMPLE_PI_PRIME = (6, 4, 5, 3, 2, 7, 1)
_EXAMPLE_EXPECTED = {
    "descents": {
        "lambda_pi": (6, 4, 3, 5, 2, 1, 7),
        "lambda_pi_then_move": (6, 4, 5, 2, 1, 7, 3),
        "x_pi": 0,
        "x_pi_prime": 2,
    },
    "inversions": {
        "lambda_pi": (6, 4, 7, 3, 2, 1, 5),
        "lambda_pi_then_move": (6, 4, 3, 2, 1, 5, 7),
        "x_pi": 1,
        "x_pi_prime": 9,
    },
}


def cmd_example(args) -> int:
    p = Permutation(_EXAMPLE_PI)
    i = _EXAMPLE_POSITION
    p_prime = move_to_end(p, i)
    report = {
        "pi": list(_EXAMPLE_PI),
        "position": i,
        "pi_prime": list(p_prime.image),
    }
    ok = p_prime.image == _EXAMPLE_PI_PRIME
    for kind in (StatisticKind.DESCENTS, StatisticKind.INVERSIONS):
        spec = spec_for(kind, 7)
        expected = _EXAMPLE_EXPECTED[kind.value]
        lam_p = lambda_map(spec, p, i)
        lam_then_move = move_to_end(lam_p, i)
        block = {
            "lambda_pi": list(lam_p.image),
            "lambda_pi_then_move": list(lam_then_move.image),
            "x_pi": str(x_stat(spec, p)),
            "x_pi_prime": str(x_stat(spec, p_prime)),
        }
        report[kind.value] = block
        ok = ok and lam_p.image == expected["lambda_pi"]
        ok = ok and lam_then_move.image == expected["lambda_pi_then_move"]
        ok = ok and x_stat(spec, p) == expected["x_pi"]
        ok = ok and x_stat(spec, p_prime) == expected["x_pi_prime"]
        ok = ok and x_stat(spec, lam_p) == expected["x_pi_prime"]
        ok = ok and x_stat(spec, lam_then_move) == expected["x_pi"]
    report["all_match"] = ok
    _emit_json(report, args.out)
    return 0 if ok else 1


# ------------------------------------------------------------------ dist

def cmd_dist(args) -> int:
    if args.matrix is not None:
        spec = _selected_spec(args)
        dist = exact_dist.generic_distribution(spec.matrix, _enum_limit(args))
    else:
        if args.stat is None or args.n is None:
            raise UsageError("dist needs --stat with --n, or --matrix")
        cap = args.cap
        if args.stat == "descents":
            default_cap = exact_dist.EULERIAN_CAP
            dist = exact_dist.eulerian_distribution(args.n, cap or default_cap)
        else:
            default_cap = exact_dist.MAHONIAN_CAP
            dist = exact_dist.mahonian_distribution(args.n, cap or default_cap)
        if cap is not None and cap > default_cap:
            _warn(f"cap raised to {cap}; large n may take minutes and much memory")
    if args.format == "csv":
        lines = ["value,count"]
        lines += [f"{v},{c}" for v, c in dist.support()]
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit_json(exact_dist.dist_to_json_dict(dist), args.out)
    return 0


# ------------------------------------------------------------------ rate

def cmd_rate(args) -> int:
    if args.stat is None:
        raise UsageError("rate needs --stat (built-in statistics only)")
    n_list = _parse_n_list(args.n_list)
    kind = StatisticKind(args.stat)
    rows = analysis.rate_table(kind, n_list)
    if args.format == "csv":
        _emit(analysis.rate_table_csv(rows), args.out)
    else:
        _emit_json([analysis.rate_row_to_json_dict(r) for r in rows], args.out)
    return 0


# ---------------------------------------------------------------- bounds

def cmd_bounds(args) -> int:
    spec = _selected_spec(args)
    if args.mode == "exact":
        ing = stein_bounds.ingredients_exact(spec, _enum_limit(args))
    else:
        if args.seed is None:
            raise UsageError("Monte Carlo mode needs --seed")
        if args.trials is None:
            raise UsageError("Monte Carlo mode needs --trials")
        ing = stein_bounds.ingredients_mc(spec, args.trials, args.seed)
    rep = stein_bounds.bound_report(ing)
    report = {
        "statistic": spec.kind.value,
        "ingredients": stein_bounds.ingredients_to_json_dict(ing),
        "report": stein_bounds.report_to_json_dict(rep),
    }
    _emit_json(report, args.out)
    return 0


# ---------------------------------------------------------------- sample

def cmd_sample(args) -> int:
    spec = _selected_spec(args)
    if args.seed is None:
        raise UsageError("sample needs --seed")
    rng = np.random.Generator(np.random.PCG64(args.seed))
    samples = [sample_pair(spec, rng) for _ in range(args.trials)]
    if args.format == "csv":
        lines = ["x,x_prime,w,w_prime,position"]
        for s in samples:
            lines.append(
                f"{format_rational(s.x)},{format_rational(s.x_prime)},"
                f"{s.w!r},{s.w_prime!r},{s.position}"
            )
        _emit("\n".join(lines) + "\n", args.out)
    else:
        _emit_json(
            [
                {
                    "x": format_rational(s.x),
                    "x_prime": format_rational(s.x_prime),
                    "w": s.w,
                    "w_prime": s.w_prime,
                    "position": s.position,
                }
                for s in samples
            ],
            args.out,
        )
    return 0


# ----------------------------------------------------------------- wiring

def _parse_n_list(text: str) -> list[int]:
    try:
        out = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise UsageError(f"bad --n-list {text!r}: {exc}") from exc
    if not out or any(n < 1 for n in out):
        raise UsageError(f"bad --n-list {text!r}: need positive integers")
    return out


def _check_seed(seed: int | None) -> None:
    if seed is not None and not 0 <= seed < 1 << 64:
        raise UsageError("seed must fit in 64 bits")


def _add_selector(sub, need_n: bool = True) -> None:
    group = sub.add_mutually_exclusive_group()
    group.add_argument("--stat", choices=["descents", "inversions"])
    group.add_argument("--matrix", metavar="PATH", help="JSON file with an antisymmetric matrix")
    if need_n:
        sub.add_argument("--n", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="steinperm",
        description="Exact and Monte Carlo analysis of permutation statistics "
        "built from antisymmetric matrices, their exchangeable pair, and "
        "normal-approximation bounds.",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("verify", help="run the exact identity suite")
    _add_selector(sub)
    sub.add_argument("--enum-limit", type=int)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_verify)

    sub = subs.add_parser("example", help="reproduce the built-in worked example")
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_example)

    sub = subs.add_parser("dist", help="exact distribution of a statistic")
    _add_selector(sub)
    sub.add_argument("--cap", type=int, help="override the recurrence size cap")
    sub.add_argument("--enum-limit", type=int)
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_dist)

    sub = subs.add_parser("rate", help="normal-approximation rate table")
    sub.add_argument("--stat", choices=["descents", "inversions"])
    sub.add_argument("--n-list", required=True, help="comma-separated, e.g. 10,20,30")
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_rate)

    sub = subs.add_parser("bounds", help="bound ingredients and bound values")
    _add_selector(sub)
    sub.add_argument("--mode", choices=["exact", "mc"], default="exact")
    sub.add_argument("--trials", type=int)
    sub.add_argument("--seed", type=int)
    sub.add_argument("--enum-limit", type=int)
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_bounds)

    sub = subs.add_parser("sample", help="sample the exchangeable pair")
    _add_selector(sub)
    sub.add_argument("--seed", type=int, required=True)
    sub.add_argument("--trials", type=int, default=1)
    sub.add_argument("--format", choices=["json", "csv"], default="json")
    sub.add_argument("--out")
    sub.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _check_seed(getattr(args, "seed", None))
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (MatrixFormatError, EnumerationLimitError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except (ValueError, OSError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
