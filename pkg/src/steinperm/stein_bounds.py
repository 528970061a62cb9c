"""Ingredients and evaluation of the two normal-approximation bounds.

For the exchangeable pair (W, W') built from one chain step we need:
the regression rate lambda = 2/n, an almost-sure bound A on |W' - W|,
the conditional second moment E[(W'-W)^2 | pi] and its variance over
pi (or over W), and the third absolute moment E|W'-W|^3.  Small n gets
all of them exactly by enumeration; large n gets Monte Carlo estimates
with standard errors.  Two bounds are then evaluated:

* the concentration-inequality bound
    (12/lambda) sqrt(Var(E^W(W'-W)^2)) + 48 A^3/lambda + 8 A^2/sqrt(lambda)

* the original exchangeable-pair bound
    2 sqrt(E[1 - (1/(2 lambda)) E^W(W'-W)^2]^2)
      + (2 pi)^(-1/4) sqrt(E|W'-W|^3 / lambda)

When only Var(E^pi(W'-W)^2) is available it substitutes for the
W-conditioned variance; conditioning on less can only increase the
variance of the conditional expectation, so the bound stays valid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _sn
from .perm_core import (
    StatisticKind,
    StatisticSpec,
    check_enum_limit,
    format_rational,
    spec_for,
    variance_formula,
)

MODE_EXACT = "exact"
MODE_MC = "mc"

A_MAX_ANALYTIC = "analytic"
A_MAX_EXACT = "exact"

_MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class BoundIngredients:
    """Everything the bound formulas consume, for one statistic at one n.

    Moments live on the normalized W scale; ``e_diff_sq_x`` keeps the
    unnormalized E[(X'-X)^2] next to it.  In exact mode the ``*_x``
    rational fields are exact and the float fields are their rounded
    values; in Monte Carlo mode the floats are estimates, the rationals
    other than lam are absent, and each estimate carries a standard
    error.
    """

    n: int
    lam: Fraction
    a_max: float
    e_diff_sq: float
    e_abs_diff_cubed: float
    var_cond_pi: float
    var_cond_w: float | None
    mode: str
    e_diff_sq_x: Fraction | None = None
    e_diff_sq_w: Fraction | None = None
    e_abs_diff_cubed_x: Fraction | None = None
    var_cond_pi_w: Fraction | None = None
    var_cond_w_w: Fraction | None = None
    trials: int | None = None
    seed: int | None = None
    stderr_e_diff_sq: float | None = None
    stderr_e_abs_diff_cubed: float | None = None
    stderr_var_cond_pi: float | None = None


@dataclass(frozen=True)
class BoundReport:
    rr_bound: float
    stein_bound: float
    rr_scaled: float
    stein_scaled: float
    surrogate_used: bool


def a_max(spec: StatisticSpec, mode: str = A_MAX_ANALYTIC, limit: int | None = None) -> float:
    """An almost-sure bound on |W' - W|.

    A chain step flips the orientation of the pairs between one value v
    and an arbitrary subset of the others, so the worst case for the
    analytic mode is twice the larger of the positive and the negative
    part of v's matrix row, over v.  The exact mode enumerates instead,
    and can only be smaller.

    >>> from .perm_core import descents_spec, inversions_spec
    >>> import math
    >>> a_max(descents_spec(7)) == 2 / math.sqrt(8 / 3)
    True
    >>> a_max(inversions_spec(7)) == 12 / math.sqrt(133 / 3)
    True
    """
    var = variance_formula(spec.matrix).variance
    if var <= 0:
        raise ValueError("statistic has zero variance; W is undefined")
    sigma = math.sqrt(var)
    if mode == A_MAX_ANALYTIC:
        worst = Fraction(0)
        for row in spec.matrix.entries:
            pos = sum((e for e in row if e > 0), Fraction(0))
            neg = -sum((e for e in row if e < 0), Fraction(0))
            worst = max(worst, pos, neg)
        return 2 * float(worst) / sigma
    if mode == A_MAX_EXACT:
        n = check_enum_limit(spec.n, limit)
        mint, scale = _sn.integer_matrix(spec.matrix)
        biggest = 0
        for inner in _sn.inner_sum_chunks(n, mint):
            biggest = max(biggest, int(np.abs(inner).max()))
        return 2 * biggest / (scale * sigma)
    raise ValueError(f"unknown a_max mode {mode!r}")


def ingredients_exact(spec: StatisticSpec, limit: int | None = None) -> BoundIngredients:
    """All ingredients by full enumeration of S_n, exactly.

    The W-conditioned variance groups permutations into level sets of
    the exact rational statistic value and averages the pi-conditioned
    second moment within each group.
    """
    var = variance_formula(spec.matrix).variance
    if var <= 0:
        raise ValueError("statistic has zero variance; W is undefined")
    n = check_enum_limit(spec.n, limit)
    mint, scale = _sn.integer_matrix(spec.matrix)
    xbound = int(np.abs(mint).sum()) // 2

    sum_d2 = 0
    sum_abs_d3 = 0
    sum_q = 0
    sum_q2 = 0
    biggest = 0
    count_at = [0] * (2 * xbound + 1)
    sum_q_at = [0] * (2 * xbound + 1)
    for inner in _sn.inner_sum_chunks(n, mint):
        d = -2 * inner
        d2 = d * d
        q = d2.sum(axis=1)
        x = inner.sum(axis=1)
        sum_d2 += int(q.sum())
        sum_abs_d3 += int((np.abs(d) * d2).sum())
        sum_q += int(q.sum())
        sum_q2 += int((q * q).sum())
        biggest = max(biggest, int(np.abs(d).max()))
        cnt = np.bincount(x + xbound, minlength=2 * xbound + 1)
        qsum = np.zeros(2 * xbound + 1, dtype=np.int64)
        np.add.at(qsum, x + xbound, q)
        for k, (c, s) in enumerate(zip(cnt.tolist(), qsum.tolist())):
            if c:
                count_at[k] += c
                sum_q_at[k] += s

    nfact = math.factorial(n)
    e_diff_sq_x = Fraction(sum_d2, nfact * n * scale**2)
    e_diff_sq_w = e_diff_sq_x / var
    e_abs3_x = Fraction(sum_abs_d3, nfact * n * scale**3)
    # E|W'-W|^3 = E|X'-X|^3 / Var(X)^{3/2}, rounded once
    e_abs3_w = math.sqrt(float(e_abs3_x**2 / var**3))

    # c_pi = E[(W'-W)^2 | pi] = q_pi / (n scale^2 Var(X))
    denom = n * scale**2 * var
    mean_c = Fraction(sum_q, nfact) / denom
    mean_c2 = Fraction(sum_q2, nfact) / denom**2
    var_cond_pi_w = mean_c2 - mean_c * mean_c

    level_sq = Fraction(0)
    for c, s in zip(count_at, sum_q_at):
        if c:
            mean_here = Fraction(s, c) / denom
            level_sq += c * mean_here * mean_here
    var_cond_w_w = level_sq / nfact - mean_c * mean_c

    return BoundIngredients(
        n=n,
        lam=Fraction(2, n),
        a_max=biggest / (scale * math.sqrt(var)),
        e_diff_sq=float(e_diff_sq_w),
        e_abs_diff_cubed=e_abs3_w,
        var_cond_pi=float(var_cond_pi_w),
        var_cond_w=float(var_cond_w_w),
        mode=MODE_EXACT,
        e_diff_sq_x=e_diff_sq_x,
        e_diff_sq_w=e_diff_sq_w,
        e_abs_diff_cubed_x=e_abs3_x,
        var_cond_pi_w=var_cond_pi_w,
        var_cond_w_w=var_cond_w_w,
    )


def ingredients_mc(spec: StatisticSpec, trials: int, seed: int) -> BoundIngredients:
    """Monte Carlo ingredients from ``trials`` independent (pi, I) draws.

    Work is split into fixed-size blocks with one child stream each, so
    the result depends only on (trials, seed), not on how blocks are
    scheduled.  E[(W'-W)^2] is estimated by the mean of the exact
    per-permutation conditional second moment (which has smaller
    variance than the raw squared increments); the third moment uses
    the sampled position.
    """
    if trials < 2:
        raise ValueError("need at least 2 trials")
    var = variance_formula(spec.matrix).variance
    if var <= 0:
        raise ValueError("statistic has zero variance; W is undefined")
    n = spec.n
    mint, scale = _sn.integer_matrix(spec.matrix)
    sigma_x = math.sqrt(var) * scale
    c_center = 4.0 / n  # exact mean of c_pi, used to stabilize moments

    n_blocks = (trials + _MC_BLOCK - 1) // _MC_BLOCK
    streams = np.random.SeedSequence(seed).spawn(n_blocks)
    s_abs3: list[float] = []
    s_abs6: list[float] = []
    s_u: list[float] = []
    s_u2: list[float] = []
    s_u3: list[float] = []
    s_u4: list[float] = []
    base = np.tile(np.arange(n, dtype=np.int64), (_MC_BLOCK, 1))
    for b in range(n_blocks):
        m = min(_MC_BLOCK, trials - b * _MC_BLOCK)
        rng = np.random.Generator(np.random.PCG64(streams[b]))
        perms = rng.permuted(base[:m], axis=1)
        inner = _sn.inner_sums(perms, mint)
        pos = rng.integers(0, n, size=m)
        d_w = -2.0 * inner[np.arange(m), pos] / sigma_x
        abs3 = np.abs(d_w) ** 3
        c = 4.0 / n * (inner.astype(np.float64) / sigma_x**2 * inner).sum(axis=1)
        u = c - c_center
        s_abs3.append(float(abs3.sum()))
        s_abs6.append(float((abs3 * abs3).sum()))
        s_u.append(float(u.sum()))
        s_u2.append(float((u * u).sum()))
        s_u3.append(float((u * u * u).sum()))
        s_u4.append(float((u * u * u * u).sum()))

    nt = float(trials)
    m_abs3 = math.fsum(s_abs3) / nt
    m_abs6 = math.fsum(s_abs6) / nt
    mu = math.fsum(s_u) / nt
    mu2 = math.fsum(s_u2) / nt
    mu3 = math.fsum(s_u3) / nt
    mu4 = math.fsum(s_u4) / nt
    # central moments of c from moments about the fixed center
    c2 = mu2 - mu * mu
    c4 = mu4 - 4 * mu * mu3 + 6 * mu * mu * mu2 - 3 * mu**4
    var_c = c2 * nt / (nt - 1)

    return BoundIngredients(
        n=n,
        lam=Fraction(2, n),
        a_max=a_max(spec, A_MAX_ANALYTIC),
        e_diff_sq=c_center + mu,
        e_abs_diff_cubed=m_abs3,
        var_cond_pi=var_c,
        var_cond_w=None,
        mode=MODE_MC,
        trials=trials,
        seed=seed,
        stderr_e_diff_sq=math.sqrt(max(c2, 0.0) / nt),
        stderr_e_abs_diff_cubed=math.sqrt(max(m_abs6 - m_abs3 * m_abs3, 0.0) / nt),
        stderr_var_cond_pi=math.sqrt(max(c4 - c2 * c2, 0.0) / nt),
    )


def _cond_variance(ing: BoundIngredients) -> tuple[float, bool]:
    if ing.var_cond_w is not None:
        return ing.var_cond_w, False
    return ing.var_cond_pi, True


def rr_bound(ing: BoundIngredients) -> float:
    """The concentration-inequality bound on sup_x |P(W <= x) - Phi(x)|."""
    lam = float(ing.lam)
    vc, _ = _cond_variance(ing)
    return 12.0 / lam * math.sqrt(vc) + 48.0 * ing.a_max**3 / lam + 8.0 * ing.a_max**2 / math.sqrt(lam)


def stein_original_bound(ing: BoundIngredients) -> float:
    """The original exchangeable-pair bound.

    The first term is 2 sqrt(E[1 - (1/(2 lambda)) E^W(W'-W)^2]^2); the
    inner random variable has mean exactly 1 because E(W'-W)^2 equals
    2 lambda, so the expectation collapses to the conditional variance
    scaled by (1/(2 lambda))^2.
    """
    lam = float(ing.lam)
    vc, _ = _cond_variance(ing)
    first = 2.0 * math.sqrt(vc / (2.0 * lam) ** 2)
    second = (2.0 * math.pi) ** -0.25 * math.sqrt(ing.e_abs_diff_cubed / lam)
    return first + second


def bound_report(ing: BoundIngredients) -> BoundReport:
    rr = rr_bound(ing)
    st = stein_original_bound(ing)
    _, surrogate = _cond_variance(ing)
    return BoundReport(
        rr_bound=rr,
        stein_bound=st,
        rr_scaled=rr * math.sqrt(ing.n),
        stein_scaled=st * ing.n**0.25,
        surrogate_used=surrogate,
    )


@dataclass(frozen=True)
class ScalingRow:
    n: int
    statistic: StatisticKind
    mode: str
    rr_bound: float
    stein_bound: float
    rr_scaled: float
    stein_scaled: float
    var_cond_pi: float
    var_cond_pi_n3: float


SCALING_CSV_HEADER = (
    "n,statistic,mode,rr_bound,stein_bound,rr_scaled,stein_scaled,var_cond_pi,var_cond_pi_n3"
)


def scaling_table(
    kind: StatisticKind | str,
    n_list,
    mode: str = MODE_EXACT,
    trials: int | None = None,
    seed: int | None = None,
    limit: int | None = None,
) -> list[ScalingRow]:
    """One row per n with both bounds and the n^3-scaled conditional variance."""
    kind = StatisticKind(kind)
    rows = []
    for n in n_list:
        spec = spec_for(kind, n)
        if mode == MODE_EXACT:
            ing = ingredients_exact(spec, limit)
        elif mode == MODE_MC:
            if trials is None or seed is None:
                raise ValueError("Monte Carlo mode needs trials and seed")
            ing = ingredients_mc(spec, trials, seed)
        else:
            raise ValueError(f"unknown mode {mode!r}")
        rep = bound_report(ing)
        rows.append(
            ScalingRow(
                n=n,
                statistic=kind,
                mode=mode,
                rr_bound=rep.rr_bound,
                stein_bound=rep.stein_bound,
                rr_scaled=rep.rr_scaled,
                stein_scaled=rep.stein_scaled,
                var_cond_pi=ing.var_cond_pi,
                var_cond_pi_n3=ing.var_cond_pi * n**3,
            )
        )
    return rows


def scaling_table_csv(rows: list[ScalingRow]) -> str:
    lines = [SCALING_CSV_HEADER]
    for r in rows:
        lines.append(
            f"{r.n},{r.statistic.value},{r.mode},{r.rr_bound!r},{r.stein_bound!r},"
            f"{r.rr_scaled!r},{r.stein_scaled!r},{r.var_cond_pi!r},{r.var_cond_pi_n3!r}"
        )
    return "\n".join(lines) + "\n"


def ingredients_to_json_dict(ing: BoundIngredients) -> dict:
    out: dict = {
        "n": ing.n,
        "lambda": format_rational(ing.lam),
        "a_max": ing.a_max,
        "e_diff_sq": ing.e_diff_sq,
        "e_abs_diff_cubed": ing.e_abs_diff_cubed,
        "var_cond_pi": ing.var_cond_pi,
        "var_cond_w": ing.var_cond_w,
        "mode": ing.mode,
    }
    if ing.mode == MODE_EXACT:
        out["exact"] = {
            "e_diff_sq_x": format_rational(ing.e_diff_sq_x),
            "e_diff_sq_w": format_rational(ing.e_diff_sq_w),
            "e_abs_diff_cubed_x": format_rational(ing.e_abs_diff_cubed_x),
            "var_cond_pi_w": format_rational(ing.var_cond_pi_w),
            "var_cond_w_w": format_rational(ing.var_cond_w_w),
        }
    else:
        out["trials"] = ing.trials
        out["seed"] = ing.seed
        out["stderr"] = {
            "e_diff_sq": ing.stderr_e_diff_sq,
            "e_abs_diff_cubed": ing.stderr_e_abs_diff_cubed,
            "var_cond_pi": ing.stderr_var_cond_pi,
        }
    return out


def report_to_json_dict(rep: BoundReport) -> dict:
    return {
        "rr_bound": rep.rr_bound,
        "stein_bound": rep.stein_bound,
        "rr_scaled": rep.rr_scaled,
        "stein_scaled": rep.stein_scaled,
        "surrogate_used": rep.surrogate_used,
    }
