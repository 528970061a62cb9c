"""The move-random-to-end chain and its exchangeable pair.

One step of the chain picks a position I uniformly from 1..n and moves
the value sitting there to the end of the word.  Starting from a uniform
permutation pi this yields a pair (X(pi), X(pi')) whose normalized form
(W, W') is exchangeable, with the exact linear regression property
E[W' | pi] = (1 - 2/n) W.

Everything except sampling is exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _sn
from .perm_core import (
    Permutation,
    StatisticSpec,
    check_enum_limit,
    descents_spec,
    variance_formula,
    x_stat,
)


@dataclass(frozen=True)
class PairSample:
    """One draw of the exchangeable pair, on both the X and W scales."""

    x: Fraction
    x_prime: Fraction
    w: float
    w_prime: float
    position: int


def move_to_end(p: Permutation, i: int) -> Permutation:
    """Move the value in position i (1-indexed) to the last position.

    >>> move_to_end(Permutation((6, 4, 1, 5, 3, 2, 7)), 3).image
    (6, 4, 5, 3, 2, 7, 1)
    >>> move_to_end(Permutation((1, 2, 3)), 1).image
    (2, 3, 1)
    """
    n = p.n
    if not 1 <= i <= n:
        raise ValueError(f"position {i} out of range 1..{n}")
    img = p.image
    return Permutation(img[: i - 1] + img[i:] + (img[i - 1],))


def x_delta(spec: StatisticSpec, p: Permutation, i: int) -> Fraction:
    """Change in the statistic when position i is moved to the end.

    Moving p(i) past every later value flips the orientation of exactly
    the pairs (i, j) with j > i, so the change is -2 times the suffix
    row sum at position i.

    >>> from .perm_core import inversions_spec
    >>> x_delta(inversions_spec(7), Permutation((6, 4, 1, 5, 3, 2, 7)), 3)
    Fraction(8, 1)
    >>> x_delta(descents_spec(7), Permutation((6, 4, 1, 5, 3, 2, 7)), 3)
    Fraction(2, 1)
    """
    n = p.n
    if not 1 <= i <= n:
        raise ValueError(f"position {i} out of range 1..{n}")
    if spec.n != n:
        raise ValueError(f"statistic is for n={spec.n}, permutation has n={n}")
    entries = spec.matrix.entries
    vi = p.image[i - 1] - 1
    total = Fraction(0)
    for j in range(i, n):
        total += entries[vi][p.image[j] - 1]
    return -2 * total


def conditional_drift(spec: StatisticSpec, p: Permutation) -> Fraction:
    """E[X' - X | pi] over the uniform choice of position.

    Averaging x_delta over i telescopes to -(2/n) X(pi), which is the
    linear regression property of the pair.

    >>> from .perm_core import inversions_spec
    >>> conditional_drift(inversions_spec(7), Permutation((6, 4, 1, 5, 3, 2, 7)))
    Fraction(-2, 7)
    """
    n = p.n
    total = Fraction(0)
    for i in range(1, n + 1):
        total += x_delta(spec, p, i)
    # identity checked exhaustively in tests: the sum is -2 X(pi)
    return total / n


def cond_exp_sq(spec: StatisticSpec, p: Permutation) -> Fraction:
    """E[(X' - X)^2 | pi], exactly (4/n) times the sum of squared suffix sums.

    >>> from .perm_core import identity, inversions_spec
    >>> cond_exp_sq(descents_spec(7), identity(7))
    Fraction(24, 7)
    >>> cond_exp_sq(inversions_spec(3), Permutation((1, 2, 3)))
    Fraction(20, 3)
    """
    n = p.n
    total = Fraction(0)
    for i in range(1, n + 1):
        total += x_delta(spec, p, i) ** 2
    return total / n


def sample_pair(spec: StatisticSpec, rng: np.random.Generator) -> PairSample:
    """Draw pi uniform on S_n and one chain step from it.

    The permutation comes from the generator's Fisher-Yates shuffle and
    the position is uniform on 1..n, so the draw is fully determined by
    the generator state.
    """
    var = variance_formula(spec.matrix).variance
    if var <= 0:
        raise ValueError("statistic has zero variance; W is undefined")
    sigma = math.sqrt(var)
    n = spec.n
    p = Permutation(tuple(int(v) + 1 for v in rng.permutation(n)))
    i = int(rng.integers(1, n + 1))
    x = x_stat(spec, p)
    xp = x + x_delta(spec, p, i)
    return PairSample(x=x, x_prime=xp, w=float(x) / sigma, w_prime=float(xp) / sigma, position=i)


def unit_step_check(n: int, limit: int | None = None) -> bool:
    """Exhaustively confirm a chain step changes the descent count by at most 1."""
    check_enum_limit(n, limit)
    for perms in _sn.chunks(n):
        base = _sn.descent_counts(perms)
        for i in range(n):
            step = _sn.descent_counts(_sn.moved(perms, i)) - base
            if np.abs(step).max() > 1:
                return False
    return True
