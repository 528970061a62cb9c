"""Exchangeability of the pair (W, W') via value-relabeling bijections.

The pair is exchangeable whenever, on every subset S of remaining
values, a bijection Theta of S exists that flips the drift contribution
of each value (condition 1) and admits companion bijections Phi_i that
leave the matrix invariant on S minus a point (condition 2).  This
module builds the known Theta/Phi families for the two built-in
statistics, checks the two conditions for arbitrary matrices, applies
the resulting relabeling map to permutations, and verifies
exchangeability itself by exact enumeration.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _sn
from .perm_core import (
    AntisymmetricMatrix,
    Permutation,
    StatisticKind,
    StatisticSpec,
    check_enum_limit,
)


@dataclass(frozen=True)
class SetBijection:
    """A bijection between two finite integer sets, stored as pairs."""

    pairs: tuple[tuple[int, int], ...]

    def __post_init__(self) -> None:
        srcs = [a for a, _ in self.pairs]
        dsts = [b for _, b in self.pairs]
        if len(set(srcs)) != len(srcs) or len(set(dsts)) != len(dsts):
            raise ValueError("mapping is not a bijection")
        if sorted(srcs) != srcs:
            raise ValueError("pairs must be sorted by source")

    @classmethod
    def from_mapping(cls, mapping: dict[int, int]) -> "SetBijection":
        return cls(tuple(sorted(mapping.items())))

    @property
    def domain(self) -> tuple[int, ...]:
        return tuple(a for a, _ in self.pairs)

    @property
    def codomain(self) -> tuple[int, ...]:
        return tuple(sorted(b for _, b in self.pairs))

    def __call__(self, v: int) -> int:
        for a, b in self.pairs:
            if a == v:
                return b
        raise KeyError(f"{v} not in domain")

    def as_dict(self) -> dict[int, int]:
        return dict(self.pairs)


@dataclass(frozen=True)
class CosetContext:
    """Permutations agreeing with a fixed prefix before position i."""

    n: int
    i: int
    prefix: tuple[int, ...]

    def __post_init__(self) -> None:
        if not 1 <= self.i <= self.n:
            raise ValueError(f"position {self.i} out of range 1..{self.n}")
        if len(self.prefix) != self.i - 1:
            raise ValueError("prefix length must be i - 1")
        if len(set(self.prefix)) != len(self.prefix):
            raise ValueError("prefix values must be distinct")
        for v in self.prefix:
            if not 1 <= v <= self.n:
                raise ValueError(f"prefix value {v} out of range 1..{self.n}")

    @property
    def remaining(self) -> tuple[int, ...]:
        used = set(self.prefix)
        return tuple(v for v in range(1, self.n + 1) if v not in used)

    def contains(self, p: Permutation) -> bool:
        return p.n == self.n and p.image[: self.i - 1] == self.prefix


def coset_of(p: Permutation, i: int) -> CosetContext:
    return CosetContext(n=p.n, i=i, prefix=p.image[: i - 1])


def _sorted_set(s) -> tuple[int, ...]:
    out = tuple(sorted(s))
    if len(set(out)) != len(out):
        raise ValueError("set elements must be distinct")
    return out


def _runs(values: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Maximal runs of consecutive integers, on the ascending order."""
    runs: list[tuple[int, ...]] = []
    start = 0
    for k in range(1, len(values) + 1):
        if k == len(values) or values[k] != values[k - 1] + 1:
            runs.append(values[start:k])
            start = k
    return runs


def subset_sums(m: AntisymmetricMatrix, s, i: int) -> tuple[Fraction, Fraction]:
    """Row sum above i and column sum below i, restricted to S.

    >>> from .perm_core import descents_matrix, inversions_matrix
    >>> subset_sums(descents_matrix(7), {1, 2, 3, 5, 7}, 1)
    (Fraction(-1, 1), Fraction(0, 1))
    >>> subset_sums(inversions_matrix(7), {1, 2, 3, 5, 7}, 3)
    (Fraction(-2, 1), Fraction(-2, 1))
    """
    values = _sorted_set(s)
    if i not in values:
        raise ValueError(f"{i} is not in the set")
    a = Fraction(0)
    b = Fraction(0)
    for j in values:
        if j > i:
            a += m.entry(i, j)
        elif j < i:
            b += m.entry(j, i)
    return a, b


def theta(spec: StatisticSpec, s) -> SetBijection:
    """The value-flip bijection on S for a built-in statistic.

    Descents reverse each maximal run of consecutive integers;
    inversions reverse the whole set.

    >>> from .perm_core import descents_spec, inversions_spec
    >>> theta(descents_spec(7), {1, 2, 3, 5, 7}).as_dict()
    {1: 3, 2: 2, 3: 1, 5: 5, 7: 7}
    >>> theta(inversions_spec(7), {1, 2, 3, 5, 7}).as_dict()
    {1: 7, 2: 5, 3: 3, 5: 2, 7: 1}
    """
    values = _sorted_set(s)
    if spec.kind == StatisticKind.DESCENTS:
        mapping: dict[int, int] = {}
        for run in _runs(values):
            for v in run:
                mapping[v] = run[0] + run[-1] - v
        return SetBijection.from_mapping(mapping)
    if spec.kind == StatisticKind.INVERSIONS:
        return SetBijection(tuple(zip(values, reversed(values))))
    raise ValueError("no general value-flip recipe for a custom matrix; supply your own")


def phi(s, i: int, theta_i: int) -> SetBijection:
    """The order-preserving bijection S - {i} -> S - {theta_i}.

    >>> phi({1, 2, 3, 5, 7}, 1, 3).as_dict()
    {2: 1, 3: 2, 5: 5, 7: 7}
    """
    values = _sorted_set(s)
    if i not in values:
        raise ValueError(f"{i} is not in the set")
    if theta_i not in values:
        raise ValueError(f"{theta_i} is not in the set")
    dom = [v for v in values if v != i]
    cod = [v for v in values if v != theta_i]
    return SetBijection(tuple(zip(dom, cod)))


def _phi_descents(values: tuple[int, ...], i: int) -> SetBijection:
    """Companion bijection for the run-reversal flip: translate the two
    pieces of i's run past each other, leave everything else in place.

    The order-preserving pairing does not keep the descent matrix
    invariant once a run has length 4 or more, so the within-run map
    must preserve consecutiveness instead of order.
    """
    mapping: dict[int, int] = {}
    for run in _runs(values):
        if i in run:
            r, s_end = run[0], run[-1]
            for v in run:
                if v < i:
                    mapping[v] = v + (s_end - i + 1)
                elif v > i:
                    mapping[v] = v - (i - r + 1)
        else:
            for v in run:
                mapping[v] = v
    return SetBijection.from_mapping(mapping)


def builtin_phi(spec: StatisticSpec, s, i: int) -> SetBijection:
    """The matrix-preserving companion bijection for a built-in statistic."""
    values = _sorted_set(s)
    if i not in values:
        raise ValueError(f"{i} is not in the set")
    if spec.kind == StatisticKind.DESCENTS:
        return _phi_descents(values, i)
    if spec.kind == StatisticKind.INVERSIONS:
        return phi(values, i, theta(spec, values)(i))
    raise ValueError("no general companion bijection for a custom matrix; supply your own")


def check_conditions(
    m: AntisymmetricMatrix,
    s,
    th: SetBijection,
    phis=None,
) -> bool:
    """Whether (Theta, Phi) certify exchangeability on this subset.

    Condition 1: a - b flips sign along Theta at every point.
    Condition 2: each Phi_i maps S - {i} to S - {Theta(i)} leaving the
    matrix entries invariant.  ``phis`` maps each i to its bijection;
    by default the order-preserving pairing is tried.

    >>> from .perm_core import descents_matrix
    >>> check_conditions(descents_matrix(2), {1, 2}, SetBijection.from_mapping({1: 1, 2: 2}))
    False
    """
    values = _sorted_set(s)
    if tuple(th.domain) != values or tuple(th.codomain) != values:
        raise ValueError("the bijection must map the set onto itself")
    for i in values:
        a_i, b_i = subset_sums(m, values, i)
        a_t, b_t = subset_sums(m, values, th(i))
        if a_i - b_i != b_t - a_t:
            return False
    for i in values:
        f = phis(i) if phis is not None else phi(values, i, th(i))
        dom = tuple(v for v in values if v != i)
        cod = tuple(v for v in values if v != th(i))
        if f.domain != dom or f.codomain != cod:
            return False
        for j in dom:
            for k in dom:
                if m.entry(j, k) != m.entry(f(j), f(k)):
                    return False
    return True


def lambda_map(spec: StatisticSpec, p: Permutation, i: int) -> Permutation:
    """Relabel values at and after position i by Theta and Phi.

    The prefix is untouched, position i gets Theta of its value, and
    every later position gets Phi of its value; the image stays in the
    same prefix coset.

    >>> from .perm_core import descents_spec, inversions_spec
    >>> lambda_map(descents_spec(7), Permutation((6, 4, 1, 5, 3, 2, 7)), 3).image
    (6, 4, 3, 5, 2, 1, 7)
    >>> lambda_map(inversions_spec(7), Permutation((6, 4, 1, 5, 3, 2, 7)), 3).image
    (6, 4, 7, 3, 2, 1, 5)
    """
    n = p.n
    if not 1 <= i <= n:
        raise ValueError(f"position {i} out of range 1..{n}")
    remaining = coset_of(p, i).remaining
    v = p.image[i - 1]
    th = theta(spec, remaining)
    f = builtin_phi(spec, remaining, v)
    out = list(p.image)
    out[i - 1] = th(v)
    for j in range(i, n):
        out[j] = f(p.image[j])
    return Permutation(tuple(out))


@dataclass(frozen=True)
class PairDistribution:
    """Exact joint counts of (X, X') over all (permutation, position)."""

    counts: dict[tuple[Fraction, Fraction], int]
    total: int

    def probability(self, x: Fraction, x_prime: Fraction) -> Fraction:
        return Fraction(self.counts.get((x, x_prime), 0), self.total)


def joint_distribution(m: AntisymmetricMatrix, n: int, limit: int | None = None) -> PairDistribution:
    """Enumerate S_n x {1..n} and tally the unnormalized pair values."""
    if m.n != n:
        raise ValueError(f"matrix is {m.n}x{m.n}, expected {n}x{n}")
    check_enum_limit(n, limit)
    mint, scale = _sn.integer_matrix(m)
    raw: dict[tuple[int, int], int] = {}
    for perms in _sn.chunks(n, _sn.checked_chunk_size(n, mint)):
        inner = _sn.inner_sums(perms, mint)
        x = inner.sum(axis=1)
        for i in range(n):
            xp = x - 2 * inner[:, i]
            pairs, cnt = np.unique(np.stack([x, xp], axis=1), axis=0, return_counts=True)
            for (xa, xb), c in zip(pairs.tolist(), cnt.tolist()):
                key = (int(xa), int(xb))
                raw[key] = raw.get(key, 0) + int(c)
    counts = {
        (Fraction(xa, scale), Fraction(xb, scale)): c for (xa, xb), c in raw.items()
    }
    total = sum(counts.values())
    return PairDistribution(counts=counts, total=total)


def is_exchangeable(m: AntisymmetricMatrix, n: int, limit: int | None = None) -> bool:
    """Exact swap-symmetry of the joint (X, X') counts."""
    dist = joint_distribution(m, n, limit)
    for (xa, xb), c in dist.counts.items():
        if dist.counts.get((xb, xa), 0) != c:
            return False
    return True
