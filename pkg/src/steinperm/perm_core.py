"""Permutations of {1..n} and the antisymmetric-matrix statistic family.

An antisymmetric rational matrix M attaches to every permutation p of
{1..n} the statistic

    X(p) = sum over position pairs i < j of M[p(i)][p(j)],

which has mean zero under the uniform distribution on the symmetric
group.  Two built-in matrices turn X into an affine image of a classical
statistic of the inverse permutation:

* ``descents_matrix(n)``:   X(p) = 2 * descent_count(inverse(p)) - (n - 1)
* ``inversions_matrix(n)``: X(p) = 2 * inversion_count(inverse(p)) - n(n-1)/2

Everything in this module is exact.  Statistics, variances and moments are
``fractions.Fraction`` values; floats appear only in downstream modules.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Iterable, Sequence

DEFAULT_ENUM_LIMIT = 10

_ZERO = Fraction(0)
_ONE = Fraction(1)
_MINUS_ONE = Fraction(-1)

_ENTRY_RE = re.compile(r"^[+-]?\d+(/[1-9]\d*)?$")


class EnumerationLimitError(ValueError):
    """Raised when a full S_n enumeration is requested beyond the limit."""


class MatrixFormatError(ValueError):
    """Raised for malformed or non-antisymmetric matrix input."""


@dataclass(frozen=True)
class Permutation:
    """A permutation of {1..n} in one-line notation.

    ``image[k]`` is the value at position k+1; positions and values are
    both 1-indexed in the public interface.

    >>> p = Permutation((6, 4, 1, 5, 3, 2, 7))
    >>> p(3), p.n
    (1, 7)
    """

    image: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.image)
        if sorted(self.image) != list(range(1, n + 1)):
            raise ValueError(f"not a permutation of 1..{n}: {self.image!r}")

    @property
    def n(self) -> int:
        return len(self.image)

    def __call__(self, position: int) -> int:
        if not 1 <= position <= self.n:
            raise ValueError(f"position {position} out of range 1..{self.n}")
        return self.image[position - 1]


def identity(n: int) -> Permutation:
    return Permutation(tuple(range(1, n + 1)))


def inverse(p: Permutation) -> Permutation:
    """The inverse permutation.

    >>> inverse(Permutation((6, 4, 1, 5, 3, 2, 7))).image
    (3, 6, 5, 2, 4, 1, 7)
    """
    out = [0] * p.n
    for pos, val in enumerate(p.image, start=1):
        out[val - 1] = pos
    return Permutation(tuple(out))


def descent_count(p: Permutation) -> int:
    """Number of positions i with p(i) > p(i+1).

    >>> descent_count(Permutation((3, 6, 5, 2, 4, 1, 7)))
    3
    """
    img = p.image
    return sum(1 for i in range(p.n - 1) if img[i] > img[i + 1])


def inversion_count(p: Permutation) -> int:
    """Number of pairs i < j with p(i) > p(j).

    >>> inversion_count(Permutation((3, 6, 5, 2, 4, 1, 7)))
    11
    """
    img = p.image
    n = p.n
    return sum(1 for i in range(n) for j in range(i + 1, n) if img[i] > img[j])


@dataclass(frozen=True)
class AntisymmetricMatrix:
    """A rational matrix with M[j][i] = -M[i][j] (hence zero diagonal).

    Indexed 1..n through :meth:`entry`.  Construct through
    :meth:`from_rows` (validating) or one of the module-level builders,
    which produce valid entries by construction.
    """

    entries: tuple[tuple[Fraction, ...], ...]

    @property
    def n(self) -> int:
        return len(self.entries)

    def entry(self, i: int, j: int) -> Fraction:
        return self.entries[i - 1][j - 1]

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Fraction | int | str]]) -> "AntisymmetricMatrix":
        n = len(rows)
        conv = []
        for row in rows:
            if len(row) != n:
                raise MatrixFormatError(f"matrix is not square: {n} rows, a row of length {len(row)}")
            conv.append(tuple(Fraction(e) for e in row))
        m = cls(tuple(conv))
        _check_antisymmetric(m)
        return m


def _check_antisymmetric(m: AntisymmetricMatrix) -> None:
    for i in range(1, m.n + 1):
        for j in range(i, m.n + 1):
            if m.entry(i, j) != -m.entry(j, i):
                raise MatrixFormatError(
                    f"matrix is not antisymmetric at (i, j) = ({i}, {j}): "
                    f"entry {m.entry(i, j)} vs {m.entry(j, i)}"
                )


def zero_matrix(n: int) -> AntisymmetricMatrix:
    row = (_ZERO,) * n
    return AntisymmetricMatrix((row,) * n)


def descents_matrix(n: int) -> AntisymmetricMatrix:
    """M[i][i+1] = -1 and M[i+1][i] = +1, zero elsewhere."""
    rows = []
    for i in range(1, n + 1):
        row = [_ZERO] * n
        if i < n:
            row[i] = _MINUS_ONE
        if i > 1:
            row[i - 2] = _ONE
        rows.append(tuple(row))
    return AntisymmetricMatrix(tuple(rows))


def inversions_matrix(n: int) -> AntisymmetricMatrix:
    """M[i][j] = -1 for i < j and +1 for i > j."""
    rows = []
    for i in range(1, n + 1):
        row = tuple(_MINUS_ONE if i < j else (_ONE if i > j else _ZERO) for j in range(1, n + 1))
        rows.append(row)
    return AntisymmetricMatrix(tuple(rows))


class StatisticKind(str, Enum):
    DESCENTS = "descents"
    INVERSIONS = "inversions"
    CUSTOM = "custom"


@dataclass(frozen=True)
class StatisticSpec:
    """A statistic X(p) = sum_{i<j} M[p(i)][p(j)] given by its matrix.

    The matrix is materialized for the built-in kinds too, so every code
    path can fall back on the defining formula.
    """

    kind: StatisticKind
    matrix: AntisymmetricMatrix

    @property
    def n(self) -> int:
        return self.matrix.n


def descents_spec(n: int) -> StatisticSpec:
    return StatisticSpec(StatisticKind.DESCENTS, descents_matrix(n))


def inversions_spec(n: int) -> StatisticSpec:
    return StatisticSpec(StatisticKind.INVERSIONS, inversions_matrix(n))


def custom_spec(matrix: AntisymmetricMatrix) -> StatisticSpec:
    return StatisticSpec(StatisticKind.CUSTOM, matrix)


def spec_for(kind: StatisticKind | str, n: int) -> StatisticSpec:
    kind = StatisticKind(kind)
    if kind is StatisticKind.DESCENTS:
        return descents_spec(n)
    if kind is StatisticKind.INVERSIONS:
        return inversions_spec(n)
    raise ValueError("a custom statistic needs an explicit matrix")


def x_stat(spec: StatisticSpec, p: Permutation) -> Fraction:
    """X(p) = sum over position pairs i < j of M[p(i)][p(j)].

    >>> x_stat(descents_spec(7), Permutation((6, 4, 1, 5, 3, 2, 7)))
    Fraction(0, 1)
    """
    if p.n != spec.n:
        raise ValueError(f"permutation size {p.n} does not match matrix size {spec.n}")
    entries = spec.matrix.entries
    img = p.image
    total = _ZERO
    for i in range(p.n):
        row = entries[img[i] - 1]
        for j in range(i + 1, p.n):
            e = row[img[j] - 1]
            if e:
                total += e
    return total


@dataclass(frozen=True)
class VarianceBreakdown:
    """Var(X) = (sum_sq + row_balance) / 3 split into its two pieces.

    ``a[i]`` is the upper row sum A_i = sum_{j>i} M[i][j], ``b[i]`` the
    column sum B_i = sum_{h<i} M[h][i]; row_balance = sum_i (A_i - B_i)^2
    and sum_sq = sum_{i<j} M[i][j]^2.
    """

    sum_sq: Fraction
    row_balance: Fraction
    a: tuple[Fraction, ...]
    b: tuple[Fraction, ...]
    variance: Fraction


def variance_formula(m: AntisymmetricMatrix) -> VarianceBreakdown:
    """Exact Var(X) under the uniform distribution, from the matrix alone.

    >>> variance_formula(descents_matrix(7)).variance
    Fraction(8, 3)
    >>> variance_formula(inversions_matrix(3)).variance
    Fraction(11, 3)
    """
    n = m.n
    entries = m.entries
    sum_sq = _ZERO
    a = []
    b = [_ZERO] * n
    for i in range(n):
        row = entries[i]
        ai = _ZERO
        for j in range(i + 1, n):
            e = row[j]
            if e:
                sum_sq += e * e
                ai += e
                b[j] += e
        a.append(ai)
    row_balance = _ZERO
    for i in range(n):
        d = a[i] - b[i]
        if d:
            row_balance += d * d
    variance = (sum_sq + row_balance) / 3
    return VarianceBreakdown(sum_sq, row_balance, tuple(a), tuple(b), variance)


def brute_force_moments(
    m: AntisymmetricMatrix, limit: int | None = None
) -> tuple[Fraction, Fraction]:
    """Exact (mean, variance) of X over all of S_n by enumeration.

    >>> brute_force_moments(descents_matrix(5))
    (Fraction(0, 1), Fraction(2, 1))
    """
    from . import _sn

    n = check_enum_limit(m.n, limit)
    mint, scale = _sn.integer_matrix(m)
    sum_x = 0
    sum_x2 = 0
    for inner in _sn.inner_sum_chunks(n, mint):
        x = inner.sum(axis=1)
        sum_x += int(x.sum())
        sum_x2 += int((x * x).sum())
    nfact = math.factorial(n)
    mean = Fraction(sum_x, nfact * scale)
    second = Fraction(sum_x2, nfact * scale * scale)
    return mean, second - mean * mean


def check_enum_limit(n: int, limit: int | None = None) -> int:
    lim = DEFAULT_ENUM_LIMIT if limit is None else limit
    if n > lim:
        raise EnumerationLimitError(
            f"full enumeration of S_{n} exceeds the limit {lim}; "
            "raise the limit explicitly to proceed"
        )
    return n


def format_rational(x: Fraction) -> str:
    """Serialize exactly, as "p" or "p/q"."""
    return str(x)


def parse_rational(text: str) -> Fraction:
    text = text.strip()
    if not _ENTRY_RE.match(text):
        raise MatrixFormatError(f"not an integer or p/q rational literal: {text!r}")
    return Fraction(text)


def matrix_to_json_dict(m: AntisymmetricMatrix) -> dict:
    return {
        "n": m.n,
        "entries": [[format_rational(e) for e in row] for row in m.entries],
    }


def matrix_from_json_dict(data: dict) -> AntisymmetricMatrix:
    """Parse {"n": int, "entries": [["p or p/q", ...], ...]} with validation.

    Non-antisymmetric input is rejected with the first offending (i, j).
    """
    if not isinstance(data, dict) or "n" not in data or "entries" not in data:
        raise MatrixFormatError('matrix JSON needs keys "n" and "entries"')
    n = data["n"]
    entries = data["entries"]
    if not isinstance(n, int) or n < 1:
        raise MatrixFormatError(f'"n" must be a positive integer, got {n!r}')
    if not isinstance(entries, list) or len(entries) != n:
        raise MatrixFormatError(f'"entries" must be a list of {n} rows')
    rows = []
    for row in entries:
        if not isinstance(row, list) or len(row) != n:
            raise MatrixFormatError(f"each row must be a list of {n} entry strings")
        rows.append([parse_rational(str(e)) for e in row])
    return AntisymmetricMatrix.from_rows(rows)


def load_matrix_file(path: str) -> AntisymmetricMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise MatrixFormatError(f"invalid JSON in {path}: {exc}") from exc
    return matrix_from_json_dict(data)


def random_antisymmetric_matrix(n: int, rng, max_abs: int = 3) -> AntisymmetricMatrix:
    """Random integer antisymmetric matrix with entries in [-max_abs, max_abs].

    ``rng`` is a numpy Generator; only the upper triangle is drawn.
    """
    rows = [[_ZERO] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            v = Fraction(int(rng.integers(-max_abs, max_abs + 1)))
            rows[i][j] = v
            rows[j][i] = -v
    return AntisymmetricMatrix(tuple(tuple(r) for r in rows))
