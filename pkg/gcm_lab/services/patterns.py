"""Integer patterns indexing branching bases, checked against Weyl dimensions.

gl(n): triangular arrays whose adjacent rows interleave, upper_i >= lower_i >= upper_{i+1}.

sp(2n): the top row lam (0 >= lam_1 >= ... >= lam_n) is read through
nu_i = |lam_{n+1-i}|, so nu_1 >= ... >= nu_n >= 0.  Below each full row nu_k of
length k sits a primed row nu'_k of the same length with

    nu_{k,1} >= nu'_{k,1} >= nu_{k,2} >= ... >= nu_{k,k} >= nu'_{k,k} >= 0,

and below that the next full row nu_{k-1} interleaving the primed one,

    nu'_{k,1} >= nu_{k-1,1} >= nu'_{k,2} >= ... >= nu_{k-1,k-1} >= nu'_{k,k}.

Rows run nu_n, nu'_n, nu_{n-1}, nu'_{n-1}, ..., nu_1, nu'_1.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product
from typing import Iterator, Literal, Sequence

from gcm_lab.errors import DomainError

PatternKind = Literal["gl", "sp"]
Row = tuple[int, ...]


def _as_int_row(values: Sequence[float | int]) -> Row:
    row = []
    for v in values:
        if int(v) != v:
            raise DomainError(f"Pattern entries must be integers, got {v!r}")
        row.append(int(v))
    return tuple(row)


@dataclass(frozen=True)
class PatternSpec:
    kind: PatternKind
    top_row: Row

    def __post_init__(self) -> None:
        row = _as_int_row(self.top_row)
        object.__setattr__(self, "top_row", row)
        if self.kind not in ("gl", "sp"):
            raise DomainError(f"Unknown pattern kind {self.kind!r}")
        if not row:
            raise DomainError("Top row must be non-empty")
        if any(a < b for a, b in zip(row, row[1:])):
            raise DomainError(f"Top row {row} is not nonincreasing")
        if self.kind == "sp" and row[0] > 0:
            raise DomainError(f"Top row {row} is not in the chamber 0 >= lam_1 >= ... >= lam_n")

    @property
    def n(self) -> int:
        return len(self.top_row)

    @property
    def row_lengths(self) -> list[int]:
        if self.kind == "gl":
            return list(range(self.n, 0, -1))
        return [length for k in range(self.n, 0, -1) for length in (k, k)]

    @property
    def highest_weight(self) -> Row:
        """The nonnegative nonincreasing row the sp rules run on; the top row itself for gl."""
        if self.kind == "gl":
            return self.top_row
        return tuple(sorted((abs(x) for x in self.top_row), reverse=True))


def _interleaving_children(row: Row, floor: int | None = None) -> Iterator[Row]:
    """Rows c with row_i >= c_i >= row_{i+1}; with floor set, c has full length and row_{k+1} := floor."""
    if floor is None:
        bounds = [range(row[i + 1], row[i] + 1) for i in range(len(row) - 1)]
    else:
        padded = row + (floor,)
        bounds = [range(padded[i + 1], padded[i] + 1) for i in range(len(row))]
    return (tuple(c) for c in product(*bounds))


@lru_cache(maxsize=None)
def _count_gl(row: Row) -> int:
    if len(row) <= 1:
        return 1
    return sum(_count_gl(child) for child in _interleaving_children(row))


@lru_cache(maxsize=None)
def _count_sp_full(row: Row) -> int:
    return sum(_count_sp_primed(primed) for primed in _interleaving_children(row, floor=0))


@lru_cache(maxsize=None)
def _count_sp_primed(primed: Row) -> int:
    if len(primed) == 1:
        return 1
    return sum(_count_sp_full(child) for child in _interleaving_children(primed))


def count_gl_patterns(top: Sequence[int]) -> int:
    return _count_gl(PatternSpec("gl", tuple(top)).top_row)


def count_sp_patterns(top: Sequence[int]) -> int:
    return _count_sp_full(PatternSpec("sp", tuple(top)).highest_weight)


def _list_gl(row: Row) -> Iterator[list[Row]]:
    if len(row) <= 1:
        yield [row]
        return
    for child in _interleaving_children(row):
        for rest in _list_gl(child):
            yield [row, *rest]


def _list_sp(row: Row) -> Iterator[list[Row]]:
    for primed in _interleaving_children(row, floor=0):
        if len(primed) == 1:
            yield [row, primed]
            continue
        for child in _interleaving_children(primed):
            for rest in _list_sp(child):
                yield [row, primed, *rest]


def list_gl_patterns(top: Sequence[int]) -> list[list[list[int]]]:
    spec = PatternSpec("gl", tuple(top))
    return [[list(r) for r in pattern] for pattern in _list_gl(spec.top_row)]


def list_sp_patterns(top: Sequence[int]) -> list[list[list[int]]]:
    """Patterns in the nonnegative convention, rows nu_n, nu'_n, ..., nu_1, nu'_1."""
    spec = PatternSpec("sp", tuple(top))
    return [[list(r) for r in pattern] for pattern in _list_sp(spec.highest_weight)]


def weyl_dim_gl(top: Sequence[int]) -> int:
    lam = PatternSpec("gl", tuple(top)).top_row
    n = len(lam)
    dim = Fraction(1)
    for i in range(n):
        for j in range(i + 1, n):
            dim *= Fraction(lam[i] - lam[j] + j - i, j - i)
    return int(dim)


def weyl_dim_sp(top: Sequence[int]) -> int:
    nu = PatternSpec("sp", tuple(top)).highest_weight
    n = len(nu)
    ell = [nu[i] + n - i for i in range(n)]
    m = [n - i for i in range(n)]
    dim = Fraction(1)
    for i in range(n):
        dim *= Fraction(ell[i], m[i])
        for j in range(i + 1, n):
            dim *= Fraction(ell[i] ** 2 - ell[j] ** 2, m[i] ** 2 - m[j] ** 2)
    return int(dim)


def count_patterns(kind: PatternKind, top: Sequence[int]) -> int:
    return count_gl_patterns(top) if kind == "gl" else count_sp_patterns(top)


def list_patterns(kind: PatternKind, top: Sequence[int]) -> list[list[list[int]]]:
    return list_gl_patterns(top) if kind == "gl" else list_sp_patterns(top)


def weyl_dim(kind: PatternKind, top: Sequence[int]) -> int:
    return weyl_dim_gl(top) if kind == "gl" else weyl_dim_sp(top)


def pattern_report(kind: PatternKind, top: Sequence[int], include_list: bool = False) -> dict:
    spec = PatternSpec(kind, tuple(top))
    report = {
        "kind": kind,
        "top": list(spec.top_row),
        "row_lengths": spec.row_lengths,
        "count": count_patterns(kind, spec.top_row),
        "weyl_dim": weyl_dim(kind, spec.top_row),
    }
    if include_list:
        report["patterns"] = list_patterns(kind, spec.top_row)
    return report
