"""The n^2 functions integrating a generic U(n,H) coadjoint orbit.

Level k (0 <= k <= n-1) works with the leading block Y of size n-k:

* thimm(k, m), k >= 1: the m-th chamber eigenvalue of Y;
* g(k, m), m < n-k: |b_{n-k,m}|^2 for Y = B D_mu B*;
* g_last(k): the i-component of the corner entry Y_{n-k,n-k};
* f(k, m): rtr(Y^{2m} E_{n-k,n-k}), the even-power alternative to g(k, m).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Callable, Iterator, Literal, Sequence

import numpy as np

from gcm_lab.errors import DegenerateSpectrumError, ShapeError
from gcm_lab.services.quat_core import QMatrix, require_skew
from gcm_lab.services.spectral import OrbitPoint, diagonalize, spectrum, upper_left_block

logger = logging.getLogger(__name__)

FamilyVariant = Literal["g", "f", "thimm"]
MemberKind = Literal["thimm", "g", "g_last", "f", "casimir", "probe"]


class BlockCache:
    """Per-point cache of leading blocks and their diagonalizations."""

    def __init__(self, X: QMatrix | OrbitPoint) -> None:
        if isinstance(X, OrbitPoint):
            self.X = X.X
            self._orbits: dict[int, OrbitPoint] = {0: X}
        else:
            self.X = X
            self._orbits = {}
        self.n = self.X.rows
        self._blocks: dict[int, QMatrix] = {}
        self._spectra: dict[int, np.ndarray] = {}

    def _check_level(self, k: int) -> None:
        if not 0 <= k <= self.n - 1:
            raise ShapeError(f"Level {k} out of range 0..{self.n - 1}")

    def block(self, k: int) -> QMatrix:
        self._check_level(k)
        if k not in self._blocks:
            self._blocks[k] = upper_left_block(self.X, self.n - k)
        return self._blocks[k]

    def orbit(self, k: int) -> OrbitPoint:
        if k not in self._orbits:
            self._orbits[k] = diagonalize(self.block(k))
        return self._orbits[k]

    def spectrum(self, k: int) -> np.ndarray:
        if k not in self._spectra:
            self._spectra[k] = (
                np.asarray(self._orbits[k].lam) if k in self._orbits else spectrum(self.block(k))
            )
        return self._spectra[k]


def bottom_row_weights(A: QMatrix) -> np.ndarray:
    """|a_{n,l}|^2 for l = 1..n; invariant under right multiplication by the torus."""
    return np.sum(A.data[-1] ** 2, axis=1)


def _thimm(cache: BlockCache, k: int, m: int) -> float:
    return float(cache.spectrum(k)[m - 1])


def _g(cache: BlockCache, k: int, m: int) -> float:
    return float(bottom_row_weights(cache.orbit(k).A)[m - 1])


def _g_last(cache: BlockCache, k: int) -> float:
    size = cache.n - k
    return float(cache.X.data[size - 1, size - 1, 1])


def _trace_power(cache: BlockCache, k: int, power: int) -> float:
    Y = cache.block(k)
    corner = Y.power(power).data[-1, -1, 0]
    return float(2.0 * corner)


def _f(cache: BlockCache, k: int, m: int) -> float:
    return _trace_power(cache, k, 2 * m)


def _casimir(cache: BlockCache, m: int) -> float:
    return float(cache.spectrum(0)[m - 1])


def _probe(cache: BlockCache) -> float:
    return float(cache.X.data[-1, -1, 2])


@dataclass(frozen=True)
class FamilyMember:
    label: str
    kind: MemberKind
    level: int
    index: int
    evaluator: Callable[[BlockCache], float] = field(repr=False, compare=False)

    def __call__(self, X: QMatrix | OrbitPoint | BlockCache) -> float:
        cache = X if isinstance(X, BlockCache) else BlockCache(X)
        return self.evaluator(cache)


def thimm_member(k: int, m: int) -> FamilyMember:
    return FamilyMember(f"thimm({k},{m})", "thimm", k, m, partial(_thimm, k=k, m=m))


def g_member(k: int, m: int) -> FamilyMember:
    return FamilyMember(f"g({k},{m})", "g", k, m, partial(_g, k=k, m=m))


def g_last_member(k: int, n: int) -> FamilyMember:
    return FamilyMember(f"g_last({k})", "g_last", k, n - k, partial(_g_last, k=k))


def f_member(k: int, m: int) -> FamilyMember:
    return FamilyMember(f"f({k},{m})", "f", k, m, partial(_f, k=k, m=m))


def casimir_member(m: int) -> FamilyMember:
    return FamilyMember(f"casimir({m})", "casimir", 0, m, partial(_casimir, m=m))


def probe_member() -> FamilyMember:
    """j-component of the corner entry X_{nn}; not part of any commuting family."""
    return FamilyMember("probe(j,n,n)", "probe", 0, 0, _probe)


@dataclass(frozen=True)
class FunctionFamily:
    n: int
    members: tuple[FamilyMember, ...]
    variant: str = "g"

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[FamilyMember]:
        return iter(self.members)

    @property
    def labels(self) -> list[str]:
        return [m.label for m in self.members]

    @property
    def counts(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for member in self.members:
            out[member.kind] = out.get(member.kind, 0) + 1
        return out

    def with_members(self, members: Sequence[FamilyMember], variant: str | None = None) -> "FunctionFamily":
        return FunctionFamily(self.n, tuple(members), variant or f"{self.variant}+custom")

    def evaluate(self, X: QMatrix | OrbitPoint) -> np.ndarray:
        cache = BlockCache(X)
        if cache.n != self.n:
            raise ShapeError(f"Family for n={self.n} evaluated on a {cache.n}x{cache.n} matrix")
        return np.array([member.evaluator(cache) for member in self.members])

    def evaluate_labeled(self, X: QMatrix | OrbitPoint) -> dict[str, float]:
        return dict(zip(self.labels, self.evaluate(X).tolist(), strict=True))


def thimm_values(X: QMatrix, n: int | None = None) -> list[np.ndarray]:
    """Chamber spectra of the leading blocks of sizes n-1, ..., 1."""
    require_skew(X)
    n = X.rows if n is None else n
    if n != X.rows:
        raise ShapeError(f"Expected an {n}x{n} matrix, got {X.shape}")
    return [spectrum(upper_left_block(X, n - k)) for k in range(1, n)]


def _check_indices(X: QMatrix, k: int, m: int) -> None:
    n = X.rows
    if not 0 <= k <= n - 1:
        raise ShapeError(f"Level {k} out of range 0..{n - 1}")
    if not 1 <= m <= n - k:
        raise ShapeError(f"Index {m} out of range 1..{n - k} at level {k}")


def g_component(X: QMatrix, k: int, m: int) -> float:
    require_skew(X)
    _check_indices(X, k, m)
    cache = BlockCache(X)
    if m == X.rows - k:
        return _g_last(cache, k)
    orbit = cache.orbit(k)
    if orbit.degenerate:
        logger.warning("g(%d,%d) evaluated on a block with repeated eigenvalues %s", k, m, orbit.lam)
    return _g(cache, k, m)


def f_component(X: QMatrix, k: int, m: int) -> float:
    """rtr(Y^{2m} E_{n-k,n-k}) for Y the leading (n-k)-block."""
    require_skew(X)
    _check_indices(X, k, m)
    return _f(BlockCache(X), k, m)


def trace_power_component(X: QMatrix, k: int, power: int) -> float:
    """rtr(Y^power E_{n-k,n-k}); identically 0 for odd powers on u(n,H)."""
    require_skew(X)
    _check_indices(X, k, 1)
    return _trace_power(BlockCache(X), k, power)


def f_component_sum_form(X: QMatrix, k: int, m: int) -> float:
    """2 * sum_l (-1)^m mu_l^{2m} |b_{n-k,l}|^2 from the diagonalization of the block.

    The sum itself (without the factor 2) is the eigenvalue-weighted form; the
    reduced trace doubles it.
    """
    require_skew(X)
    _check_indices(X, k, m)
    orbit = BlockCache(X).orbit(k)
    mu = np.asarray(orbit.lam)
    weights = bottom_row_weights(orbit.A)
    return float(2.0 * np.sum((-1.0) ** m * mu ** (2 * m) * weights))


def f_system_matrix(lam: Sequence[float]) -> np.ndarray:
    """Rows m = 1..n, columns l: 2 (-1)^m lam_l^{2m}."""
    lam = np.asarray(lam, dtype=float)
    m = np.arange(1, lam.shape[0] + 1)[:, None]
    return 2.0 * (-1.0) ** m * lam[None, :] ** (2 * m)


def g_from_f(f_values: Sequence[float], lam: Sequence[float]) -> np.ndarray:
    """Recover the bottom-row weights |a_{n,l}|^2 (l = 1..n) from f(0,1..n).

    Entries 1..n-1 are g(0,1..n-1); the last entry is |a_{n,n}|^2.
    """
    lam = np.asarray(lam, dtype=float)
    f_values = np.asarray(f_values, dtype=float)
    if f_values.shape != lam.shape:
        raise ShapeError(f"Need {lam.shape[0]} f-values, got {f_values.shape[0]}")
    scale = max(1.0, float(np.max(np.abs(lam), initial=0.0)))
    squares = np.sort(lam**2)
    if np.any(squares < 1e-12 * scale**2) or np.any(np.diff(squares) < 1e-12 * scale**2):
        raise DegenerateSpectrumError(f"Change of variables is singular for lam={lam.tolist()}")
    try:
        return np.linalg.solve(f_system_matrix(lam), f_values)
    except np.linalg.LinAlgError as exc:
        raise DegenerateSpectrumError(f"Change of variables is singular for lam={lam.tolist()}") from exc


def assemble_family(n: int, variant: FamilyVariant = "g") -> FunctionFamily:
    """Canonical ordered family: Thimm levels 1..n-1, then per level k the G (or F) members."""
    if n < 1:
        raise ShapeError("n must be positive")
    members: list[FamilyMember] = [thimm_member(k, m) for k in range(1, n) for m in range(1, n - k + 1)]
    if variant == "thimm":
        return FunctionFamily(n, tuple(members), variant)
    for k in range(n):
        for m in range(1, n - k):
            members.append(g_member(k, m) if variant == "g" else f_member(k, m))
        members.append(g_last_member(k, n))
    return FunctionFamily(n, tuple(members), variant)


def casimir_family(n: int) -> FunctionFamily:
    return FunctionFamily(n, tuple(casimir_member(m) for m in range(1, n + 1)), "casimir")


def evaluation_report(family: FunctionFamily, point: OrbitPoint) -> dict:
    return {
        "n": family.n,
        "variant": family.variant,
        "lambda": list(point.lam),
        "point_seed": point.seed,
        "values": family.evaluate_labeled(point),
    }
