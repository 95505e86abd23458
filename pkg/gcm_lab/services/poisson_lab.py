"""Lie-Poisson calculus on u(n,H)* ~ u(n,H).

The identification uses the positive-definite pairing <X, Y> := -rtr(XY).
Gradients are central finite differences along an orthonormal basis, and the
bracket is {f, g}(X) = rtr(X [grad f, grad g]).  Certification runs sample
orbit points, differentiate a whole family at once and check vanishing of all
pairwise brackets (commutativity) and the rank of the Hamiltonian vectors
[grad f, X] (independence on the orbit).
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Callable, Sequence

import numpy as np

from gcm_lab.config import DEFAULT_FD_STEP, GAP_FLOOR, GCM_LAB_THREADS, MAX_RESAMPLE, RANK_TOL
from gcm_lab.errors import DegenerateSpectrumError, EvaluationError
from gcm_lab.services.gcm_system import FunctionFamily, g_last_member, g_member
from gcm_lab.services.quat_core import I, J, K, ONE, QMatrix, embed_complex, embed_upper_left
from gcm_lab.services.spectral import OrbitPoint, SpectrumRequest, nested_gap, random_orbit_point

logger = logging.getLogger(__name__)

ScalarFunction = Callable[[QMatrix], float]
VectorFunction = Callable[[QMatrix], np.ndarray]

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class LieAlgebraBasis:
    """Orthonormal basis of u(n,H) under <X, Y> = -rtr(XY)."""

    n: int
    elements: tuple[QMatrix, ...]
    stacked: np.ndarray = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.elements)

    def coordinates(self, X: QMatrix) -> np.ndarray:
        # rtr(B X) = 2 sum_ij Re(B_ij X_ji)
        Xt = np.transpose(X.data, (1, 0, 2)) * _CONJ
        return -2.0 * self.stacked.reshape(self.dim, -1) @ Xt.ravel()

    def from_coordinates(self, coords: np.ndarray) -> QMatrix:
        return QMatrix(np.einsum("b,bijc->ijc", np.asarray(coords, dtype=float), self.stacked))


@lru_cache(maxsize=None)
def lie_algebra_basis(n: int) -> LieAlgebraBasis:
    units = [ONE, I, J, K]
    elements: list[QMatrix] = []
    for p in range(1, n + 1):
        for u in units[1:]:
            elements.append(QMatrix.unit(n, p, p, u) * (1.0 / np.sqrt(2.0)))
    for p in range(1, n + 1):
        for q in range(p + 1, n + 1):
            for u in units:
                elements.append((QMatrix.unit(n, p, q, u) - QMatrix.unit(n, q, p, u.conj())) * 0.5)
    stacked = np.stack([e.data for e in elements])
    stacked.setflags(write=False)
    return LieAlgebraBasis(n, tuple(elements), stacked)


def default_step(X: QMatrix, fd_step: float = DEFAULT_FD_STEP) -> float:
    return fd_step * (1.0 + X.frobenius_norm())


def jacobian(
    func: VectorFunction, X: QMatrix, h: float | None = None, fd_step: float = DEFAULT_FD_STEP
) -> np.ndarray:
    """Rows: basis coordinates of the gradient of each component of func."""
    basis = lie_algebra_basis(X.rows)
    h = default_step(X, fd_step) if h is None else h
    columns = []
    for B in basis.elements:
        plus = np.atleast_1d(np.asarray(func(X + B * h), dtype=float))
        minus = np.atleast_1d(np.asarray(func(X - B * h), dtype=float))
        columns.append((plus - minus) / (2.0 * h))
    J = np.stack(columns, axis=1)
    if not np.all(np.isfinite(J)):
        raise EvaluationError("Function produced non-finite values under differentiation")
    return J


def gradient(f: ScalarFunction, X: QMatrix, h: float | None = None) -> QMatrix:
    coords = jacobian(lambda Y: np.array([f(Y)]), X, h)[0]
    return lie_algebra_basis(X.rows).from_coordinates(coords)


def bracket_from_gradients(X: QMatrix, grad_f: QMatrix, grad_g: QMatrix) -> float:
    return float(np.trace(embed_complex(X @ grad_f.commutator(grad_g))).real)


def bracket_matrix(X: QMatrix, coords: np.ndarray) -> np.ndarray:
    """All pairwise brackets rtr(X [G_a, G_b]) for gradient coordinate rows."""
    basis = lie_algebra_basis(X.rows)
    grads = np.stack([embed_complex(basis.from_coordinates(row)) for row in coords])
    Xc = embed_complex(X)
    T = np.einsum("ij,ajk,bki->ab", Xc, grads, grads)
    return (T - T.T).real


def poisson_bracket(f: ScalarFunction, g: ScalarFunction, X: QMatrix, h: float | None = None) -> float:
    return bracket_from_gradients(X, gradient(f, X, h), gradient(g, X, h))


def hamiltonian_vectors(X: QMatrix, coords: np.ndarray) -> np.ndarray:
    """Basis coordinates of [grad f, X], the tangent vector to the orbit through X."""
    basis = lie_algebra_basis(X.rows)
    if len(coords) == 0:
        return np.zeros((0, basis.dim))
    return np.stack([basis.coordinates(basis.from_coordinates(row).commutator(X)) for row in coords])


def numerical_rank(matrix: np.ndarray, tol_rank: float = RANK_TOL) -> tuple[int, np.ndarray]:
    if matrix.size == 0:
        return 0, np.zeros(0)
    sv = np.linalg.svd(matrix, compute_uv=False)
    if sv.size == 0 or sv[0] == 0.0:
        return 0, sv
    return int(np.sum(sv > tol_rank * sv[0])), sv


def sample_generic_point(lam: Sequence[float], seed: int, index: int) -> tuple[OrbitPoint, int]:
    """Draw orbit points until every nested block spectrum is separated by GAP_FLOOR."""
    req = SpectrumRequest(tuple(lam), strict=True)
    for attempt in range(MAX_RESAMPLE + 1):
        point = random_orbit_point(req, [seed, index, attempt])
        if nested_gap(point.X) >= GAP_FLOOR:
            return point, attempt
        logger.warning("trial %d: nested spectra too close at attempt %d, resampling", index, attempt)
    raise DegenerateSpectrumError(f"No generic point after {MAX_RESAMPLE} resamples for trial {index}")


def _fan_out(work: Callable[[int], dict], trials: int, threads: int | None) -> list[dict]:
    workers = max(1, min(trials, threads or GCM_LAB_THREADS))
    if workers == 1:
        return [work(t) for t in range(trials)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(work, range(trials)))


@dataclass
class CommutativityReport:
    n: int
    lam: list[float]
    trials: int
    tol: float
    variant: str
    max_abs_bracket: dict[str, float]
    resampled: int
    passed: bool

    def to_dict(self) -> dict:
        return {
            "experiment": "commute",
            "n": self.n,
            "lambda": self.lam,
            "trials": self.trials,
            "tol": self.tol,
            "variant": self.variant,
            "max_abs_bracket": self.max_abs_bracket,
            "max_overall": max(self.max_abs_bracket.values(), default=0.0),
            "resampled": self.resampled,
            "pass": self.passed,
        }


def certify_commutativity(
    family: FunctionFamily,
    lam: Sequence[float],
    trials: int,
    tol: float,
    seed: int,
    fd_step: float = DEFAULT_FD_STEP,
    threads: int | None = None,
) -> CommutativityReport:
    labels = family.labels
    pairs = list(combinations(range(len(labels)), 2))

    def work(t: int) -> dict:
        point, attempts = sample_generic_point(lam, seed, t)
        coords = jacobian(family.evaluate, point.X, fd_step=fd_step)
        brackets = bracket_matrix(point.X, coords)
        logger.debug("commute trial %d: max |bracket| %.3e", t, float(np.max(np.abs(brackets), initial=0.0)))
        return {"brackets": np.abs(brackets), "attempts": attempts}

    results = _fan_out(work, trials, threads)
    worst = {
        f"{labels[a]}|{labels[b]}": float(max(r["brackets"][a, b] for r in results)) for a, b in pairs
    }
    passed = all(v < tol for v in worst.values())
    logger.info("commutativity n=%d variant=%s: %s", family.n, family.variant, "pass" if passed else "fail")
    return CommutativityReport(
        n=family.n,
        lam=[float(x) for x in lam],
        trials=trials,
        tol=tol,
        variant=family.variant,
        max_abs_bracket=worst,
        resampled=sum(r["attempts"] for r in results),
        passed=passed,
    )


@dataclass
class IndependenceReport:
    n: int
    lam: list[float]
    trials: int
    tol_rank: float
    variant: str
    expected_rank: int
    ranks: list[int]
    ambient_ranks: list[int]
    singular_values: list[list[float]]
    passed: bool

    def to_dict(self) -> dict:
        return {
            "experiment": "independence",
            "n": self.n,
            "lambda": self.lam,
            "trials": self.trials,
            "tol_rank": self.tol_rank,
            "variant": self.variant,
            "expected_rank": self.expected_rank,
            "certified_rank": "orbit_tangent",
            "ranks": self.ranks,
            "ambient_ranks": self.ambient_ranks,
            "singular_values": self.singular_values,
            "pass": self.passed,
        }


def certify_independence(
    family: FunctionFamily,
    lam: Sequence[float],
    trials: int,
    tol_rank: float,
    seed: int,
    expected_rank: int | None = None,
    fd_step: float = DEFAULT_FD_STEP,
    threads: int | None = None,
) -> IndependenceReport:
    """Rank of the family's Hamiltonian vectors at sampled points; passes at rank n^2 everywhere.

    `ranks` is the certified orbit-tangent rank. `ambient_ranks` counts the plain
    gradients and is reported only.
    """
    expected = family.n**2 if expected_rank is None else expected_rank

    def work(t: int) -> dict:
        point, _ = sample_generic_point(lam, seed, t)
        coords = jacobian(family.evaluate, point.X, fd_step=fd_step)
        rank, sv = numerical_rank(hamiltonian_vectors(point.X, coords), tol_rank)
        ambient, _ = numerical_rank(coords, tol_rank)
        return {"rank": rank, "ambient": ambient, "sv": sv.tolist()}

    results = _fan_out(work, trials, threads)
    ranks = [r["rank"] for r in results]
    passed = all(r == expected for r in ranks)
    logger.info("independence n=%d variant=%s ranks=%s expected=%d", family.n, family.variant, ranks, expected)
    return IndependenceReport(
        n=family.n,
        lam=[float(x) for x in lam],
        trials=trials,
        tol_rank=tol_rank,
        variant=family.variant,
        expected_rank=expected,
        ranks=ranks,
        ambient_ranks=[r["ambient"] for r in results],
        singular_values=[r["sv"] for r in results],
        passed=passed,
    )


def subgroup_tangents(X: QMatrix) -> np.ndarray:
    """Coordinates of [Z, X] for Z running over u(n-1,H) embedded in the upper-left block."""
    n = X.rows
    if n == 1:
        return np.zeros((0, lie_algebra_basis(1).dim))
    basis = lie_algebra_basis(n)
    small = lie_algebra_basis(n - 1)
    rows = []
    for Z in small.elements:
        data = np.zeros((n, n, 4))
        data[: n - 1, : n - 1] = Z.data
        rows.append(basis.coordinates(QMatrix(data).commutator(X)))
    return np.stack(rows)


def certify_reduced_independence(
    n: int,
    lam: Sequence[float],
    trials: int,
    tol_rank: float,
    seed: int,
    fd_step: float = DEFAULT_FD_STEP,
    threads: int | None = None,
) -> dict:
    """The level-0 members add exactly n to the rank of the U(n-1,H) orbit directions."""
    level0 = FunctionFamily(n, tuple([g_member(0, m) for m in range(1, n)] + [g_last_member(0, n)]), "level0")

    def work(t: int) -> dict:
        point, _ = sample_generic_point(lam, seed, t)
        tangents = subgroup_tangents(point.X)
        vectors = hamiltonian_vectors(point.X, jacobian(level0.evaluate, point.X, fd_step=fd_step))
        base, _ = numerical_rank(tangents, tol_rank)
        total, _ = numerical_rank(np.vstack([tangents, vectors]), tol_rank)
        return {"base": base, "total": total}

    results = _fan_out(work, trials, threads)
    gains = [r["total"] - r["base"] for r in results]
    return {
        "experiment": "reduced_independence",
        "n": n,
        "lambda": [float(x) for x in lam],
        "trials": trials,
        "subgroup_ranks": [r["base"] for r in results],
        "rank_gains": gains,
        "pass": all(g == n for g in gains),
    }


def conjugation_invariance(
    family: FunctionFamily,
    point: OrbitPoint,
    U: QMatrix,
) -> np.ndarray:
    """|member(U' X U'^*) - member(X)| for U' = diag(U, 1, ...) embedded upper-left."""
    V = embed_upper_left(U, point.n)
    moved = V @ point.X @ V.star()
    moved = (moved - moved.star()) * 0.5
    return np.abs(family.evaluate(moved) - family.evaluate(point.X))
