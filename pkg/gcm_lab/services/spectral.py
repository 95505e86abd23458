"""Spectral theory of skew-H-hermitian matrices.

Every X in u(n,H) is X = A D_lambda A* with A in U(n,H) and
D_lambda = diag(i lam_1, ..., i lam_n), 0 >= lam_1 >= ... >= lam_n.  The
quaternionic diagonalization is computed through the complex embedding: the
Hermitian matrix -i * embed(X) has eigenvalues +-lam_l, and an eigenvector for
lam_l <= 0 is the C-coordinate vector of the l-th column of A.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from gcm_lab.errors import DegenerateSpectrumError, DomainError, ShapeError
from gcm_lab.services.quat_core import (
    QMatrix,
    complex_to_column,
    embed_complex,
    gram_schmidt,
    random_unitary,
    require_skew,
    right_multiply,
)

logger = logging.getLogger(__name__)

PAIRING_TOL = 1e-8
CLUSTER_TOL = 1e-8


@dataclass(frozen=True)
class SpectrumRequest:
    lam: tuple[float, ...]
    strict: bool = True

    def __post_init__(self) -> None:
        lam = tuple(float(x) for x in self.lam)
        object.__setattr__(self, "lam", lam)
        if not lam:
            raise DomainError("Spectrum must have at least one entry")
        if lam[0] > 0 or any(a < b for a, b in zip(lam, lam[1:])):
            raise DomainError(f"Spectrum {lam} is not in the chamber 0 >= lam_1 >= ... >= lam_n")
        if self.strict and len(set(lam)) != len(lam):
            raise DegenerateSpectrumError(f"Spectrum {lam} has repeated entries; a generic orbit needs distinct values")

    @property
    def n(self) -> int:
        return len(self.lam)


@dataclass(frozen=True)
class OrbitPoint:
    X: QMatrix
    A: QMatrix
    lam: tuple[float, ...]
    degenerate: bool = False
    seed: int | None = field(default=None, compare=False)

    @property
    def n(self) -> int:
        return self.X.rows

    @property
    def D(self) -> QMatrix:
        return QMatrix.diag_imaginary(self.lam)

    def residual(self) -> float:
        return (self.A @ self.D @ self.A.star() - self.X).frobenius_norm()


def _hermitian_image(X: QMatrix) -> np.ndarray:
    H = -1j * embed_complex(X)
    return 0.5 * (H + H.conj().T)


def _paired_spectrum(w: np.ndarray) -> np.ndarray:
    """Chamber-ordered lam from the ascending spectrum of -i*embed(X)."""
    n = w.shape[0] // 2
    scale = max(1.0, float(np.max(np.abs(w), initial=0.0)))
    mismatch = np.abs(w[:n] + w[::-1][:n])
    if np.any(mismatch > PAIRING_TOL * scale):
        raise DegenerateSpectrumError(
            f"Eigenvalues do not pair as +-lam (worst mismatch {float(mismatch.max()):.3e})"
        )
    return (0.5 * (w[:n] - w[::-1][:n]))[::-1]


def spectrum(X: QMatrix) -> np.ndarray:
    """Chamber-ordered eigenvalue vector (lam_1, ..., lam_n) of X."""
    return _paired_spectrum(np.linalg.eigvalsh(_hermitian_image(X)))


def _clusters(lam: np.ndarray, tol: float) -> list[list[int]]:
    groups: list[list[int]] = [[0]]
    for idx in range(1, lam.shape[0]):
        if abs(lam[idx] - lam[idx - 1]) < tol:
            groups[-1].append(idx)
        else:
            groups.append([idx])
    return groups


def _normalize_phase(column: np.ndarray) -> np.ndarray:
    """Right-multiply by the unit complex making the first max-modulus entry's C-part real positive."""
    norms = np.sqrt(np.sum(column**2, axis=1))
    p = int(np.argmax(norms))
    alpha = complex(column[p, 0], column[p, 1])
    if abs(alpha) > 1e-12 * max(1.0, norms[p]):
        theta = -np.angle(alpha)
    else:
        beta = complex(column[p, 2], -column[p, 3])
        theta = -np.angle(beta)
    return right_multiply(column, np.array([np.cos(theta), np.sin(theta), 0.0, 0.0]))


def diagonalize(X: QMatrix, strict: bool = False) -> OrbitPoint:
    """Return (A, lam) with X = A D_lam A*, A unitary over H, lam in chamber order."""
    if X.rows != X.cols:
        raise ShapeError(f"diagonalize needs a square matrix, got {X.shape}")
    require_skew(X)
    n = X.rows
    w, V = np.linalg.eigh(_hermitian_image(X))
    lam = _paired_spectrum(w)
    # V[:, n-1-l] belongs to lam[l]; vectors with index >= n carry -lam.
    scale = max(1.0, float(np.max(np.abs(lam), initial=0.0)))
    tol = CLUSTER_TOL * scale

    columns: list[np.ndarray] = []
    degenerate = False
    for group in _clusters(lam, tol):
        value = lam[group[0]]
        if len(group) > 1:
            degenerate = True
        if abs(value) < tol:
            # the zero eigenspace is closed under v -> v j; both halves are candidates
            candidates = [V[:, idx] for idx in range(2 * n) if abs(w[idx]) < tol]
        else:
            candidates = [V[:, n - 1 - l] for l in group]
        picked = gram_schmidt([complex_to_column(v) for v in candidates], keep=len(group))
        if len(picked) != len(group):
            raise DegenerateSpectrumError(f"Could not build {len(group)} H-orthonormal columns for eigenvalue {value:.6g}")
        columns.extend(picked)

    if degenerate:
        if strict:
            raise DegenerateSpectrumError(f"Spectrum {lam.tolist()} has repeated eigenvalues")
        logger.warning("diagonalize: repeated eigenvalues %s; eigenvector clusters orthonormalized jointly", lam.tolist())

    A = QMatrix(np.stack([_normalize_phase(c) for c in columns], axis=1))
    return OrbitPoint(X=X, A=A, lam=tuple(float(x) for x in lam), degenerate=degenerate)


def random_orbit_point(req: SpectrumRequest, seed: int | Sequence[int]) -> OrbitPoint:
    """X = A D_lam A* with A Haar-like on U(n,H); deterministic given seed."""
    rng = np.random.default_rng(seed)
    A = random_unitary(rng, req.n)
    D = QMatrix.diag_imaginary(req.lam)
    X = A @ D @ A.star()
    X = (X - X.star()) * 0.5
    return OrbitPoint(
        X=X,
        A=A,
        lam=req.lam,
        degenerate=len(set(req.lam)) != len(req.lam),
        seed=seed if isinstance(seed, int) else None,
    )


def upper_left_block(X: QMatrix, k: int) -> QMatrix:
    if not 1 <= k <= X.rows:
        raise ShapeError(f"Block size {k} out of range 1..{X.rows}")
    return X.block(k)


def nested_gap(X: QMatrix) -> float:
    """Smallest spectral gap over all leading blocks.

    For proper blocks the distance of lam_1 to 0 counts too, since +-lam
    collide there.
    """
    n = X.rows
    smallest = np.inf
    for size in range(n, 0, -1):
        mu = spectrum(X.block(size))
        if mu.shape[0] > 1:
            smallest = min(smallest, float(np.min(np.abs(np.diff(mu)))))
        if size < n:
            smallest = min(smallest, float(abs(mu[0])))
    return smallest
