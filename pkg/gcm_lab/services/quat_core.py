"""Quaternions, quaternionic matrices and their complex 2n x 2n realization.

Conventions: H^n is a right H-module, quaternionic matrices act on the left.
Restricting scalars to C gives the ordered basis

    e_{-n}, ..., e_{-1}, e_1, ..., e_n        with e_{-p} := e_p * j,

and every complex matrix in this package is written in that basis.  A
quaternion q = alpha + j beta (alpha, beta complex) embeds as

    [[conj(alpha), beta], [-conj(beta), alpha]]

on the rows/columns (-p, p).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Literal, Sequence

import numpy as np

from gcm_lab.errors import DomainError, ShapeError

logger = logging.getLogger(__name__)

ComplexMatrix = np.ndarray
MatrixKind = Literal["unitary_H", "skew_H", "sp_group", "sp_algebra"]

MEMBERSHIP_TOL = 1e-9
IDENTITY_TOL = 1e-12

# (p q)_c = sum_ab p_a q_b _HAMILTON[a, b, c] on the basis (1, i, j, k).
_HAMILTON = np.zeros((4, 4, 4))
for _a, _b, _c, _s in [
    (0, 0, 0, 1), (0, 1, 1, 1), (0, 2, 2, 1), (0, 3, 3, 1),
    (1, 0, 1, 1), (2, 0, 2, 1), (3, 0, 3, 1),
    (1, 1, 0, -1), (2, 2, 0, -1), (3, 3, 0, -1),
    (1, 2, 3, 1), (2, 1, 3, -1),
    (2, 3, 1, 1), (3, 2, 1, -1),
    (3, 1, 2, 1), (1, 3, 2, -1),
]:
    _HAMILTON[_a, _b, _c] = _s

_CONJ = np.array([1.0, -1.0, -1.0, -1.0])


@dataclass(frozen=True)
class Quaternion:
    re: float = 0.0
    im_i: float = 0.0
    im_j: float = 0.0
    im_k: float = 0.0

    @classmethod
    def from_array(cls, values: Sequence[float]) -> "Quaternion":
        a, b, c, d = (float(v) for v in values)
        return cls(a, b, c, d)

    @classmethod
    def from_complex_pair(cls, alpha: complex, beta: complex) -> "Quaternion":
        """Build alpha + j*beta."""
        return cls(alpha.real, alpha.imag, beta.real, -beta.imag)

    def as_array(self) -> np.ndarray:
        return np.array([self.re, self.im_i, self.im_j, self.im_k])

    def complex_pair(self) -> tuple[complex, complex]:
        return complex(self.re, self.im_i), complex(self.im_j, -self.im_k)

    def conj(self) -> "Quaternion":
        return Quaternion(self.re, -self.im_i, -self.im_j, -self.im_k)

    def norm2(self) -> float:
        return self.re**2 + self.im_i**2 + self.im_j**2 + self.im_k**2

    def norm(self) -> float:
        return float(np.sqrt(self.norm2()))

    def __mul__(self, other: "Quaternion | float") -> "Quaternion":
        if isinstance(other, Quaternion):
            return qmul(self, other)
        return Quaternion.from_array(self.as_array() * float(other))

    def __rmul__(self, other: float) -> "Quaternion":
        return Quaternion.from_array(self.as_array() * float(other))

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() + other.as_array())

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion.from_array(self.as_array() - other.as_array())

    def __neg__(self) -> "Quaternion":
        return Quaternion.from_array(-self.as_array())

    def isclose(self, other: "Quaternion", tol: float = IDENTITY_TOL) -> bool:
        return bool(np.max(np.abs(self.as_array() - other.as_array())) <= tol)


ONE = Quaternion(1.0)
I = Quaternion(0.0, 1.0)
J = Quaternion(0.0, 0.0, 1.0)
K = Quaternion(0.0, 0.0, 0.0, 1.0)


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product with ij = k, ji = -k."""
    return Quaternion.from_array(np.einsum("a,b,abc->c", a.as_array(), b.as_array(), _HAMILTON))


def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.einsum("ija,jkb,abc->ikc", a, b, _HAMILTON)


class QMatrix:
    """Dense quaternionic matrix stored as a (rows, cols, 4) real array."""

    __slots__ = ("data",)

    def __init__(self, data: np.ndarray | Sequence) -> None:
        arr = np.array(data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 4 or arr.shape[0] < 1 or arr.shape[1] < 1:
            raise ShapeError(f"QMatrix data must have shape (rows, cols, 4), got {arr.shape}")
        arr.setflags(write=False)
        self.data = arr

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None) -> "QMatrix":
        return cls(np.zeros((rows, rows if cols is None else cols, 4)))

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        data = np.zeros((n, n, 4))
        data[np.arange(n), np.arange(n), 0] = 1.0
        return cls(data)

    @classmethod
    def unit(cls, n: int, p: int, q: int, value: Quaternion = ONE) -> "QMatrix":
        """value * E_{pq}, 1-based indices."""
        data = np.zeros((n, n, 4))
        data[p - 1, q - 1] = value.as_array()
        return cls(data)

    @classmethod
    def diagonal(cls, values: Iterable[Quaternion]) -> "QMatrix":
        values = list(values)
        data = np.zeros((len(values), len(values), 4))
        for idx, value in enumerate(values):
            data[idx, idx] = value.as_array()
        return cls(data)

    @classmethod
    def diag_imaginary(cls, lam: Sequence[float]) -> "QMatrix":
        """D_lambda = diag(i lam_1, ..., i lam_n)."""
        return cls.diagonal(Quaternion(0.0, float(x)) for x in lam)

    @classmethod
    def from_literal(cls, literal: dict) -> "QMatrix":
        n = int(literal["n"])
        entries = np.array(literal["entries"], dtype=float)
        if entries.shape != (n * n, 4):
            raise ShapeError(f"Matrix literal for n={n} needs {n * n} entries of length 4")
        return cls(entries.reshape(n, n, 4))

    def to_literal(self) -> dict:
        if self.rows != self.cols:
            raise ShapeError("Matrix literals are square")
        return {"n": self.rows, "entries": self.data.reshape(-1, 4).tolist()}

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, index: tuple[int, int]) -> Quaternion:
        """1-based entry access, matching the matrix notation a_{pq}."""
        p, q = index
        return Quaternion.from_array(self.data[p - 1, q - 1])

    def star(self) -> "QMatrix":
        """Conjugate transpose A*."""
        return QMatrix(np.transpose(self.data, (1, 0, 2)) * _CONJ)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ShapeError(f"Cannot multiply {self.shape} by {other.shape}")
        return QMatrix(_matmul(self.data, other.data))

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data + other.data)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self.data - other.data)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self.data)

    def __mul__(self, scalar: float) -> "QMatrix":
        return QMatrix(self.data * float(scalar))

    __rmul__ = __mul__

    def left_scale(self, q: Quaternion) -> "QMatrix":
        """q * A, entrywise from the left."""
        return QMatrix(np.einsum("a,ijb,abc->ijc", q.as_array(), self.data, _HAMILTON))

    def right_scale(self, q: Quaternion) -> "QMatrix":
        """A * q, entrywise from the right."""
        return QMatrix(np.einsum("ija,b,abc->ijc", self.data, q.as_array(), _HAMILTON))

    def power(self, exponent: int) -> "QMatrix":
        if self.rows != self.cols:
            raise ShapeError("Powers need a square matrix")
        result = QMatrix.identity(self.rows)
        for _ in range(exponent):
            result = result @ self
        return result

    def commutator(self, other: "QMatrix") -> "QMatrix":
        return self @ other - other @ self

    def block(self, k: int) -> "QMatrix":
        return QMatrix(self.data[:k, :k])

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self.data**2)))

    def allclose(self, other: "QMatrix", tol: float = IDENTITY_TOL) -> bool:
        return self.shape == other.shape and bool(np.max(np.abs(self.data - other.data)) <= tol)

    def __repr__(self) -> str:
        return f"QMatrix(rows={self.rows}, cols={self.cols})"


def rtr(A: QMatrix) -> float:
    """Reduced trace: twice the real part of the sum of the diagonal entries."""
    if A.rows != A.cols:
        raise ShapeError(f"rtr needs a square matrix, got {A.shape}")
    return float(2.0 * np.trace(A.data[:, :, 0]))


def complex_index(i: int, n: int) -> int:
    """Array position of the basis index i in {-n..-1, 1..n}."""
    if i == 0 or abs(i) > n:
        raise ShapeError(f"Index {i} is not in the index set for n={n}")
    return n + i if i < 0 else n + i - 1


def index_set(n: int) -> list[int]:
    return list(range(-n, 0)) + list(range(1, n + 1))


def _positions(n: int) -> tuple[np.ndarray, np.ndarray]:
    negative = n - 1 - np.arange(n)
    positive = n + np.arange(n)
    return negative, positive


def embed_complex(A: QMatrix) -> ComplexMatrix:
    """Realize an n x n quaternionic matrix as a 2n x 2n complex matrix."""
    if A.rows != A.cols:
        raise ShapeError(f"embed_complex needs a square matrix, got {A.shape}")
    n = A.rows
    alpha = A.data[:, :, 0] + 1j * A.data[:, :, 1]
    beta = A.data[:, :, 2] - 1j * A.data[:, :, 3]
    neg, pos = _positions(n)
    out = np.zeros((2 * n, 2 * n), dtype=complex)
    out[np.ix_(neg, neg)] = alpha.conj()
    out[np.ix_(neg, pos)] = beta
    out[np.ix_(pos, neg)] = -beta.conj()
    out[np.ix_(pos, pos)] = alpha
    return out


def from_complex(M: ComplexMatrix, tol: float = MEMBERSHIP_TOL) -> QMatrix:
    """Inverse of embed_complex; rejects matrices that are not C-images of H-matrices."""
    M = np.asarray(M, dtype=complex)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ShapeError(f"Expected a 2n x 2n matrix, got {M.shape}")
    n = M.shape[0] // 2
    neg, pos = _positions(n)
    alpha = M[np.ix_(pos, pos)]
    beta = M[np.ix_(neg, pos)]
    if (
        np.max(np.abs(M[np.ix_(neg, neg)] - alpha.conj()), initial=0.0) > tol
        or np.max(np.abs(M[np.ix_(pos, neg)] + beta.conj()), initial=0.0) > tol
    ):
        raise DomainError("Complex matrix does not commute with the quaternionic structure")
    data = np.stack([alpha.real, alpha.imag, beta.real, -beta.imag], axis=-1)
    return QMatrix(data)


def column_to_complex(A: QMatrix, col: int) -> np.ndarray:
    """Complex coordinates of the quaternionic column `col` (1-based) in C^{2n}."""
    n = A.rows
    column = A.data[:, col - 1]
    neg, pos = _positions(n)
    vec = np.zeros(2 * n, dtype=complex)
    vec[pos] = column[:, 0] + 1j * column[:, 1]
    vec[neg] = column[:, 2] - 1j * column[:, 3]
    return vec


def complex_to_column(vec: np.ndarray) -> np.ndarray:
    """Quaternionic column (n, 4) whose C-coordinates are vec."""
    n = vec.shape[0] // 2
    neg, pos = _positions(n)
    z, w = vec[pos], vec[neg]
    return np.stack([z.real, z.imag, w.real, -w.imag], axis=-1)


def symplectic_form(n: int) -> ComplexMatrix:
    """Q = [[0, I~], [-I~, 0]] with I~ the antidiagonal identity."""
    anti = np.fliplr(np.eye(n))
    Q = np.zeros((2 * n, 2 * n), dtype=complex)
    Q[:n, n:] = anti
    Q[n:, :n] = -anti
    return Q


def symplectic_transpose(M: ComplexMatrix) -> ComplexMatrix:
    """tau(M) = Q^{-1} M^t Q; Q^{-1} = -Q."""
    M = np.asarray(M)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] % 2:
        raise ShapeError(f"Expected a 2n x 2n matrix, got {M.shape}")
    Q = symplectic_form(M.shape[0] // 2)
    return -Q @ M.T @ Q


def membership(M: QMatrix | ComplexMatrix, kind: MatrixKind, tol: float = MEMBERSHIP_TOL) -> bool:
    if kind in ("unitary_H", "skew_H"):
        if not isinstance(M, QMatrix):
            M = from_complex(M)
        if M.rows != M.cols:
            raise ShapeError(f"{kind} membership needs a square matrix")
        if kind == "unitary_H":
            residual = (M.star() @ M - QMatrix.identity(M.rows)).data
        else:
            residual = (M.star() + M).data
        return bool(np.max(np.abs(residual)) <= tol)

    C = embed_complex(M) if isinstance(M, QMatrix) else np.asarray(M, dtype=complex)
    if C.shape[0] != C.shape[1] or C.shape[0] % 2:
        raise ShapeError(f"{kind} membership needs a 2n x 2n matrix")
    Q = symplectic_form(C.shape[0] // 2)
    if kind == "sp_group":
        residual = C.T @ Q @ C - Q
    elif kind == "sp_algebra":
        residual = C.T @ Q + Q @ C
    else:
        raise ValueError(f"Unknown membership kind '{kind}'")
    return bool(np.max(np.abs(residual)) <= tol)


def require_skew(X: QMatrix, tol: float = MEMBERSHIP_TOL) -> None:
    if not membership(X, "skew_H", tol):
        raise DomainError("Matrix is not skew-H-hermitian (X* + X != 0)")


def sp_basis_element(i: int, j: int, n: int) -> ComplexMatrix:
    """F_{i,j} = E_{i,j} - sgn(i) sgn(j) E_{-j,-i} on the index set {-n..-1, 1..n}.

    The minus sign is what makes F_{i,j} satisfy X^t Q + Q X = 0 for the Q of
    symplectic_form; F_{i,-i} is returned as E_{i,-i}.
    """
    F = np.zeros((2 * n, 2 * n), dtype=complex)
    F[complex_index(i, n), complex_index(j, n)] += 1.0
    if i != -j:
        F[complex_index(-j, n), complex_index(-i, n)] -= np.sign(i) * np.sign(j)
    return F


def sp_basis(n: int, support: int | None = None) -> list[ComplexMatrix]:
    """The n(2n+1) independent F_{i,j}; with `support`, only indices |i|,|j| <= support."""
    m = n if support is None else support
    seen: set[tuple[int, int]] = set()
    basis: list[ComplexMatrix] = []
    for i in index_set(m):
        for j in index_set(m):
            partner = (-j, -i)
            if partner in seen:
                continue
            seen.add((i, j))
            basis.append(sp_basis_element(i, j, n))
    return basis


def h_inner(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """<u, v> = u* v for quaternionic columns of shape (n, 4)."""
    return np.einsum("ia,ib,abc->c", u * _CONJ, v, _HAMILTON)


def right_multiply(u: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.einsum("ia,b,abc->ic", u, q, _HAMILTON)


def gram_schmidt(columns: Sequence[np.ndarray], keep: int | None = None, tol: float = 1e-10) -> list[np.ndarray]:
    """Orthonormalize quaternionic columns over H, dropping ones that collapse."""
    basis: list[np.ndarray] = []
    for column in columns:
        v = np.array(column, dtype=float)
        for _ in range(2):
            for u in basis:
                v = v - right_multiply(u, h_inner(u, v))
        norm = float(np.sqrt(np.sum(v**2)))
        if norm <= tol:
            continue
        basis.append(v / norm)
        if keep is not None and len(basis) == keep:
            break
    return basis


def random_qmatrix(rng: np.random.Generator, rows: int, cols: int | None = None) -> QMatrix:
    return QMatrix(rng.standard_normal((rows, rows if cols is None else cols, 4)))


def random_skew(rng: np.random.Generator, n: int) -> QMatrix:
    G = random_qmatrix(rng, n)
    return (G - G.star()) * 0.5


def random_unitary(rng: np.random.Generator, n: int) -> QMatrix:
    """Gram-Schmidt over H of independent Gaussian quaternion columns."""
    G = rng.standard_normal((n, n, 4))
    columns = gram_schmidt([G[:, k] for k in range(n)])
    if len(columns) != n:  # pragma: no cover - probability zero
        raise DomainError("Gaussian sample was rank deficient")
    return QMatrix(np.stack(columns, axis=1))


def embed_upper_left(U: QMatrix, n: int) -> QMatrix:
    """diag(U, 1, ..., 1) as an n x n matrix."""
    data = QMatrix.identity(n).data.copy()
    k = U.rows
    data[:k, :k] = U.data
    return QMatrix(data)
