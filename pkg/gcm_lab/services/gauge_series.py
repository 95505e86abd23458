"""Truncated matrix power series in u^{-1} and the classical gauge-group picture.

A series A(u) = A_0 + A_1 u^{-1} + ... + A_K u^{-K} is stored as an array of
shape (K + 1, d, d).  All identities hold exactly through order K; anything of
higher order is discarded.  Matrices of size 2n are written in the ordered basis
e_{-n}, ..., e_{-1}, e_1, ..., e_n, with the symplectic form Q of quat_core and
tau(M) = Q^{-1} M^t Q.

The coordinate z_ij^(M)(A) is (A_M)_ij, with z_ij^(0) = delta_ij on pointed
series (A_0 = 1).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np
from scipy.linalg import expm
from scipy.special import comb

from gcm_lab.errors import DomainError, SeriesError, ShapeError
from gcm_lab.services.quat_core import (
    ComplexMatrix,
    QMatrix,
    complex_index,
    embed_complex,
    membership,
    require_skew,
    rtr,
    sp_basis,
    symplectic_form,
    symplectic_transpose,
)

logger = logging.getLogger(__name__)

AutomorphismKind = Literal["mult_g", "shift_a", "inv", "bar_tau"]

FACTOR_TOL = 1e-10
PARITY_TOL = 1e-10
POINTED_TOL = 1e-12
SINGULAR_COND = 1e12


class TruncatedMatrixSeries:
    """Immutable matrix series through order K."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: np.ndarray | Sequence) -> None:
        arr = np.array(coeffs, dtype=complex)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[0] < 1:
            raise ShapeError(f"Series coefficients must have shape (K+1, d, d), got {arr.shape}")
        arr.setflags(write=False)
        self.coeffs = arr

    @classmethod
    def identity(cls, dim: int, order: int) -> "TruncatedMatrixSeries":
        coeffs = np.zeros((order + 1, dim, dim), dtype=complex)
        coeffs[0] = np.eye(dim)
        return cls(coeffs)

    @classmethod
    def constant(cls, M: ComplexMatrix, order: int) -> "TruncatedMatrixSeries":
        M = np.asarray(M, dtype=complex)
        coeffs = np.zeros((order + 1, *M.shape), dtype=complex)
        coeffs[0] = M
        return cls(coeffs)

    @classmethod
    def linear(cls, X: ComplexMatrix, order: int) -> "TruncatedMatrixSeries":
        """1 + X u^{-1}."""
        out = np.array(cls.identity(np.asarray(X).shape[0], order).coeffs)
        if order >= 1:
            out[1] = X
        return cls(out)

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    @property
    def dim(self) -> int:
        return self.coeffs.shape[1]

    @property
    def is_pointed(self) -> bool:
        return bool(np.max(np.abs(self.coeffs[0] - np.eye(self.dim))) <= POINTED_TOL)

    def __getitem__(self, M: int) -> np.ndarray:
        return self.coeffs[M]

    def __matmul__(self, other: "TruncatedMatrixSeries") -> "TruncatedMatrixSeries":
        return series_mul(self, other)

    def __add__(self, other: "TruncatedMatrixSeries") -> "TruncatedMatrixSeries":
        _check_compatible(self, other)
        return TruncatedMatrixSeries(self.coeffs + other.coeffs)

    def __sub__(self, other: "TruncatedMatrixSeries") -> "TruncatedMatrixSeries":
        _check_compatible(self, other)
        return TruncatedMatrixSeries(self.coeffs - other.coeffs)

    def reflect(self) -> "TruncatedMatrixSeries":
        """A(-u): coefficient M picks up (-1)^M."""
        signs = (-1.0) ** np.arange(self.order + 1)
        return TruncatedMatrixSeries(self.coeffs * signs[:, None, None])

    def transpose(self) -> "TruncatedMatrixSeries":
        return TruncatedMatrixSeries(np.transpose(self.coeffs, (0, 2, 1)))

    def tau(self) -> "TruncatedMatrixSeries":
        """Coefficientwise symplectic transpose."""
        return TruncatedMatrixSeries(np.stack([symplectic_transpose(c) for c in self.coeffs]))

    def truncate(self, order: int) -> "TruncatedMatrixSeries":
        return TruncatedMatrixSeries(self.coeffs[: order + 1])

    def corner(self, positions: Sequence[int]) -> "TruncatedMatrixSeries":
        idx = np.asarray(positions)
        return TruncatedMatrixSeries(self.coeffs[:, idx[:, None], idx[None, :]])

    def max_abs_diff(self, other: "TruncatedMatrixSeries") -> np.ndarray:
        """Per-order max |A_M - B_M|."""
        _check_compatible(self, other)
        return np.max(np.abs(self.coeffs - other.coeffs), axis=(1, 2))

    def allclose(self, other: "TruncatedMatrixSeries", tol: float = FACTOR_TOL) -> bool:
        return bool(np.all(self.max_abs_diff(other) <= tol))

    def to_json(self) -> list[list[list[list[float]]]]:
        """Coefficients as [M][row][col] = [re, im]."""
        return np.stack([self.coeffs.real, self.coeffs.imag], axis=-1).tolist()

    def __repr__(self) -> str:
        return f"TruncatedMatrixSeries(dim={self.dim}, order={self.order})"


def _check_compatible(a: TruncatedMatrixSeries, b: TruncatedMatrixSeries) -> None:
    if a.dim != b.dim or a.order != b.order:
        raise ShapeError(f"Series mismatch: dim {a.dim}/{b.dim}, order {a.order}/{b.order}")


def _require_pointed(A: TruncatedMatrixSeries, what: str) -> None:
    if not A.is_pointed:
        raise SeriesError(f"{what} needs a pointed series (A_0 = 1)", order=0)


def series_mul(A: TruncatedMatrixSeries, B: TruncatedMatrixSeries) -> TruncatedMatrixSeries:
    """Cauchy product through order K."""
    _check_compatible(A, B)
    K = A.order
    out = np.zeros_like(A.coeffs)
    for M in range(K + 1):
        for k in range(M + 1):
            out[M] += A.coeffs[k] @ B.coeffs[M - k]
    return TruncatedMatrixSeries(out)


def series_inv(A: TruncatedMatrixSeries) -> TruncatedMatrixSeries:
    """Two-sided inverse; B_0 = A_0^{-1}, B_M = -A_0^{-1} sum_{k=1}^{M} A_k B_{M-k}."""
    A0 = A.coeffs[0]
    if A.is_pointed:
        A0_inv = np.eye(A.dim, dtype=complex)
    else:
        if np.linalg.cond(A0) > SINGULAR_COND:
            raise SeriesError("Constant term is singular; series has no inverse", order=0)
        A0_inv = np.linalg.inv(A0)
    out = np.zeros_like(A.coeffs)
    out[0] = A0_inv
    for M in range(1, A.order + 1):
        acc = np.zeros((A.dim, A.dim), dtype=complex)
        for k in range(1, M + 1):
            acc += A.coeffs[k] @ out[M - k]
        out[M] = -A0_inv @ acc
    return TruncatedMatrixSeries(out)


def shift_argument(A: TruncatedMatrixSeries, a: complex) -> TruncatedMatrixSeries:
    """A(u + a), using (u + a)^{-M} = sum_r (-1)^r C(M+r-1, r) a^r u^{-M-r}."""
    _require_pointed(A, "shift_argument")
    out = np.zeros_like(A.coeffs)
    out[0] = A.coeffs[0]
    for N in range(1, A.order + 1):
        for M in range(1, N + 1):
            r = N - M
            out[N] += A.coeffs[M] * ((-1) ** r * comb(N - 1, r, exact=True) * a**r)
    return TruncatedMatrixSeries(out)


def sigma(A: TruncatedMatrixSeries) -> TruncatedMatrixSeries:
    """Q^{-1} (A(-u)^t)^{-1} Q."""
    _require_pointed(A, "sigma")
    Q = symplectic_form(A.dim // 2)
    inner = series_inv(A.reflect().transpose())
    return TruncatedMatrixSeries(np.stack([-Q @ c @ Q for c in inner.coeffs]))


def s_map(A: TruncatedMatrixSeries) -> TruncatedMatrixSeries:
    """S(u) = A(u) tau(A(-u))."""
    _require_pointed(A, "s_map")
    return series_mul(A, A.reflect().tau())


def is_in_H(A: TruncatedMatrixSeries, tol: float = FACTOR_TOL) -> bool:
    return s_map(A).allclose(TruncatedMatrixSeries.identity(A.dim, A.order), tol)


@dataclass(frozen=True)
class SkewPairingSeries:
    """Phi(u) = Q + Phi_1 u^{-1} + ...; Phi_M symmetric for odd M, antisymmetric for even M."""

    series: TruncatedMatrixSeries

    @classmethod
    def from_coeffs(cls, coeffs: np.ndarray | Sequence) -> "SkewPairingSeries":
        return cls(TruncatedMatrixSeries(coeffs))

    @classmethod
    def constant(cls, n: int, order: int) -> "SkewPairingSeries":
        return cls(TruncatedMatrixSeries.constant(symplectic_form(n), order))

    @property
    def order(self) -> int:
        return self.series.order

    @property
    def dim(self) -> int:
        return self.series.dim

    @property
    def coeffs(self) -> np.ndarray:
        return self.series.coeffs

    def violations(self, tol: float = PARITY_TOL) -> list[int]:
        """Orders at which the defining symmetry fails."""
        bad = []
        Q = symplectic_form(self.dim // 2)
        scale = max(1.0, float(np.max(np.abs(self.coeffs))))
        if np.max(np.abs(self.coeffs[0] - Q)) > tol * scale:
            bad.append(0)
        for M in range(1, self.order + 1):
            c = self.coeffs[M]
            target = c if M % 2 else -c
            if np.max(np.abs(c.T - target)) > tol * scale:
                bad.append(M)
        return bad


def pairing_action(B: TruncatedMatrixSeries, phi: SkewPairingSeries) -> SkewPairingSeries:
    """(B . Phi)(u) = (B(u)^{-1})^t Phi(u) B(-u)^{-1}."""
    _require_pointed(B, "pairing_action")
    left = series_inv(B).transpose()
    right = series_inv(B.reflect())
    return SkewPairingSeries(series_mul(series_mul(left, phi.series), right))


def fixes_pairing(A: TruncatedMatrixSeries, tol: float = FACTOR_TOL) -> bool:
    Q = SkewPairingSeries.constant(A.dim // 2, A.order)
    return pairing_action(A, Q).series.allclose(Q.series, tol)


def pairing_of(C: TruncatedMatrixSeries) -> SkewPairingSeries:
    """C(u)^t Q C(-u), the pairing that C carries Q to under the inverse action."""
    Q = TruncatedMatrixSeries.constant(symplectic_form(C.dim // 2), C.order)
    return SkewPairingSeries(series_mul(series_mul(C.transpose(), Q), C.reflect()))


def _cross_terms(C: np.ndarray, Q: np.ndarray, m: int) -> np.ndarray:
    """sum over k + l = m with k, l >= 1 of (-1)^l C_k^t Q C_l."""
    acc = np.zeros_like(Q)
    for k in range(1, m):
        l = m - k
        acc += (-1) ** l * C[k].T @ Q @ C[l]
    return acc


def _solve_order(R: np.ndarray, m: int, tol: float) -> np.ndarray:
    """Y with -Y^t + (-1)^m Y = R; the homogeneous part is taken zero."""
    scale = max(1.0, float(np.max(np.abs(R))))
    if m % 2:
        if np.max(np.abs(R - R.T)) > tol * scale:
            raise SeriesError(f"Order-{m} right-hand side is not symmetric", order=m)
        return -0.5 * R
    if np.max(np.abs(R + R.T)) > tol * scale:
        raise SeriesError(f"Order-{m} right-hand side is not antisymmetric", order=m)
    return 0.5 * R


def _factor_through(phi: np.ndarray, Q: np.ndarray, rng: np.random.Generator | None, scale: float) -> np.ndarray:
    K = phi.shape[0] - 1
    dim = Q.shape[0]
    C = np.zeros_like(phi)
    C[0] = np.eye(dim)
    for m in range(1, K + 1):
        R = phi[m] - _cross_terms(C, Q, m)
        Y = _solve_order(R, m, PARITY_TOL)
        if rng is not None and scale:
            G = scale * (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)))
            Y = Y + (0.5 * (G - G.T) if m % 2 else 0.5 * (G + G.T))
        C[m] = -Q @ Y
    return C


def skew_factorize(phi: SkewPairingSeries) -> TruncatedMatrixSeries:
    """Pointed C with Phi(u) = C(u)^t Q C(-u) through order K (canonical section)."""
    bad = phi.violations()
    if bad:
        raise SeriesError(f"Pairing series violates its symmetry at order {bad[0]}", order=bad[0])
    Q = symplectic_form(phi.dim // 2)
    C = TruncatedMatrixSeries(_factor_through(phi.coeffs, Q, None, 0.0))
    residual = pairing_of(C).series.max_abs_diff(phi.series)
    scale = max(1.0, float(np.max(np.abs(phi.coeffs))))
    worst = int(np.argmax(residual))
    if residual[worst] > FACTOR_TOL * scale:
        raise SeriesError(f"Factorization residual {residual[worst]:.3e} at order {worst}", order=worst)
    logger.debug("skew_factorize: dim=%d order=%d residual=%.3e", phi.dim, phi.order, float(residual.max()))
    return C


def random_pointed_series(n: int, order: int, rng: np.random.Generator, scale: float = 0.5) -> TruncatedMatrixSeries:
    dim = 2 * n
    coeffs = scale * (rng.standard_normal((order + 1, dim, dim)) + 1j * rng.standard_normal((order + 1, dim, dim)))
    coeffs[0] = np.eye(dim)
    return TruncatedMatrixSeries(coeffs)


def sample_H_element(n: int, order: int, seed: int | Sequence[int], scale: float = 0.5) -> TruncatedMatrixSeries:
    """An element of the stabilizer subgroup: the order-by-order solve for Phi = Q plus random homogeneous parts."""
    rng = np.random.default_rng(seed)
    Q = symplectic_form(n)
    phi = np.zeros((order + 1, 2 * n, 2 * n), dtype=complex)
    phi[0] = Q
    return TruncatedMatrixSeries(_factor_through(phi, Q, rng, scale))


@dataclass(frozen=True)
class GeneratorPolynomial:
    """Coordinate form of a deformation-family automorphism.

    terms[N] lists (L, h_power, scalar): the image of z^(N) is
    sum scalar * h^h_power * z^(L), with z^(0) the identity.  Both families
    act on every matrix entry the same way.
    """

    kind: AutomorphismKind
    order: int
    terms: tuple[tuple[tuple[int, int, complex], ...], ...]

    def apply(self, A: TruncatedMatrixSeries, h: float = 1.0) -> TruncatedMatrixSeries:
        if A.order != self.order:
            raise ShapeError(f"Generator data is for order {self.order}, series has order {A.order}")
        out = np.zeros_like(A.coeffs)
        for N, row in enumerate(self.terms):
            for L, power, scalar in row:
                out[N] += scalar * h**power * A.coeffs[L]
        return TruncatedMatrixSeries(out)

    def deviation_bound(self, A: TruncatedMatrixSeries) -> np.ndarray:
        """Per-order bound B_N with max|image_N - A_N| <= h * B_N for 0 <= h <= 1."""
        sizes = np.max(np.abs(A.coeffs), axis=(1, 2))
        return np.array([sum(abs(s) * sizes[L] for L, p, s in row if p >= 1) for row in self.terms])


def generator_polynomial(kind: AutomorphismKind, order: int, params: dict | None = None) -> GeneratorPolynomial:
    params = params or {}
    if kind == "mult_g":
        g = _scalar_series(params, order)
        terms = tuple(tuple((N - K, K, complex(g[K])) for K in range(N + 1)) for N in range(order + 1))
    elif kind == "shift_a":
        a = complex(params.get("a", 0.0))
        terms = tuple(
            ((0, 0, 1.0 + 0j),)
            if N == 0
            else tuple((L, N - L, (-1) ** (N - L) * comb(N - 1, N - L, exact=True) * a ** (N - L)) for L in range(1, N + 1))
            for N in range(order + 1)
        )
    else:
        raise DomainError(f"'{kind}' has no h-dependent coordinate form")
    return GeneratorPolynomial(kind, order, terms)


def _scalar_series(params: dict, order: int) -> np.ndarray:
    g = np.zeros(order + 1, dtype=complex)
    values = np.asarray(params.get("g", [1.0]), dtype=complex)
    g[: min(len(values), order + 1)] = values[: order + 1]
    if abs(g[0] - 1.0) > POINTED_TOL:
        raise DomainError(f"mult_g needs g_0 = 1, got {g[0]}")
    return g


def basic_automorphism(
    A: TruncatedMatrixSeries,
    which: AutomorphismKind,
    params: dict | None = None,
    h: float | None = None,
) -> TruncatedMatrixSeries:
    """mult_g: g(u)A(u); shift_a: A(u+a); inv: A(-u)^{-1}; bar_tau: tau(A(-u)).

    With h, mult_g multiplies by sum g_K h^K u^{-K} and shift_a shifts by a*h;
    inv and bar_tau do not depend on h.
    """
    _require_pointed(A, "basic_automorphism")
    params = params or {}
    scale = 1.0 if h is None else h
    if which == "mult_g":
        g = _scalar_series(params, A.order) * scale ** np.arange(A.order + 1)
        return TruncatedMatrixSeries(
            np.stack([sum(g[K] * A.coeffs[N - K] for K in range(N + 1)) for N in range(A.order + 1)])
        )
    if which == "shift_a":
        return shift_argument(A, complex(params.get("a", 0.0)) * scale)
    if which == "inv":
        return series_inv(A.reflect())
    if which == "bar_tau":
        return A.reflect().tau()
    raise DomainError(f"Unknown automorphism '{which}'")


def _require_sp(X: ComplexMatrix) -> np.ndarray:
    X = np.asarray(X, dtype=complex)
    if X.ndim != 2 or X.shape[0] != X.shape[1] or X.shape[0] % 2:
        raise ShapeError(f"Expected a 2n x 2n matrix, got {X.shape}")
    if not membership(X, "sp_algebra"):
        raise DomainError("Matrix is not in sp(2n,C) (X^t Q + Q X != 0)")
    return X


def _corner_positions(dim: int) -> list[int]:
    n = dim // 2
    return [complex_index(-n, n), complex_index(n, n)]


def psi0_corner(X: ComplexMatrix, order: int) -> TruncatedMatrixSeries:
    """(+-n, +-n) corner of sum_M X^M u^{-M}."""
    X = _require_sp(X)
    powers = [np.eye(X.shape[0], dtype=complex)]
    for _ in range(order):
        powers.append(powers[-1] @ X)
    return TruncatedMatrixSeries(np.stack(powers)).corner(_corner_positions(X.shape[0]))


def psi_chain(X: ComplexMatrix, order: int) -> TruncatedMatrixSeries:
    """Corner of S(-u)^{-1} for S(u) = 1 + X u^{-1}, built by series arithmetic."""
    X = _require_sp(X)
    S = TruncatedMatrixSeries.linear(X, order)
    return series_inv(S.reflect()).corner(_corner_positions(X.shape[0]))


@dataclass(frozen=True)
class QuaternionSeries:
    """Quaternion coefficients q_0..q_K, shape (K + 1, 4)."""

    coeffs: np.ndarray

    @property
    def order(self) -> int:
        return self.coeffs.shape[0] - 1

    def embedded(self) -> TruncatedMatrixSeries:
        return TruncatedMatrixSeries(np.stack([embed_complex(QMatrix(q.reshape(1, 1, 4))) for q in self.coeffs]))


def psi_H(X: QMatrix, order: int) -> QuaternionSeries:
    """(n, n) entries of X^M, M = 0..K."""
    require_skew(X)
    coeffs = []
    power = QMatrix.identity(X.rows)
    for M in range(order + 1):
        if M:
            power = power @ X
        coeffs.append(power.data[-1, -1].copy())
    return QuaternionSeries(np.stack(coeffs))


def verify_fmn_pullback(X: QMatrix, order: int, corners: TruncatedMatrixSeries | None = None) -> dict:
    """Corner-trace coordinate of the complex corner series against psi_H and rtr(X^M E_nn).

    `corners` defaults to psi0_corner of the complex embedding of X, so the
    series coordinate, 2 Re (X^M)_nn and the reduced trace come from three
    separate computations.
    """
    require_skew(X)
    series = psi_H(X, order)
    if corners is None:
        corners = psi0_corner(embed_complex(X), order)
    if corners.order < order:
        raise SeriesError(f"Corner series has order {corners.order}, need {order}", corners.order)
    rows = []
    worst = 0.0
    odd_ok = True
    norm = max(1.0, X.frobenius_norm())
    E = QMatrix.unit(X.rows, X.rows, X.rows)
    power = QMatrix.identity(X.rows)
    for M in range(order + 1):
        if M:
            power = power @ X
        corner_sum = float(np.trace(corners.coeffs[M]).real)
        two_re = float(2.0 * series.coeffs[M][0])
        direct = rtr(power @ E)
        scale = norm**M
        residual = max(abs(corner_sum - two_re), abs(two_re - direct), abs(corner_sum - direct)) / scale
        worst = max(worst, residual)
        vanishes = abs(direct) <= 1e-12 * scale if M % 2 else None
        if vanishes is False:
            odd_ok = False
        rows.append(
            {"M": M, "series_coordinate": corner_sum, "two_re": two_re, "rtr": direct, "odd_vanishes": vanishes}
        )
    return {
        "experiment": "pullback",
        "n": X.rows,
        "order": order,
        "coefficients": rows,
        "max_relative_residual": worst,
        "pass": worst <= FACTOR_TOL and odd_ok,
    }


def embedded_sp_element(n: int, coefficients: Sequence[complex]) -> np.ndarray:
    """exp of a combination of the sp(2(n-1),C) basis, acting trivially on e_{+-n}."""
    basis = sp_basis(n, support=n - 1)
    if len(coefficients) != len(basis):
        raise ShapeError(f"Need {len(basis)} coefficients, got {len(coefficients)}")
    Z = sum((c * F for c, F in zip(coefficients, basis)), np.zeros((2 * n, 2 * n), dtype=complex))
    return expm(Z)


def random_sp_algebra(n: int, rng: np.random.Generator, scale: float = 0.5) -> np.ndarray:
    basis = sp_basis(n)
    c = scale * (rng.standard_normal(len(basis)) + 1j * rng.standard_normal(len(basis)))
    return sum((ci * F for ci, F in zip(c, basis)), np.zeros((2 * n, 2 * n), dtype=complex))


# -- Poisson structure on coordinates ------------------------------------------------

Coordinate = tuple[int, int, int]  # array row, array column, order


def _z(A: TruncatedMatrixSeries, p: int, q: int, M: int) -> complex:
    if M == 0:
        return 1.0 + 0j if p == q else 0j
    return complex(A.coeffs[M, p, q])


def _bracket_positions(a: Coordinate, b: Coordinate, A: TruncatedMatrixSeries) -> complex:
    (i, j, M), (k, l, N) = a, b
    top = M + N - 1
    if min(M, N) > 0 and top > A.order:
        raise SeriesError(f"Bracket needs order {top}, series has order {A.order}", order=top)
    total = 0j
    for r in range(min(M, N)):
        total += _z(A, k, j, r) * _z(A, i, l, top - r) - _z(A, k, j, top - r) * _z(A, i, l, r)
    return total


def coord_poisson(i: int, j: int, M: int, k: int, l: int, N: int, A: TruncatedMatrixSeries) -> complex:
    """{z_ij^(M), z_kl^(N)}(A) for indices in {-n..-1, 1..n}."""
    _require_pointed(A, "coord_poisson")
    n = A.dim // 2
    a = (complex_index(i, n), complex_index(j, n), M)
    b = (complex_index(k, n), complex_index(l, n), N)
    return _bracket_positions(a, b, A)


def _bracket_terms(a: Coordinate, b: Coordinate) -> list[tuple[float, Coordinate, Coordinate]]:
    """{z_a, z_b} as a list of (sign, x, y) meaning sign * z_x * z_y."""
    (i, j, M), (k, l, N) = a, b
    top = M + N - 1
    terms = []
    for r in range(min(M, N)):
        terms.append((1.0, (k, j, r), (i, l, top - r)))
        terms.append((-1.0, (k, j, top - r), (i, l, r)))
    return terms


def jacobi_residual(a: Coordinate, b: Coordinate, c: Coordinate, A: TruncatedMatrixSeries) -> complex:
    """{z_a,{z_b,z_c}} + {z_b,{z_c,z_a}} + {z_c,{z_a,z_b}} at A (array positions)."""

    def outer(x: Coordinate, y: Coordinate, w: Coordinate) -> complex:
        total = 0j
        for sign, p, q in _bracket_terms(y, w):
            left = _bracket_positions(x, p, A) if p[2] else 0j
            right = _bracket_positions(x, q, A) if q[2] else 0j
            total += sign * (left * _z(A, *q) + _z(A, *p) * right)
        return total

    return outer(a, b, c) + outer(b, c, a) + outer(c, a, b)


LinearCoordinate = tuple[complex, list[tuple[complex, Coordinate]]]


def left_translate(g: TruncatedMatrixSeries, coord: Coordinate) -> LinearCoordinate:
    """x -> z_pq^(M)(g x) as constant + sum coef * z^(b)(x)."""
    p, q, M = coord
    const = complex(g.coeffs[M, p, q])
    terms = [(complex(g.coeffs[M - b, p, s]), (s, q, b)) for b in range(1, M + 1) for s in range(g.dim)]
    return const, terms


def right_translate(g: TruncatedMatrixSeries, coord: Coordinate) -> LinearCoordinate:
    """x -> z_pq^(M)(x g) as constant + sum coef * z^(a)(x)."""
    p, q, M = coord
    const = complex(g.coeffs[M, p, q])
    terms = [(complex(g.coeffs[M - a, s, q]), (p, s, a)) for a in range(1, M + 1) for s in range(g.dim)]
    return const, terms


def _bracket_linear(f1: LinearCoordinate, f2: LinearCoordinate, A: TruncatedMatrixSeries) -> complex:
    total = 0j
    for c1, x in f1[1]:
        if c1 == 0:
            continue
        for c2, y in f2[1]:
            if c2 != 0:
                total += c1 * c2 * _bracket_positions(x, y, A)
    return total


def poisson_lie_residual(
    a: Coordinate, b: Coordinate, g: TruncatedMatrixSeries, g_prime: TruncatedMatrixSeries
) -> complex:
    """{f1,f2}(g g') - {L_g* f1, L_g* f2}(g') - {R_g'* f1, R_g'* f2}(g)."""
    lhs = _bracket_positions(a, b, series_mul(g, g_prime))
    rhs = _bracket_linear(left_translate(g, a), left_translate(g, b), g_prime)
    rhs += _bracket_linear(right_translate(g_prime, a), right_translate(g_prime, b), g)
    return lhs - rhs
