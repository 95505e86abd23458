import numpy as np
import pytest
from scipy.linalg import expm

from gcm_lab.errors import DomainError, ShapeError
from gcm_lab.services.quat_core import (
    I,
    J,
    K,
    ONE,
    QMatrix,
    Quaternion,
    complex_index,
    embed_complex,
    embed_upper_left,
    from_complex,
    membership,
    random_qmatrix,
    random_skew,
    random_unitary,
    require_skew,
    rtr,
    sp_basis,
    sp_basis_element,
    symplectic_form,
    symplectic_transpose,
)


def test_hamilton_products() -> None:
    assert (I * J).isclose(K)
    assert (J * I).isclose(-K)
    assert (J * K).isclose(I)
    assert (K * I).isclose(J)
    assert (I * I).isclose(-ONE)


def test_complex_pair_round_trip() -> None:
    q = Quaternion(0.3, -1.2, 0.7, 2.5)
    alpha, beta = q.complex_pair()
    assert Quaternion.from_complex_pair(alpha, beta).isclose(q)


def test_reduced_trace_matches_embedding_trace() -> None:
    rng = np.random.default_rng(3)
    for n in range(1, 5):
        A = random_qmatrix(rng, n)
        assert rtr(A) == pytest.approx(float(np.trace(embed_complex(A)).real), abs=1e-12)


def test_embedding_is_multiplicative() -> None:
    rng = np.random.default_rng(4)
    A, B = random_qmatrix(rng, 3), random_qmatrix(rng, 3)
    assert np.allclose(embed_complex(A @ B), embed_complex(A) @ embed_complex(B), atol=1e-12)
    assert np.allclose(embed_complex(A.star()), embed_complex(A).conj().T, atol=1e-12)


def test_from_complex_inverts_embedding() -> None:
    A = random_qmatrix(np.random.default_rng(5), 3)
    assert from_complex(embed_complex(A)).allclose(A)


def test_from_complex_rejects_non_quaternionic_matrix() -> None:
    M = np.random.default_rng(6).standard_normal((4, 4)) + 0j
    with pytest.raises(DomainError):
        from_complex(M)


def test_unitary_and_skew_samples_are_members() -> None:
    rng = np.random.default_rng(7)
    for n in range(1, 5):
        U = random_unitary(rng, n)
        X = random_skew(rng, n)
        assert membership(U, "unitary_H")
        assert membership(X, "skew_H")
        assert membership(embed_complex(U), "sp_group")
        assert membership(embed_complex(X), "sp_algebra")


def test_single_j_embeds_as_the_symplectic_form() -> None:
    assert np.allclose(embed_complex(QMatrix.diagonal([J])), symplectic_form(1))


def test_symplectic_transpose_is_an_involution() -> None:
    M = np.random.default_rng(8).standard_normal((6, 6)) + 0j
    assert np.allclose(symplectic_transpose(symplectic_transpose(M)), M)


def test_symplectic_transpose_is_the_adjoint_for_the_form() -> None:
    rng = np.random.default_rng(9)
    Q = symplectic_form(3)
    for _ in range(5):
        M = rng.standard_normal((6, 6)) + 1j * rng.standard_normal((6, 6))
        v = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        w = rng.standard_normal(6) + 1j * rng.standard_normal(6)
        assert (M @ v) @ Q @ w == pytest.approx(v @ Q @ (symplectic_transpose(M) @ w), abs=1e-10)


def test_exponentiated_basis_element_is_symplectic() -> None:
    F = sp_basis_element(1, 2, 2)
    for t in (0.3, -1.1):
        assert membership(expm(t * F), "sp_group", tol=1e-9)


def test_sp_basis_has_full_dimension_and_lies_in_the_algebra() -> None:
    for n in range(1, 4):
        basis = sp_basis(n)
        assert len(basis) == n * (2 * n + 1)
        assert all(membership(F, "sp_algebra") for F in basis)
        stacked = np.stack([F.ravel() for F in basis])
        assert np.linalg.matrix_rank(stacked) == len(basis)


def test_sp_basis_with_support_stays_off_the_last_indices() -> None:
    n = 3
    rows = [complex_index(-n, n), complex_index(n, n)]
    for F in sp_basis(n, support=n - 1):
        assert np.all(F[rows, :] == 0) and np.all(F[:, rows] == 0)
    assert len(sp_basis(n, support=n - 1)) == (n - 1) * (2 * n - 1)


def test_complex_index_rejects_zero_and_out_of_range() -> None:
    assert complex_index(-2, 2) == 0
    assert complex_index(2, 2) == 3
    with pytest.raises(ShapeError):
        complex_index(0, 2)
    with pytest.raises(ShapeError):
        complex_index(3, 2)


def test_require_skew_rejects_identity() -> None:
    with pytest.raises(DomainError):
        require_skew(QMatrix.identity(2))


def test_embed_upper_left_keeps_unit_corner() -> None:
    U = random_unitary(np.random.default_rng(9), 2)
    V = embed_upper_left(U, 3)
    assert V[3, 3].isclose(ONE)
    assert membership(V, "unitary_H")


def test_matrix_literal_round_trip_and_shape_check() -> None:
    A = random_qmatrix(np.random.default_rng(10), 2)
    assert QMatrix.from_literal(A.to_literal()).allclose(A)
    with pytest.raises(ShapeError):
        QMatrix.from_literal({"n": 2, "entries": [[0, 0, 0, 0]]})
