import numpy as np
import pytest

from gcm_lab.services.gcm_system import (
    FunctionFamily,
    assemble_family,
    casimir_member,
    f_member,
    g_last_member,
    g_member,
    probe_member,
    thimm_member,
)
from gcm_lab.services.poisson_lab import (
    bracket_from_gradients,
    certify_commutativity,
    certify_independence,
    certify_reduced_independence,
    gradient,
    lie_algebra_basis,
    numerical_rank,
    poisson_bracket,
    sample_generic_point,
)
from gcm_lab.services.quat_core import random_skew, rtr


def _linear(Z):
    return lambda Y: rtr(Y @ Z)


def test_basis_is_orthonormal_for_the_trace_pairing() -> None:
    for n in range(1, 4):
        basis = lie_algebra_basis(n)
        assert basis.dim == 2 * n * n + n
        gram = np.array([[-rtr(a @ b) for b in basis.elements] for a in basis.elements])
        assert np.allclose(gram, np.eye(basis.dim), atol=1e-12)


def test_coordinates_round_trip() -> None:
    X = random_skew(np.random.default_rng(1), 3)
    basis = lie_algebra_basis(3)
    assert basis.from_coordinates(basis.coordinates(X)).allclose(X, 1e-12)


def test_gradient_of_linear_function() -> None:
    rng = np.random.default_rng(2)
    X, Z = random_skew(rng, 3), random_skew(rng, 3)
    assert gradient(_linear(Z), X).allclose(-Z, 1e-8)


def test_gradient_of_quadratic_function() -> None:
    X = random_skew(np.random.default_rng(3), 2)
    assert gradient(lambda Y: rtr(Y @ Y), X).allclose(X * -2.0, 1e-7)


def test_bracket_of_linear_functions_matches_commutator() -> None:
    rng = np.random.default_rng(4)
    for n in range(1, 5):
        for _ in range(25):
            X, Z1, Z2 = (random_skew(rng, n) for _ in range(3))
            exact = rtr(X @ Z1.commutator(Z2))
            scale = X.frobenius_norm() * Z1.frobenius_norm() * Z2.frobenius_norm()
            assert abs(poisson_bracket(_linear(Z1), _linear(Z2), X) - exact) <= 1e-8 * max(1.0, scale)


def test_bracket_is_antisymmetric_and_leibniz() -> None:
    rng = np.random.default_rng(5)
    X, Z1, Z2, Z3 = (random_skew(rng, 3) for _ in range(4))
    f, g, h = _linear(Z1), _linear(Z2), _linear(Z3)
    assert poisson_bracket(f, g, X) == pytest.approx(-poisson_bracket(g, f, X), abs=1e-10)
    assert poisson_bracket(f, f, X) == pytest.approx(0.0, abs=1e-10)
    product = lambda Y: f(Y) * g(Y)  # noqa: E731
    lhs = poisson_bracket(product, h, X)
    rhs = f(X) * poisson_bracket(g, h, X) + g(X) * poisson_bracket(f, h, X)
    assert lhs == pytest.approx(rhs, rel=1e-6, abs=1e-6)


def test_central_difference_error_is_second_order() -> None:
    point, _ = sample_generic_point((-1.0, -3.0), 0, 0)
    X = point.X
    basis = lie_algebra_basis(2)
    direction = basis.from_coordinates(np.random.default_rng(6).standard_normal(basis.dim))
    direction = direction * (1.0 / direction.frobenius_norm())
    f = f_member(0, 2)

    def central(h: float) -> float:
        return (f(X + direction * h) - f(X - direction * h)) / (2.0 * h)

    d1 = central(0.05) - central(0.025)
    d2 = central(0.025) - central(0.0125)
    assert 3.5 < d1 / d2 < 4.5


def test_casimir_brackets_vanish() -> None:
    point, _ = sample_generic_point((-1.0, -2.0, -4.0), 1, 0)
    for member in assemble_family(3):
        for m in (1, 2, 3):
            grads = [gradient(casimir_member(m), point.X), gradient(member, point.X)]
            assert abs(bracket_from_gradients(point.X, *grads)) < 2e-5


def test_commutativity_certificate_for_n2() -> None:
    report = certify_commutativity(assemble_family(2), (-1.0, -3.0), 20, 2e-5, 0, threads=1)
    assert report.passed
    assert report.to_dict()["max_overall"] < 2e-5
    assert set(report.max_abs_bracket) == {
        "thimm(1,1)|g(0,1)",
        "thimm(1,1)|g_last(0)",
        "thimm(1,1)|g_last(1)",
        "g(0,1)|g_last(0)",
        "g(0,1)|g_last(1)",
        "g_last(0)|g_last(1)",
    }


def test_commutativity_certificate_for_n3() -> None:
    report = certify_commutativity(assemble_family(3), (-1.0, -2.0, -4.0), 20, 2e-5, 0)
    assert report.passed
    assert len(report.max_abs_bracket) == 36


def test_commutativity_certificate_for_n3_f_variant() -> None:
    report = certify_commutativity(assemble_family(3, "f"), (-1.0, -2.0, -4.0), 3, 2e-5, 0)
    assert report.passed


def test_single_member_family_passes_vacuously() -> None:
    report = certify_commutativity(assemble_family(1), (-2.0,), 2, 2e-5, 0)
    assert report.passed
    assert report.to_dict()["max_abs_bracket"] == {}


def test_probe_does_not_commute() -> None:
    family = FunctionFamily(2, (g_last_member(0, 2), probe_member()), "probe")
    report = certify_commutativity(family, (-1.0, -3.0), 3, 2e-5, 0)
    assert not report.passed


def test_independence_reaches_n_squared() -> None:
    assert certify_independence(assemble_family(2), (-1.0, -3.0), 10, 1e-6, 0).ranks == [4] * 10
    report = certify_independence(assemble_family(3), (-1.0, -2.0, -4.0), 20, 1e-6, 0)
    assert report.ranks == [9] * 20
    assert report.ambient_ranks == [9] * 20
    assert report.to_dict()["certified_rank"] == "orbit_tangent"


def test_duplicated_member_loses_one_rank() -> None:
    members = list(assemble_family(2).members)
    members[-1] = members[0]
    family = FunctionFamily(2, tuple(members), "duplicated")
    report = certify_independence(family, (-1.0, -3.0), 5, 1e-6, 0)
    assert not report.passed
    assert report.ranks == [3] * 5


def test_thimm_baseline_rank() -> None:
    report = certify_independence(assemble_family(3, "thimm"), (-1.0, -2.0, -4.0), 3, 1e-6, 0, expected_rank=3)
    assert report.passed


def test_reduced_independence_gains_n() -> None:
    for lam in ((-1.0, -3.0), (-1.0, -2.0, -4.0)):
        report = certify_reduced_independence(len(lam), lam, 3, 1e-6, 0)
        assert report["pass"]
        assert report["rank_gains"] == [len(lam)] * 3


def test_numerical_rank_of_empty_matrix() -> None:
    rank, sv = numerical_rank(np.zeros((0, 10)))
    assert rank == 0 and sv.size == 0


def test_level_members_commute_with_each_other() -> None:
    point, _ = sample_generic_point((-1.0, -2.0, -4.0), 2, 0)
    pairs = [(g_member(0, 1), thimm_member(1, 2)), (g_member(1, 1), g_last_member(0, 3))]
    for a, b in pairs:
        assert abs(poisson_bracket(a, b, point.X)) < 2e-5
