"""Suite orchestration behind `run`: every suite returns a JSON-ready dict with a "pass" key."""

from __future__ import annotations

import logging
from itertools import combinations_with_replacement
from typing import Callable, Sequence

import numpy as np

from gcm_lab import models
from gcm_lab.config import GCM_LAB_THREADS, RANK_TOL
from gcm_lab.errors import ConfigError, SeriesError
from gcm_lab.models import YANGIAN_SUITES
from gcm_lab.services.gauge_series import (
    FACTOR_TOL,
    SkewPairingSeries,
    TruncatedMatrixSeries,
    basic_automorphism,
    coord_poisson,
    embedded_sp_element,
    fixes_pairing,
    generator_polynomial,
    is_in_H,
    jacobi_residual,
    pairing_action,
    pairing_of,
    poisson_lie_residual,
    psi0_corner,
    psi_chain,
    psi_H,
    random_pointed_series,
    random_sp_algebra,
    s_map,
    sample_H_element,
    sigma,
    skew_factorize,
    verify_fmn_pullback,
)
from gcm_lab.services.gcm_system import (
    FunctionFamily,
    assemble_family,
    casimir_family,
    g_last_member,
    g_member,
    probe_member,
    thimm_member,
)
from gcm_lab.services.patterns import count_gl_patterns, count_sp_patterns, weyl_dim_gl, weyl_dim_sp
from gcm_lab.services.poisson_lab import (
    certify_commutativity,
    certify_independence,
    certify_reduced_independence,
    conjugation_invariance,
    sample_generic_point,
)
from gcm_lab.services.quat_core import (
    QMatrix,
    complex_index,
    embed_complex,
    embed_upper_left,
    index_set,
    random_skew,
    random_unitary,
    sp_basis,
)
from gcm_lab.services.reports import ReportStore
from gcm_lab.services.validator import RunConfigValidator

logger = logging.getLogger(__name__)

INVARIANCE_TOL = 1e-9
MOVES_FLOOR = 1e-6
PSI_TOL = 1e-10
SP_INVARIANCE_TOL = 1e-8
POISSON_TOL = 1e-9
H_GRID = (1.0, 0.5, 0.25, 0.125, 0.0625, 0.0)
SERIES_SCALE = 0.3


def _rng(seed: int, tag: str, index: int) -> np.random.Generator:
    return np.random.default_rng([seed, YANGIAN_SUITES.index(tag), index])


def _rel_diff(a: np.ndarray, b: np.ndarray) -> float:
    a, b = np.asarray(a), np.asarray(b)
    scale = max(1.0, float(np.max(np.abs(a), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
    return float(np.max(np.abs(a - b), initial=0.0)) / scale


# -- orbit suites ------------------------------------------------------------------


def run_commute(config: models.RunConfig, threads: int | None = None) -> dict:
    n, lam = config.n, config.lam
    g_family = assemble_family(n, "g")
    with_casimirs = FunctionFamily(n, g_family.members + casimir_family(n).members, "g+casimir")
    families = {}
    for family in (with_casimirs, assemble_family(n, "f")):
        report = certify_commutativity(
            family, lam, config.trials, config.tol, config.seed, fd_step=config.fd_step, threads=threads
        )
        families[family.variant] = report.to_dict()

    probe = FunctionFamily(n, (g_last_member(0, n), probe_member()), "probe")
    control = certify_commutativity(
        probe, lam, min(config.trials, 3), config.tol, config.seed, fd_step=config.fd_step, threads=threads
    ).to_dict()
    detected = not control["pass"]
    return {
        "experiment": "commute",
        "n": n,
        "lambda": lam,
        "trials": config.trials,
        "families": families,
        "negative_control": {"members": probe.labels, "max_abs_bracket": control["max_overall"], "detected": detected},
        "pass": all(f["pass"] for f in families.values()) and detected,
    }


def run_independence(config: models.RunConfig, threads: int | None = None) -> dict:
    n, lam = config.n, config.lam
    common = dict(lam=lam, trials=config.trials, tol_rank=RANK_TOL, seed=config.seed, fd_step=config.fd_step, threads=threads)
    families = {}
    for variant in ("g", "f"):
        families[variant] = certify_independence(assemble_family(n, variant), **common).to_dict()

    controls = {}
    if n >= 2:
        baseline = assemble_family(n, "thimm")
        controls["thimm"] = certify_independence(baseline, expected_rank=len(baseline), **common).to_dict()
        members = list(assemble_family(n, "g").members)
        members[-1] = members[0]
        duplicated = FunctionFamily(n, tuple(members), "duplicated")
        controls["duplicated"] = certify_independence(duplicated, expected_rank=n * n - 1, **common).to_dict()
    return {
        "experiment": "independence",
        "n": n,
        "lambda": lam,
        "trials": config.trials,
        "expected_rank": n * n,
        "families": families,
        "controls": controls,
        "pass": all(r["pass"] for r in (*families.values(), *controls.values())),
    }


def run_reduced(config: models.RunConfig, threads: int | None = None) -> dict:
    n, lam = config.n, config.lam
    rank_report = certify_reduced_independence(
        n, lam, config.trials, RANK_TOL, config.seed, fd_step=config.fd_step, threads=threads
    )
    report = {
        "experiment": "reduced",
        "n": n,
        "lambda": lam,
        "trials": config.trials,
        "rank": rank_report,
    }
    if n == 1:
        report["invariance"] = {"skipped": "U(0,H) is trivial"}
        report["pass"] = rank_report["pass"]
        return report

    level0 = FunctionFamily(n, tuple([g_member(0, m) for m in range(1, n)] + [g_last_member(0, n)]), "level0")
    moving = FunctionFamily(n, (thimm_member(n - 1, 1),), "thimm-top")
    worst_invariant = 0.0
    largest_move = 0.0
    for t in range(config.trials):
        point, _ = sample_generic_point(lam, config.seed, t)
        rng = np.random.default_rng([config.seed, t, 1])
        worst_invariant = max(worst_invariant, float(np.max(conjugation_invariance(level0, point, random_unitary(rng, n - 1)))))
        largest_move = max(largest_move, float(np.max(conjugation_invariance(moving, point, random_unitary(rng, n)))))
    scale = max(1.0, max(abs(x) for x in lam))
    report["invariance"] = {
        "max_level0_change": worst_invariant,
        "tol": INVARIANCE_TOL * scale,
        "negative_control": {"member": moving.labels[0], "max_change": largest_move, "detected": largest_move > MOVES_FLOOR},
    }
    report["pass"] = rank_report["pass"] and worst_invariant <= INVARIANCE_TOL * scale and largest_move > MOVES_FLOOR
    return report


# -- patterns ----------------------------------------------------------------------


def _nonincreasing(n: int, low: int, high: int) -> list[tuple[int, ...]]:
    return [tuple(sorted(c, reverse=True)) for c in combinations_with_replacement(range(low, high + 1), n)]


def run_patterns(config: models.RunConfig | None = None, threads: int | None = None) -> dict:
    mismatches: list[dict] = []
    gl_cases = sp_cases = 0
    for n in range(1, 5):
        for top in _nonincreasing(n, 0, 4):
            gl_cases += 1
            count, dim = count_gl_patterns(top), weyl_dim_gl(top)
            if count != dim:
                mismatches.append({"kind": "gl", "top": list(top), "count": count, "weyl_dim": dim})
            if max(top) <= 3 and count_gl_patterns(tuple(x + 1 for x in top)) != count:
                mismatches.append({"kind": "gl-shift", "top": list(top)})
    for n in range(1, 4):
        for top in _nonincreasing(n, -3, 0):
            sp_cases += 1
            count, dim = count_sp_patterns(top), weyl_dim_sp(top)
            if count != dim:
                mismatches.append({"kind": "sp", "top": list(top), "count": count, "weyl_dim": dim})
    return {
        "experiment": "patterns",
        "gl_cases": gl_cases,
        "sp_cases": sp_cases,
        "mismatches": mismatches,
        "pass": not mismatches,
    }


# -- gauge-series sub-suites -------------------------------------------------------


def yangian_factorize(n: int, order: int, trials: int, seed: int) -> dict:
    worst = 0.0
    failures: list[int] = []
    for t in range(trials):
        rng = _rng(seed, "factorize", t)
        B = random_pointed_series(n, order, rng, SERIES_SCALE)
        phi = pairing_action(B, SkewPairingSeries.constant(n, order))
        try:
            C = skew_factorize(phi)
        except SeriesError:
            failures.append(t)
            continue
        worst = max(worst, _rel_diff(pairing_of(C).coeffs, phi.coeffs))
    constant = skew_factorize(SkewPairingSeries.constant(n, order))
    trivial = constant.allclose(TruncatedMatrixSeries.identity(2 * n, order), 0.0)

    bad = np.array(SkewPairingSeries.constant(n, order).coeffs)
    G = _rng(seed, "factorize", trials).standard_normal((2 * n, 2 * n))
    bad[1] = G - G.T
    try:
        skew_factorize(SkewPairingSeries.from_coeffs(bad))
        rejected_at = None
    except SeriesError as exc:
        rejected_at = exc.order
    return {
        "max_relative_residual": worst,
        "failed_trials": failures,
        "constant_pairing_gives_identity": trivial,
        "invalid_pairing_rejected_at": rejected_at,
        "pass": not failures and worst <= FACTOR_TOL and trivial and rejected_at == 1,
    }


def yangian_stabilizer(n: int, order: int, trials: int, seed: int) -> dict:
    disagreements: list[dict] = []
    worst_invariance = worst_sigma = 0.0
    closure = True
    for t in range(trials):
        rng = _rng(seed, "stabilizer", t)
        H = sample_H_element(n, order, [seed, 1, t], SERIES_SCALE)
        H2 = sample_H_element(n, order, [seed, 2, t], SERIES_SCALE)
        B = random_pointed_series(n, order, rng, SERIES_SCALE)
        B2 = random_pointed_series(n, order, rng, SERIES_SCALE)
        for name, A, expected in (("sample", H, True), ("non_sample", B, False)):
            verdicts = [is_in_H(A), fixes_pairing(A), sigma(A).allclose(A)]
            if verdicts != [expected] * 3:
                disagreements.append({"trial": t, "kind": name, "verdicts": verdicts})
        closure = closure and is_in_H(H @ H2)
        worst_invariance = max(worst_invariance, _rel_diff(s_map(B @ H).coeffs, s_map(B).coeffs))
        worst_sigma = max(
            worst_sigma,
            _rel_diff(sigma(sigma(B)).coeffs, B.coeffs),
            _rel_diff(sigma(B @ B2).coeffs, (sigma(B) @ sigma(B2)).coeffs),
        )
    return {
        "disagreements": disagreements,
        "subgroup_closed": closure,
        "max_s_map_change": worst_invariance,
        "max_sigma_automorphism_residual": worst_sigma,
        "pass": not disagreements and closure and worst_invariance <= FACTOR_TOL and worst_sigma <= FACTOR_TOL,
    }


def yangian_limits(n: int, order: int, trials: int, seed: int) -> dict:
    exact_at_zero = True
    within_bound = True
    coordinate_match = 0.0
    h_independent = True
    for t in range(trials):
        rng = _rng(seed, "limits", t)
        A = random_pointed_series(n, order, rng, SERIES_SCALE)
        g = np.concatenate([[1.0], SERIES_SCALE * rng.standard_normal(order)])
        cases = (("mult_g", {"g": g.tolist()}), ("shift_a", {"a": float(rng.standard_normal())}))
        for which, params in cases:
            poly = generator_polynomial(which, order, params)
            bound = poly.deviation_bound(A)
            undeformed = basic_automorphism(A, which, params)
            coordinate_match = max(coordinate_match, _rel_diff(basic_automorphism(A, which, params, 1.0).coeffs, undeformed.coeffs))
            for h in H_GRID:
                image = basic_automorphism(A, which, params, h)
                deviation = image.max_abs_diff(A)
                if h == 0.0:
                    exact_at_zero = exact_at_zero and bool(np.all(deviation == 0.0))
                within_bound = within_bound and bool(np.all(deviation <= h * bound * (1 + 1e-9) + 1e-12))
                coordinate_match = max(coordinate_match, _rel_diff(poly.apply(A, h).coeffs, image.coeffs))
        for which in ("inv", "bar_tau"):
            base = basic_automorphism(A, which)
            for h in H_GRID:
                h_independent = h_independent and bool(np.array_equal(basic_automorphism(A, which, h=h).coeffs, base.coeffs))
    return {
        "h_grid": list(H_GRID),
        "identity_at_h0": exact_at_zero,
        "deviation_within_h_bound": within_bound,
        "generator_data_residual": coordinate_match,
        "inv_bar_tau_h_independent": h_independent,
        "pass": exact_at_zero and within_bound and coordinate_match <= 1e-12 and h_independent,
    }


def yangian_psi(n: int, order: int, trials: int, seed: int) -> dict:
    chain = sp_invariance = h_route = u_invariance = 0.0
    for t in range(trials):
        rng = _rng(seed, "psi", t)
        X = random_sp_algebra(n, rng, SERIES_SCALE)
        corner = psi0_corner(X, order)
        chain = max(chain, _rel_diff(psi_chain(X, order).coeffs, corner.coeffs))

        k = len(sp_basis(n, support=n - 1))
        g = embedded_sp_element(n, SERIES_SCALE * (rng.standard_normal(k) + 1j * rng.standard_normal(k)))
        moved = g @ X @ np.linalg.inv(g)
        sp_invariance = max(sp_invariance, _rel_diff(psi0_corner(moved, order).coeffs, corner.coeffs))

        Y = random_skew(rng, n) * 0.5
        series = psi_H(Y, order)
        h_route = max(h_route, _rel_diff(series.embedded().coeffs, psi0_corner(embed_complex(Y), order).coeffs))
        if n >= 2:
            V = embed_upper_left(random_unitary(rng, n - 1), n)
            Z = V @ Y @ V.star()
            Z = (Z - Z.star()) * 0.5
            u_invariance = max(u_invariance, _rel_diff(psi_H(Z, order).coeffs, series.coeffs))
    return {
        "chain_vs_corner": chain,
        "sp_conjugation_change": sp_invariance,
        "quaternion_vs_complex": h_route,
        "unitary_conjugation_change": u_invariance,
        "pass": chain <= PSI_TOL and sp_invariance <= SP_INVARIANCE_TOL and h_route <= PSI_TOL and u_invariance <= INVARIANCE_TOL,
    }


def yangian_pullback(n: int, order: int, trials: int, seed: int) -> dict:
    passes = []
    for t in range(trials):
        Y = random_skew(_rng(seed, "pullback", t), n) * 0.5
        passes.append(verify_fmn_pullback(Y, order)["pass"])
    lam = -np.arange(1, n + 1, dtype=float)
    diagonal = verify_fmn_pullback(QMatrix.diag_imaginary(lam), order)
    expected = [2.0 * (-1.0) ** (M // 2) * lam[-1] ** M if M % 2 == 0 else 0.0 for M in range(order + 1)]
    observed = [row["rtr"] for row in diagonal["coefficients"]]
    diagonal_ok = _rel_diff(observed, expected) <= FACTOR_TOL
    return {
        "random_points_passed": sum(passes),
        "trials": trials,
        "diagonal_values": observed,
        "diagonal_expected": expected,
        "pass": all(passes) and diagonal["pass"] and diagonal_ok,
    }


def _random_orders(rng: np.random.Generator, count: int, budget: int) -> list[int]:
    """`count` orders >= 1 with sum <= budget."""
    while True:
        orders = [int(x) for x in rng.integers(1, budget + 1, size=count)]
        if sum(orders) <= budget:
            return orders


def yangian_poisson(n: int, order: int, trials: int, seed: int) -> dict:
    labels = index_set(n)
    dim = 2 * n
    antisymmetry = jacobi = multiplicativity = first_order = 0.0
    zero_order = True
    for t in range(trials):
        rng = _rng(seed, "poisson", t)
        A = random_pointed_series(n, order, rng, SERIES_SCALE)
        i, j, k, l = (labels[x] for x in rng.integers(0, dim, size=4))
        M, N = _random_orders(rng, 2, order + 1)
        value = coord_poisson(i, j, M, k, l, N, A)
        antisymmetry = max(antisymmetry, abs(value + coord_poisson(k, l, N, i, j, M, A)))
        zero_order = zero_order and coord_poisson(i, j, 0, k, l, N, A) == 0

        A1 = A.coeffs[1]
        expected = (k == j) * A1[complex_index(i, n), complex_index(l, n)] - (i == l) * A1[complex_index(k, n), complex_index(j, n)]
        first_order = max(first_order, abs(coord_poisson(i, j, 1, k, l, 1, A) - expected))

        orders = _random_orders(rng, 3, order + 2)
        triple = [(int(rng.integers(0, dim)), int(rng.integers(0, dim)), o) for o in orders]
        jacobi = max(jacobi, abs(jacobi_residual(*triple, A)))

        g = random_pointed_series(n, order, rng, SERIES_SCALE)
        g_prime = random_pointed_series(n, order, rng, SERIES_SCALE)
        M, N = _random_orders(rng, 2, order + 1)
        a = (int(rng.integers(0, dim)), int(rng.integers(0, dim)), M)
        b = (int(rng.integers(0, dim)), int(rng.integers(0, dim)), N)
        multiplicativity = max(multiplicativity, abs(poisson_lie_residual(a, b, g, g_prime)))
    return {
        "antisymmetry": antisymmetry,
        "zero_order_vanishes": zero_order,
        "first_order_formula": first_order,
        "jacobi": jacobi,
        "poisson_lie": multiplicativity,
        "pass": zero_order and max(antisymmetry, first_order, jacobi, multiplicativity) <= POISSON_TOL,
    }


YANGIAN_RUNNERS: dict[str, Callable[[int, int, int, int], dict]] = {
    "factorize": yangian_factorize,
    "stabilizer": yangian_stabilizer,
    "limits": yangian_limits,
    "psi": yangian_psi,
    "pullback": yangian_pullback,
    "poisson": yangian_poisson,
}


def run_yangian_suites(n: int, order: int, seed: int, suites: Sequence[str] = YANGIAN_SUITES, trials: int = 10) -> dict:
    results = {}
    for name in suites:
        logger.info("yangian %s: n=%d order=%d", name, n, order)
        results[name] = YANGIAN_RUNNERS[name](n, order, trials, seed)
    return {
        "experiment": "yangian",
        "n": n,
        "order": order,
        "trials": trials,
        "suites": results,
        "pass": all(r["pass"] for r in results.values()),
    }


def run_yangian(config: models.RunConfig, threads: int | None = None) -> dict:
    return run_yangian_suites(config.n, config.order, config.seed, trials=config.trials)


SUITE_RUNNERS: dict[str, Callable[[models.RunConfig, int | None], dict]] = {
    "commute": run_commute,
    "independence": run_independence,
    "reduced": run_reduced,
    "patterns": run_patterns,
    "yangian": run_yangian,
}


class ExperimentRunner:
    def __init__(self, store: ReportStore | None = None, threads: int | None = None) -> None:
        self.store = store
        self.threads = threads or GCM_LAB_THREADS
        self.validator = RunConfigValidator()

    def run(self, config: models.RunConfig) -> tuple[models.RunSummary, dict[str, dict]]:
        validation = self.validator.validate(config)
        if not validation.valid:
            raise ConfigError("Invalid run configuration", validation.issues)

        reports: dict[str, dict] = {}
        results: list[models.SuiteResult] = []
        for suite in config.selected_suites():
            logger.info("suite %s: start", suite)
            report = {"suite": suite, "config": config.report_dump(), **SUITE_RUNNERS[suite](config, self.threads)}
            reports[suite] = report
            path = self.store.save(suite, report) if self.store else None
            results.append(models.SuiteResult(suite=suite, passed=report["pass"], report_file=path.name if path else None))
            logger.info("suite %s: %s", suite, "pass" if report["pass"] else "FAIL")

        summary = models.RunSummary(
            config=config.report_dump(),
            suites=results,
            passed=all(r.passed for r in results),
        )
        if self.store:
            self.store.save("summary", summary.model_dump(by_alias=True))
        return summary, reports
