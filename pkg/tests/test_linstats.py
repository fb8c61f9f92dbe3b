"""Tests of centered linear statistics, limit covariances, the
gradient-plus-boundary variance functional, and the CLT machinery."""

import math

import numpy as np
import pytest

from ginfield.ginibre import pair_variance, sample_spectrum
from ginfield.linstats import (
    TestFunction,
    alpha_combination,
    alpha_values,
    centering_term,
    clt_experiment,
    decay_check,
    gamma,
    gamma_draws,
    limit_covariance,
    limit_covariance_matrix,
    limit_quadratic_form,
    rv_variance,
    variance_bound_check,
)


def test_centering_zero_for_nonzero_order(small_table):
    assert centering_term(3, 2, 16, small_table) == 0.0


def test_centering_radial_value(small_table):
    # for N -> infinity the centering tends to the circular-law average of
    # alpha_{0,k}, which is finite; just pin determinism and magnitude here
    a = centering_term(0, 1, 32, small_table)
    b = centering_term(0, 1, 32, small_table)
    assert a == b
    # the centering grows linearly in N; its per-eigenvalue share is the
    # circular-law average of alpha_{0,1}, which is order one and negative
    assert -2.0 < a / 32 < 0.0
    assert abs(centering_term(0, 1, 64, small_table) / 64 - a / 32) < 0.05


def test_gamma_sample_accessors(small_table):
    s = sample_spectrum(16, 5)
    idx = [(0, 1), (1, 1), (2, 3)]
    g = gamma(s, idx, small_table)
    assert g.value(1, 1) == np.conj(g.value(-1, 1))
    with pytest.raises(ValueError):
        gamma(s, [(-1, 1)], small_table)


def test_gamma_matches_manual_sum(small_table):
    s = sample_spectrum(8, 2)
    g = gamma(s, [(2, 1)], small_table)
    manual = complex(np.sum(alpha_values(2, 1, s.eigenvalues, small_table)))
    assert abs(g.value(2, 1) - manual) < 1e-13


def test_limit_covariance_entries(small_table):
    j01 = small_table.root(0, 1)
    c, p = limit_covariance((0, 1), (0, 1), small_table)
    assert abs(c - math.pi / j01**2) < 1e-14
    assert c == p
    j11, j12 = small_table.root(1, 1), small_table.root(1, 2)
    c, p = limit_covariance((1, 1), (1, 2), small_table)
    assert abs(c - math.pi / (j11 * j12)) < 1e-14
    assert p == 0.0
    c, p = limit_covariance((1, 1), (1, 1), small_table)
    assert abs(c - 2.0 * math.pi / j11**2) < 1e-14
    assert limit_covariance((1, 1), (2, 1), small_table) == (0.0, 0.0)
    with pytest.raises(ValueError):
        limit_covariance((-1, 1), (1, 1), small_table)


def test_limit_covariance_matrix_hermitian_psd(small_table):
    idx = [(n, k) for n in range(0, 4) for k in range(1, 4)]
    M = limit_covariance_matrix(idx, small_table)
    assert np.max(np.abs(M - M.conj().T)) < 1e-14
    w = np.linalg.eigvalsh(M)
    assert w.min() > -1e-12


def test_quadratic_form_consistency(small_table):
    # the quadratic form must reproduce single-entry variances
    j = small_table.root(0, 2)
    v = limit_quadratic_form({(0, 2): 1.0}, {}, small_table)
    assert abs(v - math.pi / j**2) < 1e-14
    j = small_table.root(3, 1)
    v = limit_quadratic_form({(3, 1): 1.0}, {}, small_table)
    # Var Re gamma = 0.5 pi / j^2 + 0.5 pi / (3 j^2)
    assert abs(v - 0.5 * math.pi / j**2 * (1 + 1.0 / 3.0)) < 1e-14
    # and be additive across independent orders
    v2 = limit_quadratic_form({(0, 2): 1.0, (3, 1): 1.0}, {}, small_table)
    assert abs(v2 - (math.pi / small_table.root(0, 2) ** 2 + v)) < 1e-13


def test_rv_variance_analytic_cases():
    # f = Re z: energy pi over the disk gives 1/4, boundary cos gives 1/4
    f = TestFunction(value=lambda z: np.real(z))
    assert abs(rv_variance(f) - 0.5) < 1e-10
    # f = |z|^2: grad = 2(x, y), energy = 2 pi int r^3 = pi/2 -> 1/8... plus
    # boundary f = 1 constant on the circle, no boundary contribution
    f2 = TestFunction(value=lambda z: np.abs(z) ** 2)
    assert abs(rv_variance(f2) - 0.5) < 1e-8


def test_rv_variance_gradient_route_matches_fd(small_table):
    t = {(0, 1): 0.7, (2, 2): -0.4}
    s = {(2, 2): 0.3}
    combo = alpha_combination(t, s, small_table)
    fd = TestFunction(value=combo.value)
    assert abs(rv_variance(combo) - rv_variance(fd)) < 1e-5


def test_rv_variance_matches_limit_form(small_table):
    # the two limit routes (harmonic-analysis functional vs coefficient
    # quadratic form) must agree on alpha combinations
    t = {(0, 1): 1.0, (1, 1): 0.5, (1, 2): -0.8, (4, 3): 0.25}
    s = {(1, 1): 0.3, (4, 3): -0.6}
    combo = alpha_combination(t, s, small_table)
    lhs = rv_variance(combo)
    rhs = limit_quadratic_form(t, s, small_table)
    assert abs(lhs - rhs) < 1e-6


def test_rv_variance_matches_finite_N_trend(small_table):
    # exact finite-N variance of alpha_{0,1} should approach the limit value
    def f(z):
        return alpha_values(0, 1, z, small_table)

    v8 = pair_variance(f, 8)
    v64 = pair_variance(f, 64)
    limit = math.pi / small_table.root(0, 1) ** 2
    assert abs(v64 - limit) < abs(v8 - limit)
    assert abs(v64 - limit) < 0.01


def test_gamma_draws_deterministic_and_worker_invariant(small_table):
    idx = [(0, 1), (1, 1)]
    a = gamma_draws(8, 6, idx, 3, small_table, workers=1)
    b = gamma_draws(8, 6, idx, 3, small_table, workers=2)
    assert np.array_equal(a, b)
    c = gamma_draws(8, 6, idx, 4, small_table, workers=1)
    assert not np.array_equal(a, c)


def test_clt_experiment_small(small_table):
    idx = [(0, 1), (1, 1)]
    rep = clt_experiment(16, 200, idx, 0, small_table)
    assert rep["N"] == 16 and rep["draws"] == 200
    assert len(rep["empirical_mean"]) == 2
    # centered statistic: mean within 6 se of zero
    for mu, se in zip(rep["empirical_mean"], rep["se_mean"]):
        assert abs(complex(*mu)) < 6 * se
    assert "re_0_1" in rep["ks"] and "im_1_1" in rep["ks"]
    assert "0_1" in rep["exact_pair_variance"]
    # empirical variance of gamma_{0,1} near its exact finite-N value
    emp = rep["empirical_cov"][0][0][0]
    exact = rep["exact_pair_variance"]["0_1"]
    assert abs(emp - exact) < 5 * rep["se_var"][0]


def test_variance_bound_check_structure(small_table):
    out = variance_bound_check([0, 2], [1, 2], [8], small_table)
    assert len(out["entries"]) == 4
    assert out["calibrated_C"] == max(r["ratio"] for r in out["entries"])
    assert out["calibrated_C"] < 0.2  # frozen calibration headroom


def test_decay_check_structure(small_table):
    out = decay_check([(16, 8)], [1, 2], small_table)
    assert len(out["entries"]) == 2
    for r in out["entries"]:
        assert r["scaled"] == r["variance"] * 16 * small_table.root(16, r["k"]) ** 2
    assert out["calibrated_Cprime"] < 6.0  # frozen calibration headroom
