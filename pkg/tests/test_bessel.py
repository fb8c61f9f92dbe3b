"""Tests of Bessel evaluation and certified root finding.

The oracles here are independent of the implementation route: a bisection
on the raw power series, an interlacing scan on a fine grid, and mpmath
arbitrary-precision evaluation.
"""

import math

import mpmath
import numpy as np
import pytest

from ginfield.bessel import (
    BesselDomainError,
    RootTable,
    bessel_j,
    bessel_j_prime,
    bessel_root,
    build_root_table,
    load_root_table,
    save_root_table,
)

J01 = 2.404825557695773  # frozen from the series-bisection oracle below


def series_j0(x):
    """Power series of J_0, summed directly; oracle-only."""
    total = 0.0
    term = 1.0
    k = 0
    while abs(term) > 1e-18:
        total += term
        k += 1
        term *= -(x * x / 4.0) / (k * k)
    return total


def test_first_root_of_j0_by_series_bisection():
    lo, hi = 2.0, 3.0
    assert series_j0(lo) > 0 > series_j0(hi)
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if series_j0(mid) > 0:
            lo = mid
        else:
            hi = mid
    oracle = 0.5 * (lo + hi)
    assert abs(oracle - J01) < 1e-12
    assert abs(bessel_root(0, 1) - oracle) < 1e-12


def test_trivial_values():
    assert bessel_j(0, 0.0) == 1.0
    assert bessel_j(1, 0.0) == 0.0
    assert abs(bessel_j(0, J01)) < 1e-12


def test_derivative_values():
    assert bessel_j_prime(0, 0.0) == 0.0
    assert abs(bessel_j_prime(1, 0.0) - 0.5) < 1e-14
    assert abs(bessel_j_prime(0, J01) + bessel_j(1, J01)) < 1e-12


def test_domain_errors():
    with pytest.raises(BesselDomainError):
        bessel_j(0, -1.0)
    with pytest.raises(BesselDomainError):
        bessel_j(-2, 1.0)
    with pytest.raises(BesselDomainError):
        bessel_j_prime(1, -0.5)
    with pytest.raises(BesselDomainError):
        bessel_root(0, 0)


@pytest.mark.parametrize("n", [0, 1, 2, 5, 11, 20, 32])
def test_against_mpmath(n):
    xs = np.linspace(0.0, 50.0, 41)
    for x in xs:
        ref = float(mpmath.besselj(n, mpmath.mpf(x)))
        got = bessel_j(n, float(x))
        assert abs(got - ref) < 1e-12 * max(1.0, abs(ref)) + 1e-14


@pytest.mark.parametrize("n", [2, 5, 9, 16, 24, 32])
def test_upward_recurrence_agreement(n):
    # J_{m+1} = (2m/x) J_m - J_{m-1}, stable while x >= m; compare both
    # evaluation routes there to 1e-10
    for x in np.linspace(n + 0.5, 50.0, 25):
        j_prev, j_cur = bessel_j(0, float(x)), bessel_j(1, float(x))
        for m in range(1, n):
            j_prev, j_cur = j_cur, (2.0 * m / x) * j_cur - j_prev
        assert abs(j_cur - bessel_j(n, float(x))) < 1e-10


def test_interlacing_by_grid_sign_changes():
    # count sign changes of J_0 and J_1 on a fine grid; the orderings
    # j_{0,1} < j_{1,1} < j_{0,2} must come out of the raw grid data
    xs = np.linspace(0.05, 9.0, 30000)
    j0 = bessel_j(0, xs)
    j1 = bessel_j(1, xs)
    roots0 = xs[:-1][np.diff(np.sign(j0)) != 0]
    roots1 = xs[:-1][np.diff(np.sign(j1)) != 0]
    assert roots0[0] < roots1[0] < roots0[1]
    assert abs(bessel_root(0, 1) - roots0[0]) < 1e-3
    assert abs(bessel_root(1, 1) - roots1[0]) < 1e-3
    assert bessel_root(0, 2) > bessel_root(1, 1) > bessel_root(0, 1)


def test_lower_bound_inequality_64(table):
    ns = np.arange(65)[:, None]
    ks = np.arange(1, 65)[None, :]
    roots = table.roots[:65, :64]
    assert np.all(roots**2 > ns**2 + (ks - 0.25) ** 2 * math.pi**2)


def test_table_monotone_and_residuals(table):
    assert np.all(np.diff(table.roots, axis=0) > 0)
    assert np.all(np.diff(table.roots, axis=1) > 0)
    for n in range(0, table.n_max + 1, 7):
        res = np.abs(bessel_j(n, table.roots[n]))
        assert res.max() < 1e-12


def test_build_table_shape_and_determinism():
    t1 = build_root_table(1, 1)
    assert t1.roots.shape == (2, 1)
    assert abs(t1.root(0, 1) - J01) < 1e-12
    a = build_root_table(8, 8)
    b = build_root_table(8, 8)
    assert np.array_equal(a.roots, b.roots)


def test_negative_order_alias(table):
    assert table.root(-3, 2) == table.root(3, 2)
    with pytest.raises(KeyError):
        table.root(0, table.k_max + 1)


def test_high_order_root(table):
    # deep entry of the shared 70x70 table re-checked directly
    j = bessel_root(70, 70)
    assert abs(j - table.root(70, 70)) < 1e-11
    assert abs(bessel_j(70, j)) < 1e-12


def test_derivative_product_identity():
    # d/dx (x^{n+1} J_{n+1}(x)) = x^{n+1} J_n(x), finite differences
    h = 1e-6
    for n in range(0, 6):
        for x in np.linspace(0.3, 20.0, 15):
            lhs = (
                (x + h) ** (n + 1) * bessel_j(n + 1, x + h)
                - (x - h) ** (n + 1) * bessel_j(n + 1, x - h)
            ) / (2 * h)
            rhs = x ** (n + 1) * bessel_j(n, x)
            assert abs(lhs - rhs) < 1e-6 * max(1.0, abs(rhs))


def test_cache_roundtrip(tmp_path):
    t = build_root_table(5, 4)
    path = tmp_path / "roots.txt"
    save_root_table(t, path)
    loaded = load_root_table(path)
    assert isinstance(loaded, RootTable)
    assert loaded.n_max == 5 and loaded.k_max == 4
    assert np.array_equal(loaded.roots, t.roots)
