import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate as sp_integrate

import oracles
from lorentz_riemann.errors import Divergent, DomainError
from lorentz_riemann.families import classify_case, cubic_roots, make_profile
from lorentz_riemann.quadrature import (
    asymptotic_limits,
    closed_form,
    has_closed_form,
    integrate,
    profile_derivatives,
    profile_integrals,
    profile_integrals_grid,
)

DICTIONARY = [
    ("s3", 2.0, "low"),
    ("s3", -2.0, "low"),
    ("s3", -2.0, "high"),
    ("s3-rot", 1.0, "low"),
    ("s3-rot", -1.0, "low"),
    ("t4-a01", 2.0, "low"),
    ("t4-a01", -2.0, "low"),
    ("t4-a01", -2.0, "high"),
    ("t4-a11", -1.0, "low"),
    ("t4-a11", 0.0, "low"),
    ("t4-a11", 1.0, "low"),
    ("t4-rot", 0.5, "low"),
    ("t5-rot", 1.0, "low"),
    ("t5-a11", 1.0, "low"),
]


def sample_grid(p, n=50, span=8.0):
    hi = p.q_hi if math.isfinite(p.q_hi) else p.q_lo + span
    return np.linspace(p.q_lo, hi, n + 2)[1:-1]


def test_examples():
    p = make_profile("s3", 2.0)
    e = profile_integrals(p, 1.0)
    assert e.z == pytest.approx(math.pi / 4, abs=1e-10)
    assert e.m == pytest.approx(1 - math.pi / 4, abs=1e-10)
    assert e.err_z <= 1e-10 and e.err_m <= 1e-10
    e = profile_integrals(make_profile("s3-rot", 1.0), 1.0)
    assert e.z == pytest.approx(math.asinh(1.0), abs=1e-10)
    e = profile_integrals(make_profile("s3", 0.0), 1.0)
    assert e.z == pytest.approx(oracles.FROZEN["z_at_one_lambda0"], abs=1e-10)


def test_closed_form_examples():
    z, m = closed_form(make_profile("s3", 2.0), 4.0)
    assert (z, m) == (math.atan(2.0), 2.0 - math.atan(2.0))
    _, m = closed_form(make_profile("t4-a11", 0.0), 0.25)
    assert m == pytest.approx(0.5**3 / 3, abs=1e-16)
    x, m = closed_form(make_profile("t5-a11", 1.0), 4.0)
    assert x == pytest.approx(math.acosh(2.0), abs=1e-15)
    assert m == pytest.approx((2 * math.sqrt(3) + math.asinh(math.sqrt(3))) / 2, abs=1e-15)
    assert closed_form(make_profile("s3", 3.0), 1.0) is None
    with pytest.raises(DomainError):
        closed_form(make_profile("t5-a11", 1.0), 0.5)


@pytest.mark.parametrize("sel, lam, branch", DICTIONARY)
def test_quadrature_matches_closed_form(sel, lam, branch):
    p = make_profile(sel, lam, branch)
    assert has_closed_form(p)
    q = sample_grid(p)
    z, m, _, _ = profile_integrals_grid(p, q, 1e-12)
    zc, mc = closed_form(p, q)
    assert np.max(np.abs(z - zc)) <= 1e-9
    assert np.max(np.abs(m - mc)) <= 1e-9


def test_domain_and_tolerance_errors():
    p = make_profile("s3", -3.0, "low")
    with pytest.raises(DomainError):
        profile_integrals(p, 1.0)
    with pytest.raises(ValueError):
        profile_integrals(p, 0.1, tol=1e-15)


def _scipy_z(p, q):
    """Independent oracle: QUADPACK with an algebraic endpoint weight at q0."""
    c3, c2, c1 = p.coeffs
    q0 = p.q0
    if q0 == 0.0:
        def g(u):
            return 0.5 / math.sqrt(c3 * u * u + c2 * u + c1)
    else:
        # P(u) = u (u - q0) R(u) with R linear or constant
        other = (c1 / c3) / q0 if c3 != 0 else None

        def g(u):
            rest = c3 * (u - other) if other is not None else c2
            return 0.5 / math.sqrt(u * rest)
    val, _ = sp_integrate.quad(g, q0, q, weight="alg", wvar=(-0.5, 0.0), epsabs=1e-13, epsrel=1e-13)
    return val


@pytest.mark.parametrize(
    "sel, lam, branch",
    [("t5-a10", 0.5, "low"), ("t4-a10", 1.0, "low"), ("s3", -3.0, "high"), ("t5-a01", 3.0, "low"), ("s3", 0.7, "low")],
)
def test_against_quadpack(sel, lam, branch):
    p = make_profile(sel, lam, branch)
    q = sample_grid(p, 10)[:8]
    z, _, _, _ = profile_integrals_grid(p, q, 1e-12)
    ref = np.array([_scipy_z(p, x) for x in q])
    assert np.max(np.abs(z - ref)) <= 1e-9


def test_lemniscate_value():
    lim = asymptotic_limits(make_profile("s3", 0.0), 1e-12)
    assert lim.z0 == pytest.approx(oracles.LEMNISCATE, abs=1e-10)
    assert lim.z0 == pytest.approx(oracles.FROZEN["z_inf_lambda0"], abs=1e-10)


def test_lambda3_limits_against_oracle():
    lim = asymptotic_limits(make_profile("s3", 3.0), 1e-12)
    assert lim.z0 == pytest.approx(oracles.FROZEN["z_inf_lambda3"], abs=1e-9)
    assert lim.c == pytest.approx(oracles.FROZEN["c_inf_lambda3"], abs=1e-9)


def test_frozen_oracles_reproduce():
    assert oracles.z_at_one_lambda0() == pytest.approx(oracles.FROZEN["z_at_one_lambda0"], abs=1e-12)
    assert oracles.z_inf(3.0) == pytest.approx(oracles.FROZEN["z_inf_lambda3"], abs=1e-12)
    assert oracles.c_inf(3.0) == pytest.approx(oracles.FROZEN["c_inf_lambda3"], abs=1e-12)
    assert oracles.z_inf(0.0) == pytest.approx(oracles.LEMNISCATE, abs=1e-12)


def test_asymptotic_examples():
    lim = asymptotic_limits(make_profile("s3", 2.0))
    assert lim.z0 == pytest.approx(math.pi / 2, abs=1e-8)
    assert lim.c == pytest.approx(-math.pi / 2, abs=1e-8)
    lim = asymptotic_limits(make_profile("s3", -2.0, "high"))
    assert abs(lim.z0) <= 1e-8


@pytest.mark.parametrize("lam", [-3.0, -1.0, 0.0, 2.0, 3.0, 10.0])
def test_truncation_stability(lam):
    p = make_profile("s3", lam, "high" if lam < -2 else None)
    tol = 1e-12
    a = asymptotic_limits(p, tol)
    b = asymptotic_limits(p, tol, cutoff=4e8)
    assert abs(a.z0 - b.z0) <= 2 * tol
    assert abs(a.c - b.c) <= 2 * tol


def test_divergent_cases():
    with pytest.raises(Divergent):
        asymptotic_limits(make_profile("t4-a11", 0.0))
    with pytest.raises(Divergent):
        asymptotic_limits(make_profile("s3", -2.0, "low"))
    with pytest.raises(Divergent):
        asymptotic_limits(make_profile("s3-const", 0.0, a=(1.0, 0.0)))


def test_bounded_upper_end():
    p = make_profile("s3", -3.0, "low")
    lim = asymptotic_limits(p)
    assert lim.c is None
    z, _, _, _ = profile_integrals_grid(p, [p.q_hi * (1 - 1e-12)])
    assert lim.z0 == pytest.approx(z[0], abs=1e-6)


@pytest.mark.parametrize("sel, lam", [("s3", 0.0), ("s3", -3.0), ("t4-a10", 1.0), ("t5-a10", 0.5), ("t5-a01", 3.0), ("t4-a11", -1.0)])
def test_derivative_consistency(sel, lam):
    for rep in classify_case(sel, lam):
        p = rep.profile
        q = sample_grid(p, 20, span=5.0)
        h = 1e-5 * (1 + q)
        h = np.minimum(h, 0.5 * np.minimum(q - p.q_lo, p.q_hi - q))
        zp, _, _, _ = profile_integrals_grid(p, q + h, 1e-13)
        zm, _, _, _ = profile_integrals_grid(p, q - h, 1e-13)
        fd = (zp - zm) / (2 * h)
        dz, _ = profile_derivatives(p, q)
        assert np.max(np.abs(fd / dz - 1)) <= 1e-6


@settings(max_examples=25)
@given(st.sampled_from(["s3", "t4-a10", "t4-a01", "t5-a10", "t4-rot", "t5-rot"]), st.integers(-40, 40).map(lambda k: k / 10))
def test_monotone(sel, lam):
    for rep in classify_case(sel, lam):
        z, _, _, _ = profile_integrals_grid(rep.profile, sample_grid(rep.profile, 30), 1e-10)
        assert np.all(np.diff(z) > 0)


def test_integrate_helper():
    v, err = integrate(np.exp, 0.0, 1.0, 1e-13)
    assert v == pytest.approx(math.e - 1, abs=1e-13)
    assert err <= 1e-13


def test_grid_order_independent():
    p = make_profile("s3", 1.3)
    q = np.array([3.0, 0.5, 7.0, 1.0])
    z1, m1, _, _ = profile_integrals_grid(p, q)
    z2, m2, _, _ = profile_integrals_grid(p, q[::-1])
    np.testing.assert_allclose(z1, z2[::-1], atol=1e-10)
    np.testing.assert_allclose(m1, m2[::-1], atol=1e-10)


def test_dictionary_sweep_speed():
    import time

    t0 = time.perf_counter()
    for sel, lam, branch in DICTIONARY:
        p = make_profile(sel, lam, branch)
        profile_integrals_grid(p, sample_grid(p), 1e-12)
    assert time.perf_counter() - t0 < 5.0
