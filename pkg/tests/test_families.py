import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lorentz_riemann.errors import DomainError
from lorentz_riemann.families import (
    SELECTORS,
    AClass,
    CircleType,
    FamilyId,
    LimitHigh,
    LimitLow,
    PlaneType,
    classify_case,
    constant_radius_solution,
    cubic_roots,
    first_integral_residual,
    make_profile,
    ode_residual,
    radicand,
    radicand_coeffs,
    reduce_spacelike_a,
)
from lorentz_riemann.minkowski import CausalClass
from lorentz_riemann.quadrature import profile_integrals_grid

S, T, L = CausalClass.SPACELIKE, CausalClass.TIMELIKE, CausalClass.LIGHTLIKE
NON_CONST = [k for k, f in SELECTORS.items() if not f.constant_radius]


def test_family_invariants():
    with pytest.raises(ValueError):
        FamilyId(PlaneType.SPACELIKE, CircleType.SPACELIKE_HYPERBOLA, AClass.UNIT10)
    with pytest.raises(ValueError):
        FamilyId(PlaneType.SPACELIKE, CircleType.EUCLIDEAN, AClass.NULL11)
    with pytest.raises(ValueError):
        FamilyId(PlaneType.TIMELIKE, CircleType.EUCLIDEAN, AClass.UNIT10)
    with pytest.raises(DomainError):
        FamilyId.from_selector("nope")
    for key, fam in SELECTORS.items():
        assert fam.selector == key


def test_radicand_examples():
    assert radicand("s3", 2.0, 1.0) == 4.0
    assert radicand("s3", -2.0, 1.0) == 0.0
    assert radicand("t5-a10", 0.0, 2.0) == 6.0


def test_radicand_signs_per_family():
    expected = {
        "s3": (1, 1), "s3-rot": (0, 1),
        "t4-a10": (-1, 1), "t4-a01": (1, 1), "t4-a11": (0, 1), "t4-rot": (0, 1),
        "t5-a10": (1, -1), "t5-a01": (-1, -1), "t5-a11": (0, -1), "t5-rot": (0, -1),
    }
    for sel, (c3, c1) in expected.items():
        assert radicand_coeffs(sel, 0.7) == (c3, 0.7, c1)


def test_roots_examples():
    r = cubic_roots("s3", 2.0)
    assert r.q1 == r.q2 == -1.0
    r = cubic_roots("s3", -2.5)
    assert r.q1 == pytest.approx(0.5, abs=1e-15) and r.q2 == pytest.approx(2.0, abs=1e-15)
    assert radicand("s3", -2.5, r.q1) == pytest.approx(0, abs=1e-14)
    r = cubic_roots("t4-a10", 0.0)
    assert (r.q1, r.q2) == (-1.0, 1.0)
    assert cubic_roots("s3", 1.0).q1 is None


def test_double_root_snap():
    r = cubic_roots("s3", -2.0 - 5e-13)
    assert r.double and r.q1 == 1.0


@pytest.mark.parametrize(
    "sel, product, lam_strategy",
    [
        ("s3", 1.0, st.one_of(st.floats(2.001, 1e3), st.floats(-1e3, -2.001))),
        ("t4-a10", -1.0, st.floats(-1e3, 1e3)),
        ("t5-a10", -1.0, st.floats(-1e3, 1e3)),
        ("t5-a01", 1.0, st.floats(2.001, 1e3)),
    ],
)
def test_root_products(sel, product, lam_strategy):
    @given(lam_strategy)
    def check(lam):
        r = cubic_roots(sel, lam)
        assert r.q1 * r.q2 == pytest.approx(product, rel=1e-12)
        for q in (r.q1, r.q2):
            assert abs(radicand(sel, lam, q)) <= 1e-12 * (1 + abs(lam)) ** 3
        assert r.q1 <= r.q2

    check()


def test_lambda_bounds():
    with pytest.raises(DomainError):
        cubic_roots("s3", 2e8)
    with pytest.raises(DomainError):
        classify_case("s3", math.nan)


def test_classify_lambda3():
    (rep,) = classify_case("s3", 3.0)
    p = rep.profile
    assert (p.q_lo, p.q_hi, p.q0) == (0.0, math.inf, 0.0)
    assert rep.predicted_causal == {S}
    assert rep.limit_low is LimitLow.CONELIKE_POINT
    assert rep.limit_high is LimitHigh.LINE_ORTHOGONAL_TO_PI
    assert rep.slab_finite


def test_classify_lambda_minus3():
    low, high = classify_case("s3", -3.0)
    r = cubic_roots("s3", -3.0)
    assert (low.profile.q_lo, low.profile.q_hi) == (0.0, r.q1)
    assert (high.profile.q_lo, high.profile.q_hi) == (r.q2, math.inf)
    assert low.predicted_causal == {T}
    assert high.predicted_causal == {S, T, L}
    assert high.limit_low is LimitLow.CIRCLE
    assert high.limit_high is LimitHigh.LINE_ORTHOGONAL_TO_PI


def test_classify_t5_a01():
    (rep,) = classify_case("t5-a01", 3.0)
    r = cubic_roots("t5-a01", 3.0)
    assert (rep.profile.q_lo, rep.profile.q_hi) == (r.q1, r.q2)
    assert rep.predicted_causal == {T}
    assert rep.limit_low is LimitLow.HYPERBOLA and rep.limit_high is LimitHigh.HYPERBOLA
    assert classify_case("t5-a01", 0.0) == []
    with pytest.raises(DomainError, match="case discarded"):
        make_profile("t5-a01", 0.0)


def test_classify_trichotomy():
    assert classify_case("s3", 0.0)[0].predicted_causal == {S, T, L}
    assert classify_case("s3", 2.0)[0].predicted_causal == {S, L}
    low, high = classify_case("s3", -2.0)
    assert high.profile.q0 == 1.5**2 and high.limit_low is LimitLow.CIRCLE
    assert low.limit_high is LimitHigh.UNBOUNDED and not low.slab_finite


def test_spacelike_regions_only_for_negative_lambda():
    for lam in (-3.0, -1.0, 0.0, 1.0, 3.0):
        has_s = any(S in r.predicted_causal for r in classify_case("t4-a01", lam))
        assert has_s == (lam < -2)
        has_s = any(S in r.predicted_causal for r in classify_case("t4-a11", lam))
        assert has_s == (lam < 0)


def test_t5_positive_lambda_only():
    for sel in ("t5-a11", "t5-rot"):
        assert classify_case(sel, -1.0) == [] and classify_case(sel, 0.0) == []
        assert len(classify_case(sel, 1.0)) == 1


def test_branch_selection():
    assert make_profile("s3", -3.0, "high").q_lo > 1
    with pytest.raises(DomainError):
        make_profile("s3", 3.0, "high")
    with pytest.raises(DomainError):
        make_profile("s3", -2.0, "high", r0=0.5)


@pytest.mark.parametrize("sel", NON_CONST)
def test_radicand_positive_on_domains(sel):
    for lam in np.linspace(-4, 4, 17):
        for rep in classify_case(sel, lam):
            p = rep.profile
            hi = p.q_hi if math.isfinite(p.q_hi) else p.q_lo + 50
            q = np.linspace(p.q_lo, hi, 102)[1:-1]
            assert np.all(radicand(sel, p.lam, q) > 0)


def test_ode_examples():
    assert ode_residual("s3", 1.0, 1.0, 0.0, 0.0) == 0.0
    z = 1.0
    q, qp, qpp = math.sinh(z) ** 2, math.sinh(2 * z), 2 * math.cosh(2 * z)
    assert ode_residual("s3", 0.0, q, qp, qpp) == pytest.approx(0, abs=1e-12)
    assert ode_residual("t5-a01", -1.0, 1.0, 0.0, 0.0) == 0.0


def test_first_integral_examples():
    z0 = 0.3
    q = math.tan(z0) ** 2
    qp = 2 * math.tan(z0) / math.cos(z0) ** 2
    assert abs(first_integral_residual("s3", 1.0, 2.0, q, qp)) <= 1e-10
    q, qp = math.sinh(z0) ** 2, math.sinh(2 * z0)
    assert abs(first_integral_residual("s3", 0.0, 1.0, q, qp)) <= 1e-10


@given(st.sampled_from(NON_CONST), st.integers(-400, 400).map(lambda k: k / 100), st.floats(0.01, 0.99))
def test_first_integral_by_construction(sel, lam, frac):
    reps = classify_case(sel, lam)
    if not reps:
        return
    p = reps[0].profile
    hi = p.q_hi if math.isfinite(p.q_hi) else p.q_lo + 10
    q = p.q_lo + frac * (hi - p.q_lo)
    qp = 2 * math.sqrt(radicand(sel, p.lam, q))
    a2 = SELECTORS[sel].a_norm2
    rhs_scale = 4 * (abs(a2) * q + 1 / q + abs(p.lam))
    assert abs(first_integral_residual(sel, a2, p.lam, q, qp)) <= 1e-12 * rhs_scale


@pytest.mark.parametrize("sel, lam", [("s3", 0.0), ("s3", 3.0), ("t4-a10", 1.0), ("t5-a10", 0.5), ("t4-a11", -1.0)])
def test_first_integral_along_quadrature_path(sel, lam):
    """Invert z(q) from the quadrature and differentiate numerically."""
    p = make_profile(sel, lam)
    hi = p.q_hi if math.isfinite(p.q_hi) else 6.0
    qs = np.linspace(p.q_lo, hi, 52)[1:-1]
    z, _, _, _ = profile_integrals_grid(p, qs, 1e-13)
    # dq/dz = 1/z'(q), z'(q) by a 7-point stencil in q
    h = 1e-3 * np.minimum(1.0, np.minimum(qs - p.q_lo, hi - qs))
    w = np.array([-1, 9, -45, 0, 45, -9, 1]) / 60.0
    pts = qs[:, None] + h[:, None] * np.arange(-3, 4)[None, :]
    zz, _, _, _ = profile_integrals_grid(p, pts.ravel(), 1e-13)
    dz = (zz.reshape(pts.shape) @ w) / h
    qp = 1.0 / dz
    a2 = SELECTORS[sel].a_norm2
    res = first_integral_residual(sel, a2, lam, qs, qp)
    scale = 4 * (abs(a2) * qs + 1 / qs + abs(lam))
    assert np.max(np.abs(res) / scale) <= 1e-9


def test_constant_radius_examples():
    assert constant_radius_solution("s3-const", (1.0, 0.0)) == 1.0
    assert constant_radius_solution("t4-const", (1.0, 0.0)) is None
    assert constant_radius_solution("t5-const", (0.0, 1.0)) == 1.0
    assert constant_radius_solution("s3-const", (4.0, 0.0)) == pytest.approx(0.5)
    assert classify_case("t4-const", 0.0, a=(1.0, 0.0)) == []


def test_reduce_spacelike_a():
    angle, ratio, lam = reduce_spacelike_a((0.0, 4.0), 2.0)
    assert angle == pytest.approx(math.pi / 2) and ratio == 2.0 and lam == 0.5
    with pytest.raises(DomainError):
        reduce_spacelike_a((0.0, 0.0), 1.0)
