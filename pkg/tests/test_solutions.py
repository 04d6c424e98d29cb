import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cnoidal.algebra import SiteRing, evaluate, site_values
from cnoidal.constants import Kind, constant_Q, extract_constant
from cnoidal.elliptic import Spacing, complete_K, jacobi
from cnoidal.errors import DivergenceError, UsageError
from cnoidal.solutions import (
    WaveFamily, build, eval_solution, miura, miura_source, travelling_coordinate, velocity,
)
from cnoidal.verify import residual_scan

F = WaveFamily
XI = np.linspace(-3.0, 3.0, 61)


# -- families -----------------------------------------------------------------


def test_legal_p():
    assert F.KDV_DN2_SUM.legal_ps(6) == [1, 2, 3, 4, 5, 6]
    assert F.MKDV1_SN_SUM_ODD.legal_ps(6) == [1, 3, 5]
    assert F.MKDV2_CN_SUM_ODD.legal_ps(6) == [1, 3, 5]
    assert F.MKDV1_SN_PRODUCT_EVEN.legal_ps(8) == [2, 4]
    assert F.MKDV2_DN_ALTERNATING_EVEN.legal_ps(6) == [2, 4, 6]
    assert F.MKDV2_DN_SUM.legal_ps(3) == [1, 2, 3]
    assert F.MIURA_OF_MKDV1.legal_ps(6) == [1, 2, 3, 4, 5]
    assert not F.KDV_DN2_SUM.is_legal(0)
    assert not F.KDV_DN2_SUM.is_legal(1.5)


def test_spacing():
    half = [F.KDV_DN2_SUM, F.MKDV1_SN_PRODUCT_EVEN, F.MKDV2_DN_SUM, F.MKDV2_DN_ALTERNATING_EVEN]
    for fam in half:
        assert fam.spacing(2) is Spacing.HALF
    for fam in (F.MKDV1_SN_SUM_ODD, F.MKDV2_CN_SUM_ODD):
        assert fam.spacing(3) is Spacing.FULL
    assert F.MIURA_OF_MKDV1.spacing(3) is Spacing.FULL
    assert F.MIURA_OF_MKDV1.spacing(4) is Spacing.HALF
    assert miura_source(5) is F.MKDV1_SN_SUM_ODD
    assert miura_source(2) is F.MKDV1_SN_PRODUCT_EVEN


def test_equations():
    assert F.KDV_DN2_SUM.equation == "kdv"
    assert F.MIURA_OF_MKDV1.equation == "kdv"
    assert F.MKDV1_SN_PRODUCT_EVEN.equation == "mkdv1"
    assert F.MKDV2_CN_SUM_ODD.equation == "mkdv2"


# -- velocities ---------------------------------------------------------------


def test_velocity_examples():
    assert velocity(F.KDV_DN2_SUM, 1, 1.0, 0.0) == 4.0
    assert velocity(F.KDV_DN2_SUM, 4, 0.0, 0.0) == pytest.approx(-16, abs=1e-9)
    assert velocity(F.KDV_DN2_SUM, 4, 1.0, 0.0) == 4.0
    assert velocity(F.KDV_DN2_SUM, 4, 1 - 1e-9, 0.0) == pytest.approx(4, abs=1e-3)
    assert velocity(F.MKDV1_SN_SUM_ODD, 1, 0.3) == pytest.approx(-1.3, abs=1e-12)
    assert velocity(F.MKDV1_SN_SUM_ODD, 3, 0.0) == pytest.approx(-9, abs=1e-9)
    q4 = velocity(F.MKDV1_SN_PRODUCT_EVEN, 4, 0.5)
    assert q4 == pytest.approx(-3 - 12 * math.sqrt(0.5), abs=1e-12)


@pytest.mark.parametrize("m", [0.0, 0.2, 0.5, 0.8, 0.99])
@pytest.mark.parametrize("beta", [0.0, 1.0])
def test_b1_equals_b2(m, beta):
    b1 = velocity(F.KDV_DN2_SUM, 1, m, beta)
    assert b1 == pytest.approx(8 - 4 * m - 6 * beta, abs=1e-12)
    assert velocity(F.KDV_DN2_SUM, 2, m, beta) == pytest.approx(b1, abs=1e-9)


@pytest.mark.parametrize("m", [0.1, 0.4, 0.7, 0.9])
def test_b3_b4_closed(m):
    Q = constant_Q(m)
    assert velocity(F.KDV_DN2_SUM, 3, m) == pytest.approx(8 - 4 * m + 12 * (2 - 2 / Q), abs=1e-8)
    b4 = 8 - 4 * m - 24 * math.sqrt(1 - m)
    assert velocity(F.KDV_DN2_SUM, 4, m) == pytest.approx(b4, abs=1e-8)


@pytest.mark.parametrize("m", [0.1, 0.5, 0.9])
def test_other_velocity_formulas(m):
    q1 = -(1 + m)
    assert velocity(F.MKDV1_SN_SUM_ODD, 1, m) == pytest.approx(q1, abs=1e-12)
    assert velocity(F.MKDV1_SN_PRODUCT_EVEN, 2, m) == pytest.approx(-2 * (2 - m), abs=1e-12)
    B = extract_constant(Kind.B, 3, m).value
    C = extract_constant(Kind.C, 3, m).value
    assert velocity(F.MKDV1_SN_SUM_ODD, 3, m) == pytest.approx(-(1 + m) - 6 * (B - C), abs=1e-12)
    E = extract_constant(Kind.E, 4, m).value
    Fc = extract_constant(Kind.F, 4, m).value
    assert velocity(F.MKDV2_DN_SUM, 4, m) == pytest.approx(2 - m + 6 * (E - Fc), abs=1e-12)
    G = extract_constant(Kind.G, 5, m).value
    Hc = extract_constant(Kind.H, 5, m).value
    assert velocity(F.MKDV2_CN_SUM_ODD, 5, m) == pytest.approx(2 * m - 1 + 6 * (G - Hc), abs=1e-12)
    I_, J, L = (extract_constant(k, 6, m).value for k in (Kind.I, Kind.J, Kind.L))
    assert velocity(F.MKDV2_DN_ALTERNATING_EVEN, 6, m) == pytest.approx(2 - m - 6 * (I_ - J + L), abs=1e-12)
    # beta only enters KdV
    assert velocity(F.MKDV2_DN_SUM, 3, m, beta=5.0) == velocity(F.MKDV2_DN_SUM, 3, m)


def test_velocity_errors():
    with pytest.raises(UsageError):
        velocity(F.MKDV1_SN_PRODUCT_EVEN, 6, 0.5)
    with pytest.raises(UsageError):
        velocity(F.MKDV1_SN_SUM_ODD, 2, 0.5)
    with pytest.raises(DivergenceError):
        velocity(F.MKDV2_DN_SUM, 3, 1.0)
    assert velocity(F.MKDV2_DN_SUM, 1, 1.0) == pytest.approx(1.0)


# -- profiles -----------------------------------------------------------------


@pytest.mark.parametrize("alpha,beta", [(1.0, 0.0), (0.7, 1.3)])
def test_kdv_profile_structure(alpha, beta):
    R = SiteRing(3, Spacing.HALF)
    w = build(F.KDV_DN2_SUM, 3, alpha=alpha, beta=beta, m=0.4)
    expect = -2 * alpha**2 * (R.d(1) ** 2 + R.d(2) ** 2 + R.d(3) ** 2) + beta * alpha**2
    assert w.profile == expect
    assert w.velocity == velocity(F.KDV_DN2_SUM, 3, 0.4, beta)


def test_mkdv_profile_structures():
    m, a = 0.36, 1.5
    R = SiteRing(3, Spacing.FULL)
    w = build(F.MKDV1_SN_SUM_ODD, 3, alpha=a, sign=-1, m=m)
    assert w.profile == -math.sqrt(m) * a * (R.s(1) + R.s(2) + R.s(3))
    w = build(F.MKDV2_CN_SUM_ODD, 3, alpha=a, m=m)
    assert w.profile == math.sqrt(m) * a * (R.c(1) + R.c(2) + R.c(3))
    R4 = SiteRing(4, Spacing.HALF)
    w = build(F.MKDV1_SN_PRODUCT_EVEN, 4, alpha=a, m=m)
    v4 = a * (1 - math.sqrt(1 - m)) * R4.m * R4.s(1) * R4.s(2) * R4.s(3) * R4.s(4)
    assert w.profile == v4
    w = build(F.MKDV2_DN_ALTERNATING_EVEN, 4, alpha=a, sign=-1, m=m)
    assert w.profile == -a * (R4.d(1) - R4.d(2) + R4.d(3) - R4.d(4))
    w = build(F.MKDV2_DN_SUM, 4, alpha=a, m=m)
    assert w.profile == a * sum(R4.d(i) for i in range(1, 5))
    R2 = SiteRing(2, Spacing.HALF)
    w = build(F.MKDV1_SN_PRODUCT_EVEN, 2, alpha=a, m=m)
    assert w.profile == a * R2.m * R2.s(1) * R2.s(2)


def test_kdv_p2_at_origin():
    w = build(F.KDV_DN2_SUM, 2, alpha=1, beta=0, m=0.5)
    assert evaluate(w.profile, 0.0, 0.5) == pytest.approx(-3, abs=1e-14)


def test_beta_zeroed_for_mkdv():
    w = build(F.MKDV2_DN_SUM, 2, beta=3.0, m=0.5)
    assert w.beta == 0.0


def test_build_errors():
    with pytest.raises(UsageError):
        build(F.KDV_DN2_SUM, 2, alpha=0.0)
    with pytest.raises(UsageError):
        build(F.KDV_DN2_SUM, 2, sign=0)
    with pytest.raises(UsageError):
        build(F.MKDV2_DN_ALTERNATING_EVEN, 3)
    with pytest.raises(UsageError):
        build(F.KDV_DN2_SUM, 2, m=1.2)
    with pytest.raises(DivergenceError):
        build(F.KDV_DN2_SUM, 2, m=1.0)
    with pytest.raises(UsageError):
        build("nonsense", 2)


# -- m = 1 limits ---------------------------------------------------------------


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_kdv_sech_limit(alpha):
    w = build(F.KDV_DN2_SUM, 1, alpha=alpha, m=1.0)
    xi = np.linspace(-5, 5, 201)
    got = eval_solution(w, xi / alpha, 0.0)
    assert np.max(np.abs(got + 2 * alpha**2 / np.cosh(xi) ** 2)) < 1e-10


@pytest.mark.parametrize("sign", [1, -1])
def test_mkdv_tanh_limit(sign):
    w = build(F.MKDV1_SN_SUM_ODD, 1, alpha=1.0, sign=sign, m=1.0)
    assert w.velocity == pytest.approx(-2.0)
    xi = np.linspace(-5, 5, 201)
    got = evaluate(w.profile, xi, 1.0)
    assert np.max(np.abs(got - sign * np.tanh(xi))) < 1e-10


# -- Miura ----------------------------------------------------------------------


@pytest.mark.parametrize("m", [0.3, 0.8, 1.0])
@pytest.mark.parametrize("sign", [1, -1])
def test_miura_p1(m, sign):
    a = 1.3
    v = build(F.MKDV1_SN_SUM_ODD, 1, alpha=a, m=m)
    u = miura(v, sign)
    assert u.family is F.MIURA_OF_MKDV1
    assert u.velocity == pytest.approx(-(1 + m), abs=1e-12)
    s, c, d = jacobi(XI, m)
    expect = a**2 * (m * s * s + sign * math.sqrt(m) * c * d)
    assert np.max(np.abs(evaluate(u.profile, XI, m) - expect)) < 1e-10
    assert residual_scan(u, (-4.0, 4.0, 129)).max_rel <= 1e-8


@pytest.mark.parametrize("m", [0.2, 0.5, 0.9])
def test_miura_p2_reduction(m):
    a = 0.8
    v = build(F.MKDV1_SN_PRODUCT_EVEN, 2, alpha=a, m=m)
    K = complete_K(m)
    s1 = jacobi(XI, m).s
    s2 = jacobi(XI + K, m).s
    options = [a**2 * (2 * m * s1**2 - m), a**2 * (2 * m * s2**2 - m)]
    matched = []
    for sign in (1, -1):
        got = evaluate(miura(v, sign).profile, XI, m)
        errs = [np.max(np.abs(got - opt)) for opt in options]
        assert min(errs) < 1e-10
        matched.append(int(np.argmin(errs)))
    assert sorted(matched) == [0, 1]


def test_miura_family_build_matches_transform():
    for p in (1, 2, 3, 4, 5):
        for sign in (1, -1):
            w = build(F.MIURA_OF_MKDV1, p, alpha=1.7, sign=sign, m=0.45)
            src = build(miura_source(p), p, alpha=1.7, m=0.45)
            assert w.profile == miura(src, sign).profile
            assert w.velocity == src.velocity


def test_miura_errors():
    with pytest.raises(UsageError):
        miura(build(F.KDV_DN2_SUM, 2), 1)
    with pytest.raises(UsageError):
        miura(build(F.MKDV2_DN_SUM, 2), 1)
    with pytest.raises(UsageError):
        miura(build(F.MKDV1_SN_SUM_ODD, 1), 2)


# -- evaluation -----------------------------------------------------------------


def test_eval_examples():
    w = build(F.KDV_DN2_SUM, 1, alpha=1, beta=0, m=0.5)
    assert eval_solution(w, 0.0, 0.0) == pytest.approx(-2.0, abs=1e-15)
    w = build(F.MKDV2_CN_SUM_ODD, 3, alpha=1.4, m=0.6)
    x = np.linspace(-2, 2, 9)
    np.testing.assert_allclose(eval_solution(w, x, 0.0), evaluate(w.profile, 1.4 * x, 0.6),
                               rtol=0, atol=1e-15)


@settings(deadline=None, max_examples=50)
@given(
    st.sampled_from([(f, p) for f in WaveFamily for p in f.legal_ps(5)]),
    st.floats(-3, 3), st.floats(-2, 2), st.floats(-1, 1),
)
def test_rigid_translation(case, x, t, delta):
    fam, p = case
    w = build(fam, p, alpha=1.2, m=0.55)
    a = eval_solution(w, x, t)
    b = eval_solution(w, x + w.velocity * w.alpha**2 * delta, t + delta)
    assert abs(a - b) < 1e-9


def test_travelling_coordinate():
    w = build(F.KDV_DN2_SUM, 2, alpha=2.0, m=0.3)
    assert travelling_coordinate(w, 1.0, 0.5) == pytest.approx(2.0 * (1.0 - w.velocity * 4.0 * 0.5))


@pytest.mark.parametrize("p", [1, 2, 3, 4, 5, 6])
@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_kdv_period(p, alpha):
    m = 0.7
    w = build(F.KDV_DN2_SUM, p, alpha=alpha, m=m)
    T = 2 * complete_K(m) / (p * alpha)
    x = np.linspace(-1, 3, 41)
    assert np.max(np.abs(eval_solution(w, x + T, 0.0) - eval_solution(w, x, 0.0))) < 1e-10
    assert w.period == pytest.approx(2 * complete_K(m) / p, rel=1e-15)
    if p > 1:
        # the superposition really has the shorter period
        single = build(F.KDV_DN2_SUM, 1, alpha=alpha, m=m)
        assert np.max(np.abs(eval_solution(single, x + T, 0.0) - eval_solution(single, x, 0.0))) > 1e-3


def test_periods_of_other_families():
    m = 0.5
    K = complete_K(m)
    assert build(F.MKDV1_SN_SUM_ODD, 3, m=m).period == pytest.approx(4 * K / 3)
    assert build(F.MKDV2_DN_SUM, 3, m=m).period == pytest.approx(2 * K / 3)
    for fam, p in [(F.MKDV1_SN_SUM_ODD, 3), (F.MKDV2_DN_SUM, 4), (F.MKDV2_CN_SUM_ODD, 5),
                   (F.MKDV1_SN_PRODUCT_EVEN, 4), (F.MKDV2_DN_ALTERNATING_EVEN, 4),
                   (F.MIURA_OF_MKDV1, 3)]:
        w = build(fam, p, m=m)
        np.testing.assert_allclose(
            evaluate(w.profile, XI + w.period, m), evaluate(w.profile, XI, m), atol=1e-10,
        )
    assert math.isinf(build(F.KDV_DN2_SUM, 1, m=1.0).period)


# -- odd-p composite identity ------------------------------------------------------


@pytest.mark.parametrize("p", [1, 3, 5])
@pytest.mark.parametrize("m", [0.1, 0.5, 0.9])
def test_composite_identity_odd_p(p, m):
    """m sum_i s_i^2 sum_{j!=i} c_j d_j + 2m [sum_{i<j} s_i s_j] [sum_k c_k d_k]
    = (B - C) sum_k c_k d_k on the 4K/p lattice."""
    R = SiteRing(p, Spacing.FULL)
    sites = range(1, p + 1)
    cd = {i: R.c(i) * R.d(i) for i in sites}
    sum_cd = sum(cd.values()) if p > 1 else cd[1]
    lhs = R.m * sum(R.s(i) ** 2 * sum(cd[j] for j in sites if j != i) for i in sites)
    pairs = sum(R.s(i) * R.s(j) for i in sites for j in sites if i < j)
    lhs = lhs + 2 * R.m * pairs * sum_cd
    B = extract_constant(Kind.B, p, m).value
    C = extract_constant(Kind.C, p, m).value
    diff = lhs - (B - C) * sum_cd
    xi = np.linspace(0.05, 4 * complete_K(m), 40)
    sv = site_values(p, Spacing.FULL, m, xi, dps=40)
    gap = np.abs(np.asarray(sv.value(diff), dtype=float))
    scale = np.maximum(sv.magnitude(lhs), 1.0)
    assert np.max(gap / scale) <= 1e-9
