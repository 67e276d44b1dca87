import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from _util import C, D, dist
from theta_atlas import DomainError
from theta_atlas.series import (DEFAULT_PRECISION, PrecisionConfig, check_identities, eval_G,
                                eval_bilateral_series, eval_katsnelson_family, eval_theta,
                                eval_theta_partial, eval_theta_star)

FAST = PrecisionConfig.for_digits(15)

# frozen oracles: plain fsum of the defining series at 120 digits
THETA_03_M25 = D("0.4075886364482018903641528080185210194516")
THETA_STAR_05_2I = C("2.860010456046331049413198702211746095456",
                     "0.9049716903237748028338809815783053948232")
G_05_M7 = D("-0.1330110428519406496027162935438430373862")


def test_theta_at_zero_is_one_exactly():
    r = eval_theta(0.5, 0)
    assert r.value == 1
    assert r.terms_used >= 1


def test_tau1_quoted_value():
    with mp.workdps(60):
        x = -mpmath.mpf("0.2") ** mpmath.mpf("-1.2")
    r = eval_theta("0.2", x)
    assert abs(r.real - mpmath.mpf("-0.0197796780")) < 1e-9


def test_theta_matches_direct_summation_oracle():
    r = eval_theta("0.3", "-2.5")
    assert dist(r.value, THETA_03_M25) < mpmath.mpf(10) ** -DEFAULT_PRECISION.target_digits
    assert dist(r.value, THETA_03_M25) <= r.abs_error + mpmath.mpf(10) ** -40


def test_error_bound_meets_target():
    for q, x in [(0.3, -2.5), (0.9, 7j), (0.7, -40)]:
        r = eval_theta(q, x)
        assert r.abs_error <= mpmath.mpf(10) ** -30 * max(1, abs(r.value))


@pytest.mark.parametrize("q", [0, 1, -0.2, 1.5, float("nan")])
def test_rejects_bad_q(q):
    with pytest.raises(DomainError):
        eval_theta(q, 1)


def test_rejects_non_finite_x():
    with pytest.raises(DomainError):
        eval_theta(0.5, complex(float("inf"), 0))


def test_theta_star_5i_quoted_to_eight_digits():
    r = eval_theta_star("0.5", 5j)
    assert abs(r.real - mpmath.mpf("-1.542068340")) < 1e-8
    assert abs(r.imag - mpmath.mpf("0.4429511372")) < 1e-9
    assert abs(abs(r.value) - mpmath.mpf("1.604425279")) < 1e-8


def test_theta_star_5i_three_routes_agree():
    a = eval_theta_star("0.5", 5j).value
    b = eval_bilateral_series("0.5", 5j).value
    with mp.workdps(60):
        # Theta*(q,x) = sum q^{j(j+1)/2} x^j = jtheta(3) after completing the square
        c = mpmath.fsum(mpmath.mpf("0.5") ** (mpmath.mpf(j) * (j + 1) / 2) * mpmath.mpc(0, 5) ** j
                        for j in range(-120, 121))
    assert dist(a, b) < D("1e-28") and dist(a, c) < D("1e-28")


@pytest.mark.parametrize("q", [0.1, 0.5, 0.9])
def test_theta_star_vanishes_at_minus_one(q):
    assert eval_theta_star(q, -1).value == 0


def test_theta_star_matches_bilateral_oracle():
    r = eval_theta_star("0.5", 2 + 1j)
    assert dist(r.value, THETA_STAR_05_2I) < D("1e-30")


def test_theta_star_rejects_zero():
    with pytest.raises(DomainError):
        eval_theta_star(0.5, 0)
    with pytest.raises(DomainError):
        eval_G(0.5, 0)


@pytest.mark.parametrize("q", [0.05, 0.5, 0.9, 0.99])
def test_G_quarter_bound_on_radius_five(q):
    for k in range(24):
        x = 5 * mpmath.expj(2 * mpmath.pi * k / 24)
        r = eval_G(q, x)
        assert abs(r.value) <= 0.25 + r.abs_error


def test_G_leading_term():
    x = mpmath.mpc(1e6, 0)
    r = eval_G(0.5, x)
    assert abs(r.value * x - 1) < 1e-6


def test_G_matches_direct_oracle():
    assert dist(eval_G("0.5", -7).value, G_05_M7) < D("1e-30")


def test_identities_at_5i():
    c = check_identities("0.5", 5j)
    assert c.decomposition <= c.decomposition_bound
    assert c.passed


def test_identities_small_at_08():
    c = check_identities(0.8, -3.7)
    assert all(r < D("1e-28") for r in c.residuals)


def test_katsnelson_family():
    assert eval_katsnelson_family(0.01, 0).value == 1
    inside = eval_katsnelson_family(0.001, -2, FAST).value
    assert abs(inside - mpmath.mpf(1) / 3) < 0.02
    assert abs(eval_katsnelson_family(0.001, 2, FAST).value) > abs(eval_katsnelson_family(0.01, 2, FAST).value)


def test_partial_derivatives_match_finite_differences():
    q, x = mpmath.mpf("0.6"), mpmath.mpc(-3, 2)
    h = mpmath.mpf("1e-20")
    with mp.workdps(60):
        dx = (eval_theta(q, x + h).value - eval_theta(q, x - h).value) / (2 * h)
        dq = (eval_theta(q + h, x).value - eval_theta(q - h, x).value) / (2 * h)
    assert dist(eval_theta_partial(q, x, dx=1).value, dx) < D("1e-15")
    assert dist(eval_theta_partial(q, x, dq=1).value, dq) < D("1e-15")


# --- property suites -------------------------------------------------------

qs = st.floats(0.01, 0.99)
points = st.builds(lambda r, t: r * complex(math.cos(t), math.sin(t)),
                   st.floats(1e-3, 50), st.floats(-math.pi, math.pi))


@settings(max_examples=1000)
@given(qs, points)
def test_identities_random(q, x):
    c = check_identities(q, x, FAST)
    assert c.passed, (q, x, c)


@settings(max_examples=150)
@given(qs, points)
def test_bilateral_reflection(q, x):
    a = eval_theta_star(q, 1 / mpmath.mpc(x), FAST)
    b = eval_theta_star(q, x, FAST)
    assert abs(a.value - x * b.value) <= a.abs_error + abs(x) * b.abs_error + 1e-12 * abs(a.value)


@settings(max_examples=100)
@given(qs, st.floats(0.1, 20), st.floats(-math.pi, math.pi))
def test_product_matches_series(q, r, t):
    x = r * complex(math.cos(t), math.sin(t))
    a = eval_theta_star(q, x, FAST)
    b = eval_bilateral_series(q, x, FAST)
    assert abs(a.value - b.value) <= a.abs_error + b.abs_error + 1e-25


@settings(max_examples=200)
@given(qs, st.floats(0, 1e6))
def test_positive_on_positive_axis(q, x):
    assert eval_theta(q, x, FAST).real > 0


@pytest.mark.parametrize("q", [k / 10 for k in range(1, 10)])
def test_theta_at_minus_q_power(q):
    qq = mpmath.mpf(q)
    for m in range(1, 21):
        with mp.workdps(60 + int(0.5 * m * m * -math.log10(q)) + 10):
            x = -(qq ** -m)
        # q^m - theta is about q^{2m}: the absolute target has to reach below it
        digits = 10 + int(2 * m * -math.log10(q))
        v = eval_theta(qq, x, PrecisionConfig.for_digits(max(30, digits)))
        with mp.workdps(80):
            assert 0 < v.real - v.abs_error and v.real + v.abs_error < qq ** m


@pytest.mark.parametrize("q", [0.1, 0.3, 0.5, 0.7, 0.9, 0.95])
def test_unit_circle_zero_free(q):
    from theta_atlas.kernels import theta_scaled
    import numpy as np
    z = np.exp(1j * np.linspace(0, 2 * np.pi, 720, endpoint=False))
    f, _, e = theta_scaled(q, z)
    assert np.min(np.abs(f) * np.exp2(e)) > 0
    # confirm the float64 minimum in multiprecision
    i = int(np.argmin(np.abs(f)))
    assert abs(eval_theta(q, complex(z[i]), FAST).value) > 0.01
