import mpmath
import pytest
from mpmath import mp

from _util import D, dist, npow
from theta_atlas import BracketFailure
from theta_atlas.realzeros import bracket_real_zero, find_real_zero, list_real_zeros
from theta_atlas.series import PrecisionConfig, eval_theta

# 400-step bisection oracle on the raw series at 120 digits
XI1_02 = D("-6.700760910099115058454291864087343362578")
XI_005 = [D(s) for s in (
    "-21.1112748953031837031294793698", "-399.941209752149020825230989382",
    "-8000.00014694986251436179672717", "-159999.999999981595629805141962",
    "-3199999.99999999911193638560307", "-63999999.9999999786837179271611",
    "-1279999999.99999950262008496793", "-25599999999.9999886313162278384",
    "-511999999999.999744204615126364", "-10239999999999.9943156581139192",
    "-204799999999999.874944478506222", "-4095999999999997.27151589468122")]


def _theta(q, x):
    with mp.workdps(200):
        return eval_theta(q, mpmath.mpc(x)).real


def test_lemma_bracket_odd():
    b = bracket_real_zero("0.2", 1)
    assert b.sign_separating
    assert dist(b.lo, npow("0.2", "-1.2")) < D("1e-25")
    assert dist(b.hi, D(-5)) < D("1e-25")
    assert _theta("0.2", b.lo) * _theta("0.2", b.hi) < 0


def test_lemma_bracket_even():
    b = bracket_real_zero("0.2", 2)
    assert dist(b.lo, D(-25)) < D("1e-25")
    assert dist(b.hi, npow("0.2", "-1.8")) < D("1e-25")
    assert float(b.hi) == pytest.approx(-18.119, abs=1e-3)
    assert _theta("0.2", b.lo) * _theta("0.2", b.hi) < 0


def test_interlacing_bracket_above_lemma_range():
    b = bracket_real_zero("0.25", 3)
    assert dist(b.lo, -D("0.25") ** -4) < D("1e-25")
    assert dist(b.hi, -D("0.25") ** -3) < D("1e-25")
    lo, hi = b.zero_interval
    assert _theta("0.25", lo) * _theta("0.25", hi) < 0


def test_bracket_failure_for_complex_index():
    with pytest.raises(BracketFailure):
        bracket_real_zero("0.4", 1)


def test_first_zero_matches_bisection_oracle():
    z = find_real_zero("0.2", 1)
    assert dist(z.location, XI1_02) < D("1e-28")
    assert z.bracket.contains(z.location)


@pytest.mark.parametrize("q,k", [(0.05, 1), (0.2, 3), (0.3, 2), (0.29, 1)])
def test_zero_left_of_minus_five(q, k):
    assert find_real_zero(q, k).location < -5


def test_scaling_limit_k10():
    z = find_real_zero("0.1", 10)
    assert abs(z.location * D("0.1") ** 10 + 1) < 0.3


@pytest.mark.parametrize("q", ["0.1", "0.2", "0.3"])
def test_scaling_limit_k20(q):
    z = find_real_zero(q, 20)
    with mp.workdps(60):
        assert abs(z.location * mpmath.mpf(q) ** 20 + 1) < 0.1


def test_list_lemma_range():
    lst = list_real_zeros("0.2", 6)
    assert len(lst) == 6 and not lst.gap and not lst.short_count
    locs = lst.locations
    assert all(a > b for a, b in zip(locs, locs[1:]))
    assert all(z.bracket.source == "refined" for z in lst)


def test_list_gap_after_first_pair():
    lst = list_real_zeros("0.4", 4)
    assert lst.first_index == 3 and lst.gap
    assert len(lst) == 4
    assert [z.k for z in lst] == [3, 4, 5, 6]


def test_list_matches_oracle():
    lst = list_real_zeros(mpmath.mpf(0.05), 12)
    for z, ref in zip(lst, XI_005):
        with mp.workdps(80):
            assert abs(z.location - ref) / abs(ref) < D("1e-28")


def test_bracket_containment_and_sign_pattern():
    q = mpmath.mpf("0.15")
    lst = list_real_zeros(q, 8)
    for z in lst:
        assert z.bracket.contains(z.location)
    xs = lst.locations
    with mp.workdps(120):
        for i in range(len(xs) - 1):
            mid = (xs[i] + xs[i + 1]) / 2
            # between xi_{k} and xi_{k+1}: negative after an odd index, positive after an even one
            k = lst[i].k
            sign = _theta(q, mid)
            assert (sign < 0) if k % 2 else (sign > 0)


def test_residual_invariant():
    hi = PrecisionConfig.for_digits(60)
    for z in list_real_zeros("0.3", 5):
        r = eval_theta("0.3", z.location, hi)
        with mp.workdps(300):
            assert abs(r.value) <= z.residual + r.abs_error
