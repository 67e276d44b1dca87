import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from _util import C, D, dist
from theta_atlas import AmbiguousNearSpectral, DegreeOverflow, DomainError
from theta_atlas.complexzeros import (STATUS_CERTIFIED, build_truncation, certify_zero,
                                      count_pairs, exact_conj, find_all_zeros, term_modulus)
from theta_atlas.realzeros import list_real_zeros
from theta_atlas.series import PrecisionConfig, eval_theta, eval_theta_partial
from theta_atlas.spectrum import SPECTRAL_TABLE

B_PLUS = C("0.6128998489", "2.37247194")
B_MOD = D("2.450361061")
DTHETA_B = C("-0.61438131630488907283036863725021038601449761657469",
             "-1.0999950054529624034503746248197967264912264740312")


# --- truncation -------------------------------------------------------------

def test_truncation_term_101_at_b():
    # the first omitted term of the degree-100 truncation, on |x| = |b+|
    assert term_modulus("0.8", 101, B_MOD) < D("2e-460")
    # and the following ratio q^102 |b+|
    with mp.workdps(30):
        ratio = D("0.8") ** 102 * B_MOD
    assert ratio < D("3.3e-10")


def test_truncation_q08_r50():
    t = build_truncation("0.8", 50)
    assert t.degree <= 100
    assert t.tail_bound_on_disk <= t.threshold
    assert t.q ** (t.degree + 1) * 50 <= 0.5
    # minimality: one degree less misses one of the two conditions
    n = t.degree - 1
    assert not (t.q ** (n + 1) * 50 <= 0.5 and 2 * term_modulus(t.q, n + 1, 50) <= t.threshold)


def test_truncation_small_q():
    t = build_truncation("0.05", 50)
    assert t.degree <= 25
    assert t.tail_bound_on_disk < D("1e-30")
    # direct summation of the omitted terms stays below the recorded bound
    with mp.workdps(60):
        direct = mpmath.fsum(term_modulus(t.q, j, 50) for j in range(t.degree + 1, t.degree + 40))
    assert direct <= t.tail_bound()


@pytest.mark.parametrize("q", ["0.05", "0.5", "0.8"])
def test_truncation_tail_monotone(q):
    t = build_truncation(q, 50)
    tails = [t.tail_bound(n) for n in range(t.degree, t.degree + 8)]
    assert all(a > b for a, b in zip(tails, tails[1:]))


def test_truncation_close_to_one_overflows():
    with pytest.raises(DegreeOverflow):
        build_truncation("0.9999", 50, PrecisionConfig.for_digits(60))


def test_truncation_matches_series():
    t = build_truncation("0.6", 20)
    x = mpmath.mpc(3, -7)
    with mp.workdps(60):
        assert abs(t.evaluate(x) - eval_theta("0.6", x).value) < D("1e-30")


# --- find_all_zeros ------------------------------------------------------------

def test_b_pair_at_08():
    inv = find_all_zeros("0.8", 50)
    assert inv.complete and inv.all_certified
    hits = [z for z in inv.zeros if dist(z.location, B_PLUS) < D("1e-8")]
    assert len(hits) == 1
    z = hits[0]
    assert abs(z.modulus - B_MOD) < D("1e-8")
    assert z.status == STATUS_CERTIFIED and z.deriv_lower > D("1.25")
    assert any(dist(w.location, exact_conj(B_PLUS)) < D("1e-8") for w in inv.zeros)


def test_derivative_at_b():
    z = [w for w in find_all_zeros("0.8", 50).upper_zeros if dist(w.location, B_PLUS) < D("1e-8")][0]
    d = eval_theta_partial("0.8", z.location, dx=1).value
    # independent oracle: mpmath.diff of the nsum series at a findroot zero (50 digits)
    assert dist(d, DTHETA_B) < D("1e-25")
    # published value carries ~3.4e-9 error in its last digits
    assert dist(d, C("-0.6143813197", "-1.099995004")) < D("5e-9")
    assert abs(d) > D("1.25")


def test_no_complex_zeros_below_q1():
    inv = find_all_zeros("0.25", 50)
    assert inv.complete
    assert inv.pair_count == 0
    assert all(z.is_real for z in inv.zeros)


def test_one_pair_at_04():
    inv = find_all_zeros("0.4", 50)
    assert inv.complete and inv.pair_count == 1


@pytest.mark.parametrize("q,n", [("0.55", 2), ("0.72", 4), ("0.2", 0)])
def test_count_pairs(q, n):
    assert count_pairs(q) == n


@pytest.mark.parametrize("q", ["0.35", "0.6", "0.8", "0.9"])
def test_inventory_invariants(q):
    inv = find_all_zeros(q, 50)
    assert inv.complete and inv.all_certified
    locs = [z.location for z in inv.zeros]
    for z in inv.zeros:
        # never inside the closed unit disk
        assert z.modulus > 1
        # certification rule
        assert z.residual / z.deriv_lower <= z.cert_radius
        assert z.newton_step < z.cert_radius / 2
        # conjugate closure
        if not z.is_real:
            assert any(dist(w, exact_conj(z.location)) < D("1e-20") for w in locs)


@pytest.mark.parametrize("q", ["0.5", "0.8"])
def test_residual_validity(q):
    hi = PrecisionConfig.for_digits(60)
    for z in find_all_zeros(q, 50).zeros:
        r = eval_theta(q, z.location, hi)
        with mp.workdps(200):
            assert abs(r.value) <= z.residual + r.abs_error


@pytest.mark.parametrize("q", ["0.3", "0.7"])
def test_real_zero_cross_check(q):
    inv = find_all_zeros(q, 50)
    reals = sorted((z.location.real for z in inv.real_zeros), reverse=True)
    listed = list_real_zeros(q, len(reals))
    assert len(listed.zeros) == len(reals)
    for a, rz in zip(reals, listed.zeros):
        assert dist(a, rz.location) < D("1e-25")


def test_conjugate_roundtrip_exact():
    z = find_all_zeros("0.8", 50).upper_zeros[0]
    assert z.conjugate().conjugate().location == z.location
    assert z.conjugate().location.imag + z.location.imag == 0


def test_certify_zero_single():
    z = certify_zero("0.8", B_PLUS)
    # a 10-digit seed is not a zero to 30 digits
    assert not z.certified
    polished = [w for w in find_all_zeros("0.8", 50).zeros if dist(w.location, B_PLUS) < D("1e-8")][0]
    assert certify_zero("0.8", polished.location).certified


@settings(max_examples=25)
@given(st.floats(min_value=0.05, max_value=0.9))
def test_property_no_zero_in_unit_disk(q):
    inv = find_all_zeros(q, 30)
    assert all(z.modulus > 1 for z in inv.zeros)
    key = lambda w: (w.real, w.imag)
    ups = sorted((complex(z) for z in inv.zeros if z.imag > 0), key=key)
    downs = sorted((complex(z).conjugate() for z in inv.zeros if z.imag < 0), key=key)
    assert len(ups) == len(downs)
    assert all(abs(a - b) < 1e-12 * abs(a) for a, b in zip(ups, downs))


@pytest.mark.parametrize("k", range(1, 11))
def test_pair_birth(k):
    qk = D(SPECTRAL_TABLE[k - 1])
    below = count_pairs(qk - D("1e-4"))
    above = count_pairs(qk + D("1e-4"))
    assert (below, above) == (k - 1, k)


def test_count_pairs_monotone():
    grid = ["0.2", "0.3", "0.35", "0.5", "0.55", "0.62", "0.65", "0.7", "0.72", "0.76", "0.8"]
    counts = [count_pairs(q) for q in grid]
    assert counts == sorted(counts)


def test_domain_errors():
    with pytest.raises(DomainError):
        find_all_zeros("0.5", 56)
    with pytest.raises(DomainError):
        find_all_zeros("0.97", 50)
    with pytest.raises(DomainError):
        build_truncation("0.5", 0.5)


@pytest.mark.parametrize("offset", ["1e-24", "-1e-24"])
def test_near_double_flagged(offset):
    # 1e-24 from q~_1 the two zeros sit ~1e-11 apart, inside one certification disk
    from theta_atlas.spectrum import find_spectral_point
    with mp.workdps(60):
        q = find_spectral_point(1).q_tilde + mpmath.mpf(offset)
    inv = find_all_zeros(q, 20)
    assert len(inv.uncertified) == 2
    assert len(inv) == inv.winding_count
    with pytest.raises(AmbiguousNearSpectral):
        count_pairs(q)
