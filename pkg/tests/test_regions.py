import cmath
import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from mpmath import mp

from _util import D
from theta_atlas import DomainError
from theta_atlas.errors import PreconditionUnmet
from theta_atlas.regions import geometry as geo
from theta_atlas.regions import proofs, verify_theorem
from theta_atlas.regions.sweeps import T2B_Q_MAX

# direct summation oracles at 60 digits (plain loops, 500 / 2000 terms)
S_05 = D("-10.97613555503795344192085956596908865725")
W_07 = D("38.08514107679763433920645386958975893761")
# d/dq |Theta*(q,5i)|^2 at q = 0.6: term-wise differentiated log-product
DQ_06 = D("12.9090907420607884171565390107")


# --- geometry ------------------------------------------------------------------

def test_katsnelson_boundary_point():
    z = complex(1.550883197, 1.550883197)
    assert abs(z - cmath.exp((math.pi / 4) * (1 + 1j))) < 1e-9
    assert geo.classify(geo.katsnelson_interior(), z) == geo.BOUNDARY


def test_katsnelson_top_of_contour():
    # the upper branch e^t sin t peaks at t = 3pi/4; e^{3pi/4}/sqrt(2) = 7.46048853929...
    top = geo.katsnelson_point(3 * math.pi / 4)
    h = math.exp(3 * math.pi / 4) / math.sqrt(2)
    assert top.real == pytest.approx(-h, abs=1e-12)
    assert top.imag == pytest.approx(h, abs=1e-12)
    # published 10-digit value, off by 3.3e-9 in its last digits
    assert h == pytest.approx(7.460488536, abs=5e-9)
    assert geo.classify(geo.katsnelson_interior(), top) == geo.BOUNDARY
    k = geo.katsnelson_interior()
    for d in (1e-3, 0.1, 1.0):
        assert not k.contains(complex(-7.460488536, 7.460488536 + d))
        assert k.contains(complex(-7.460488536, 7.460488536 - d))
    # horizontal tangent: no contour point rises above the peak
    t = np.linspace(0, math.pi, 20001)
    assert np.max(np.exp(t) * np.sin(t)) <= h + 1e-12


def test_half_annulus_examples():
    a = geo.half_annulus_A()
    assert a.contains(3j)
    assert not a.contains(0.5j)
    assert not a.contains(-3)
    assert not a.contains(5)


def test_region_definitions():
    d, e = geo.domain_D(), geo.domain_E_plus()
    assert d.contains(-2 + 2j) and not d.contains(-2 + 2.2j) and not d.contains(0.1)
    assert e.contains(-5000 + 100j) and e.contains(10 + 10j) and not e.contains(20)
    assert geo.left_half_disk().contains(-49.7) and not geo.left_half_disk().contains(-49.9)
    with pytest.raises(ValueError):
        geo.Region("square")


@settings(max_examples=400)
@given(st.floats(-60, 60), st.floats(-60, 60))
def test_predicate_sanity(x, y):
    z = complex(x, y)
    a, d = geo.half_annulus_A(), geo.domain_D()
    if d.contains(z):
        assert z.real <= 0
        # A and D meet at most on the imaginary axis, where A needs |z| > 1 and D |Im| <= 3/sqrt2
        assert not a.contains(z) or z.real == 0
    for reg in (a, d, geo.katsnelson_interior(), geo.disk(10), geo.left_half_disk()):
        m = reg.margin(z)
        if m > 1e-12:
            assert reg.contains(z)
        if m < -1e-12:
            assert not reg.contains(z)


def test_a_and_d_disjoint_off_axis():
    a, d = geo.half_annulus_A(), geo.domain_D()
    for z in (0.5 + 0.5j, -0.5 + 2j, -1e-9 + 2j):
        assert not (a.contains(z) and d.contains(z))


# --- S and W bounds ---------------------------------------------------------------

def test_S_oracle():
    s = proofs.eval_S("0.5")
    assert abs(s.value - S_05) < D("1e-28")
    assert s.tail_bound < D("1e-30")


def test_W_oracle():
    w = proofs.eval_W("0.7")
    assert abs(w.value - W_07) < D("1e-28")


@pytest.mark.parametrize("q", ["0.05", "0.3", "0.5", "0.9", "0.99"])
def test_signs(q):
    assert proofs.eval_S(q).value < 0
    assert proofs.eval_W(q).value > 0


@settings(max_examples=200)
@given(st.floats(min_value=1e-4, max_value=1 - 1e-4))
def test_bound_ordering(q):
    assert proofs.w_bound(q) > proofs.s_bound(q)
    with mp.workdps(30):
        assert mpmath.pi ** 2 / 3 < D("3.29")


def test_S_bound_and_W_vs_S():
    grid = [D("0.5") + D("0.01") * k for k in range(50)]
    rep = proofs.check_bounds(grid)
    assert rep.values["points"] == 50
    assert rep.values["S_ok"] and rep.values["W_gt_S"]


def test_W_normalised_limit():
    # W q ln^2 q approaches kappa-dagger / 2 ~ 3.41 as q -> 1
    rep = proofs.check_bounds(["0.99"])
    row = rep.details[0]
    const = proofs.proof_constants()
    assert abs(row["W_norm"] - const["kappa_dagger"] / 2) < D("0.05")


# --- proof constants -------------------------------------------------------------

def test_proof_constants():
    c = proofs.proof_constants()
    assert abs(c["zeta0"] - D("-2.685347089")) < D("1e-8")
    assert abs(c["kappa_dagger"] - D("6.82551484")) < D("1e-7")
    assert abs(c["r0"] - D("1.699895161")) < D("1e-8")
    assert c["kappa_error"] < D("1e-10")
    assert abs(proofs.U625(c["zeta0"])) < D("1e-20")


def test_kappa_tail_budget_too_small():
    from theta_atlas import QuadratureFailure
    with pytest.raises(QuadratureFailure):
        proofs.proof_constants(tail_budget="1e-300", t_max=50)


# --- |Theta*(q,5i)| monotonicity ------------------------------------------------

def test_propmain_grid():
    grid = [D("0.5") + D("0.005") * k for k in range(99)]
    rep = proofs.check_propmain(grid)
    assert rep.passed and rep.values["points"] == 99


def test_propmain_base_value():
    assert mpmath.sqrt(proofs.theta_star_5i_sq("0.5")) > D("0.25")


def test_propmain_fd_oracle():
    rep = proofs.check_propmain(["0.6"])
    fd = rep.details[0]["fd"]
    assert abs(fd - DQ_06) <= D("1e-4") * DQ_06
    assert abs(proofs.dq_theta_star_5i_sq("0.6") - DQ_06) < D("1e-20")


# --- arc minimality and circle bound -------------------------------------------

@pytest.mark.parametrize("q,B", [(0.5, 5.0), (0.9, 10.0), (0.99, 5.0)])
def test_arc_minimality(q, B):
    rep = proofs.check_arc_minimality(q, B, samples=721)
    assert rep.passed
    assert abs(abs(rep.values["arg_min"]) - math.pi / 2) < 1e-12
    assert rep.values["ray_min_R"] == 5.0


def test_arc_precondition():
    with pytest.raises(PreconditionUnmet):
        proofs.check_arc_minimality(0.4)


def test_circle_lemma_negative():
    q = D("0.63")
    with mp.workdps(40):
        x0 = -q ** D("-7.5")
    rep = proofs.check_circle_lemma(q, x0)
    assert rep.values["theta_x0"] < -1
    assert rep.values["floor"] == D(3) / 4
    assert rep.passed


def test_circle_lemma_positive():
    q = D("0.7")
    with mp.workdps(40):
        x0 = -q ** D("-10.5")
    rep = proofs.check_circle_lemma(q, x0)
    assert rep.values["theta_x0"] > 1
    assert rep.values["floor"] == D(11) / 20
    assert rep.passed


def test_circle_lemma_precondition():
    # theta(0.5, -6) is small: the precondition |theta| >= 1 fails
    with pytest.raises(PreconditionUnmet):
        proofs.check_circle_lemma("0.5", -6)
    with pytest.raises(PreconditionUnmet):
        proofs.check_circle_lemma("0.5", -3)


# --- coefficient margins, tau and the spectral disk ----------------------------

def test_phi_c1_values():
    assert abs(proofs.phi_c1("0.3") - D("0.0008803")) < D("1e-7")
    assert abs(proofs.phi_c1("0.5") - D("0.0277")) < D("1e-4")
    assert abs(proofs.rho0() - D("45.2548")) < D("1e-4")


def test_c1_margin_minimum():
    rep = proofs.check_c1_coefficient_argument("0.4")
    assert rep.passed
    assert abs(rep.values["margin_min"] - D("0.0230")) < D("5e-4")
    assert rep.values["margin_argmin"] == pytest.approx(0.3)


def test_s2_identity_04():
    s2, bound, used = proofs.second_symmetric_sum("0.4")
    assert used == 60
    with mp.workdps(40):
        assert abs(s2 - D("0.064")) < D("1e-6")
        assert abs(s2 - D("0.064")) <= bound + D("1e-25")


def test_tau_values():
    t1, e1 = proofs.tau("0.2", 1)
    t2, e2 = proofs.tau("0.2", 2)
    assert abs(t1 - D("-0.0197796780")) < D("1e-9")
    assert abs(t2 - D("-0.367127390")) < D("1e-9")
    assert proofs.tau("0.1", 1)[0] < t1 and proofs.tau("0.1", 2)[0] < t2


def test_tau_lemma_report():
    assert proofs.check_tau_lemma().passed


def test_spectral_disk():
    rep = proofs.spectral_disk_lemma()
    assert rep.passed and rep.values["max"] < 49.8


# --- theorem sweeps ----------------------------------------------------------------------

def test_T2b_sweep():
    grid = [0.05 + 0.01 * k for k in range(62)]
    rep = verify_theorem("T2b", grid, workers=1)
    assert rep.passed and not rep.violations
    assert rep.worst_margin > 0
    assert max(grid) < T2B_Q_MAX


def test_sweep_small_grid_T1_T3():
    grid = [0.35, 0.5, 0.62, 0.727, 0.75, 0.8, 0.9, 0.95]
    r1 = verify_theorem("T1", grid, workers=1)
    r3 = verify_theorem("T3", grid, workers=1)
    assert r1.passed and r3.passed
    assert r1.max_modulus_right < 5
    assert r3.max_modulus_left < 49.8
    assert not r1.warnings
    # every complex zero lies in E+
    assert not r1.e_plus_outside


def test_sweep_worst_margin_is_min():
    grid = [0.6, 0.8]
    rep = verify_theorem("T3", grid, workers=1)
    margins = [geo.left_half_disk().margin(complex(z.location)) for q in grid
               for z in rep.zero_inventory[q] if z.imag != 0 and z.real < 0]
    assert rep.worst_margin == pytest.approx(min(margins))


def test_sweep_errors():
    with pytest.raises(DomainError):
        verify_theorem("T4", [0.5])
    with pytest.raises(DomainError):
        verify_theorem("T1", [0.96])
    with pytest.raises(DomainError):
        verify_theorem("T2b", [0.7])
    with pytest.raises(DomainError):
        verify_theorem("T1", [0.5], radius_cap=60)


def test_sweep_deterministic_across_workers():
    grid = [0.55, 0.65, 0.75, 0.85]
    from theta_atlas.regions.sweeps import clear_cache
    clear_cache()
    a = verify_theorem("T1", grid, workers=1)
    clear_cache()
    b = verify_theorem("T1", grid, workers=2)
    for q in grid:
        assert [complex(z) for z in a.zero_inventory[q]] == [complex(z) for z in b.zero_inventory[q]]
