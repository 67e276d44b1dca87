"""Numeric evaluators for the quantities used in the zero-localisation proofs.

S(q) and W(q) are the two logarithmic-derivative sums of |Theta*(q, 5i)|^2:
    d/dq |Theta*(q,5i)|^2 = |Theta*(q,5i)|^2 (S + W),
    S = -sum 2m q^{m-1}/(1-q^m),
    W = sum (a + 2q^{2m}) 2m q^{2m-1} / (1 + a q^{2m} + q^{4m}),  a = 626/25.
Each report carries the checked values plus a ``passed`` flag.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
import numpy as np
from mpmath import mp

from ..complexzeros import find_all_zeros
from ..errors import PreconditionUnmet, QuadratureFailure
from ..realzeros import _point_dps, list_real_zeros
from ..series import DEFAULT_PRECISION, PrecisionConfig, eval_theta, eval_theta_star, parameter
from ..spectrum import SPECTRAL_TABLE

FD_STEP = mpmath.mpf("1e-6")
ARC_SAMPLES = 721
TAU_EXPONENTS = (mpmath.mpf("1.2"), mpmath.mpf("1.8"))
SUM_CAP = 1_000_000


@dataclass
class ProofReport:
    name: str
    passed: bool
    values: dict = field(default_factory=dict)
    details: list = field(default_factory=list)


@dataclass(frozen=True)
class SumResult:
    value: mpmath.mpf
    tail_bound: mpmath.mpf
    terms: int


def a_w() -> mpmath.mpf:
    """626/25 at the current working precision."""
    return mpmath.mpf(626) / 25


def rho0() -> mpmath.mpf:
    """2^{11/2} at the current working precision."""
    return mpmath.mpf(2) ** mpmath.mpf("5.5")


# ---------------------------------------------------------------------------
# S and W
# ---------------------------------------------------------------------------

def _cutoff(prec: PrecisionConfig) -> mpmath.mpf:
    return mpmath.mpf(10) ** (-(prec.target_digits + 5))


def eval_S(q, prec: PrecisionConfig = DEFAULT_PRECISION) -> SumResult:
    """S(q) = -sum_{m>=1} 2m q^{m-1}/(1-q^m) with a geometric tail bound."""
    qq = parameter(q)
    cut = _cutoff(prec)
    with mp.workdps(prec.working_digits):
        s = mpmath.mpf(0)
        qm1 = mpmath.mpf(1)  # q^{m-1}
        m = 0
        while True:
            m += 1
            term = 2 * m * qm1 / (1 - qm1 * qq)
            s += term
            qm1 *= qq
            # terms beyond m: ratio of consecutive 2m q^{m-1} is (m+1)/m q
            ratio = (m + 2) * qq / (m + 1)
            if ratio < 1:
                nxt = 2 * (m + 1) * qm1 / (1 - qm1 * qq)
                tail = nxt / (1 - ratio)
                if nxt < cut and tail < cut * 10:
                    break
            if m > SUM_CAP:
                raise QuadratureFailure(f"S(q) did not converge for q={q}")
        return SumResult(-s, tail, m)


def eval_W(q, prec: PrecisionConfig = DEFAULT_PRECISION) -> SumResult:
    """W(q) with tail bound a * 2(M+1) q^{2M+1} / (1 - (M+2)/(M+1) q^2)."""
    qq = parameter(q)
    cut = _cutoff(prec)
    with mp.workdps(prec.working_digits):
        q2 = qq * qq
        a = a_w()
        s = mpmath.mpf(0)
        q2m = mpmath.mpf(1)
        m = 0
        while True:
            m += 1
            q2m *= q2
            s += (a + 2 * q2m) * 2 * m * q2m / qq / (1 + a * q2m + q2m * q2m)
            ratio = (m + 2) * q2 / (m + 1)
            if ratio < 1:
                # the rational factor is at most a, so terms beyond m are <= a 2k q^{2k-1}
                tail = a * 2 * (m + 1) * q2m * qq / (1 - ratio)
                if tail < cut:
                    break
            if m > SUM_CAP:
                raise QuadratureFailure(f"W(q) did not converge for q={q}")
        return SumResult(s, tail, m)


def s_bound(q) -> mpmath.mpf:
    """pi^2 / (3 q ln^2 q)"""
    q = mpmath.mpf(q)
    return mpmath.pi ** 2 / (3 * q * mpmath.log(q) ** 2)


def w_bound(q) -> mpmath.mpf:
    """4.46 / (q ln^2 q)"""
    q = mpmath.mpf(q)
    return mpmath.mpf("4.46") / (q * mpmath.log(q) ** 2)


def check_bounds(q_grid, prec: PrecisionConfig = DEFAULT_PRECISION) -> ProofReport:
    """|S| <= pi^2/(3q ln^2 q) and W > 4.46/(q ln^2 q) at every grid point.

    Also records W > |S| (what positivity of the derivative needs) and the
    normalised values |S| q ln^2 q and W q ln^2 q.
    """
    rows = []
    for q in q_grid:
        S = eval_S(q, prec)
        W = eval_W(q, prec)
        sb, wb = s_bound(q), w_bound(q)
        norm = mpmath.mpf(q) * mpmath.log(mpmath.mpf(q)) ** 2
        rows.append({"q": float(q), "S": S.value, "S_bound": sb, "W": W.value, "W_bound": wb,
                     "S_norm": -S.value * norm, "W_norm": W.value * norm,
                     "S_ok": bool(S.value < 0 and abs(S.value) + S.tail_bound <= sb),
                     "W_ok": bool(W.value - W.tail_bound > wb),
                     "W_gt_S": bool(W.value - W.tail_bound > abs(S.value) + S.tail_bound)})
    s_ok = all(r["S_ok"] for r in rows)
    w_ok = all(r["W_ok"] for r in rows)
    values = {"points": len(rows), "S_ok": s_ok, "W_ok": w_ok,
              "W_gt_S": all(r["W_gt_S"] for r in rows),
              "W_norm_max": max((r["W_norm"] for r in rows), default=None)}
    return ProofReport("bounds_S_W", s_ok and w_ok, values, rows)


# ---------------------------------------------------------------------------
# constants: zeta_0, kappa-dagger, r_0
# ---------------------------------------------------------------------------

def U625(t):
    """625 U(t)."""
    e = mpmath.exp(t)
    return (625 * e ** 3 + 7825 * t * e ** 2 + 23475 * e ** 2 + 1250 * t * e
            + 196563 * e + 7825 * t + 7825)


def kappa_integrand(t):
    """t ((626/25) e^{-t} + 2 e^{-2t}) / (1 + (626/25) e^{-t} + e^{-2t})"""
    u = mpmath.exp(-t)
    a = a_w()
    return t * (a * u + 2 * u * u) / (1 + a * u + u * u)


def _kappa_tail(T) -> mpmath.mpf:
    # integrand <= t (a + 2) e^{-t}; int_T^inf t e^{-t} dt = (T + 1) e^{-T}
    return (a_w() + 2) * (T + 1) * mpmath.exp(-T)


def proof_constants(prec: PrecisionConfig = DEFAULT_PRECISION, tail_budget=None,
                    t_max: float = 400.0) -> dict:
    """zeta_0 (root of U on (-5, 0)), kappa-dagger and r_0 = g(|zeta_0|)."""
    budget = mpmath.mpf(tail_budget) if tail_budget is not None else _cutoff(prec)
    with mp.workdps(prec.working_digits):
        tol = mpmath.mpf(10) ** (-prec.working_digits + 5)
        lo, hi = mpmath.mpf(-5), mpmath.mpf(0)
        flo = U625(lo)
        if flo * U625(hi) >= 0:
            raise QuadratureFailure("U has no sign change on (-5, 0)")
        while hi - lo > tol:
            mid = (lo + hi) / 2
            fm = U625(mid)
            if (fm < 0) == (flo < 0):
                lo, flo = mid, fm
            else:
                hi = mid
        zeta0 = (lo + hi) / 2

        T = mpmath.mpf(10)
        while _kappa_tail(T) > budget and T < t_max:
            T += 5
        tail = _kappa_tail(T)
        if tail > budget:
            raise QuadratureFailure(f"tail bound {mpmath.nstr(tail, 3)} exceeds budget at T={T}")
        nodes = [0, 1, 2, 4, 8, 16, 32] + [T * k / 8 for k in range(2, 9) if T * k / 8 > 32]
        nodes = sorted(set(mpmath.mpf(v) for v in nodes if v <= T) | {T})
        kappa, qerr = mpmath.quad(kappa_integrand, nodes, error=True)
        if qerr > budget * 100:
            raise QuadratureFailure(f"quadrature error estimate {mpmath.nstr(qerr, 3)} too large")
        r0 = kappa_integrand(abs(zeta0))
    return {"zeta0": zeta0, "kappa_dagger": kappa, "kappa_error": qerr + tail,
            "kappa_T": T, "r0": r0}


# ---------------------------------------------------------------------------
# monotonicity of |Theta*(q, 5i)|
# ---------------------------------------------------------------------------

def theta_star_5i_sq(q, prec: PrecisionConfig = DEFAULT_PRECISION) -> mpmath.mpf:
    with mp.workdps(prec.working_digits):
        return abs(eval_theta_star(q, mpmath.mpc(0, 5), prec).value) ** 2


def dq_theta_star_5i_sq(q, prec: PrecisionConfig = DEFAULT_PRECISION) -> mpmath.mpf:
    """Oracle: d/dq |Theta*(q,5i)|^2 = |Theta*|^2 (S + W)."""
    with mp.workdps(prec.working_digits):
        return theta_star_5i_sq(q, prec) * (eval_S(q, prec).value + eval_W(q, prec).value)


def check_propmain(q_grid, prec: PrecisionConfig = DEFAULT_PRECISION) -> ProofReport:
    """Central difference of |Theta*(q,5i)|^2 (step 1e-6) positive; modulus increasing."""
    rows, ok = [], True
    prev = None
    for q in q_grid:
        qq = mpmath.mpf(q)
        with mp.workdps(prec.working_digits):
            fd = (theta_star_5i_sq(qq + FD_STEP, prec) - theta_star_5i_sq(qq - FD_STEP, prec)) / (2 * FD_STEP)
            mod = mpmath.sqrt(theta_star_5i_sq(qq, prec))
        good = fd > 0 and (prev is None or mod > prev)
        ok &= bool(good)
        prev = mod
        rows.append({"q": float(q), "fd": fd, "modulus": mod, "ok": bool(good)})
    return ProofReport("propmain", ok, {"points": len(rows)}, rows)


# ---------------------------------------------------------------------------
# Theta* on arcs and along the imaginary axis (float64; margins are large)
# ---------------------------------------------------------------------------

def theta_star_abs(q: float, x) -> np.ndarray:
    """|Theta*(q, x)| vectorised in float64, via a sum of logs."""
    x = np.asarray(x, dtype=np.complex128)
    r = float(np.max(np.abs(x)))
    mmax = int(math.ceil(math.log(1e-18 / max(r, 1.0)) / math.log(q))) + 2
    qm = q ** np.arange(1, mmax + 1)
    out = np.log(np.abs(1 + 1 / x))
    out = out + np.sum(np.log1p(-qm))
    for c in np.array_split(qm, max(1, mmax // 256)):
        out = out + np.sum(np.log(np.abs(1 + np.outer(x, c))) + np.log(np.abs(1 + np.outer(1 / x, c))), axis=1)
    return np.exp(out)


def check_arc_minimality(q: float, B: float = 5.0, samples: int = ARC_SAMPLES,
                         r_max: float = 50.0, r_samples: int = 451) -> ProofReport:
    """min |Theta*| on {|x| = B, |arg x| <= pi/2} sits at +-Bi; |Theta*(q, Ri)| increases in R."""
    if not (0.5 <= q < 1) or B < 5:
        raise PreconditionUnmet(f"need q in [0.5, 1) and B >= 5, got q={q}, B={B}")
    phi = np.linspace(-math.pi / 2, math.pi / 2, samples)
    vals = theta_star_abs(q, B * np.exp(1j * phi))
    i = int(np.argmin(vals))
    step = phi[1] - phi[0]
    at_axis = min(abs(phi[i] - math.pi / 2), abs(phi[i] + math.pi / 2)) <= step * (1 + 1e-9)
    R = np.linspace(5.0, r_max, r_samples)
    ray = theta_star_abs(q, 1j * R)
    monotone = bool(np.all(np.diff(ray) >= -1e-12 * ray[1:]))
    return ProofReport("arc_minimality", bool(at_axis and monotone),
                       {"q": q, "B": B, "arg_min": float(phi[i]), "min_modulus": float(vals[i]),
                        "ray_min_R": float(R[int(np.argmin(ray))]), "ray_monotone": monotone})


# ---------------------------------------------------------------------------
# circle lemma
# ---------------------------------------------------------------------------

def check_circle_lemma(q, x0, samples: int = ARC_SAMPLES,
                       prec: PrecisionConfig = DEFAULT_PRECISION) -> ProofReport:
    """If theta(q, x0) <= -1 the circle |z| = |x0| has |theta| > 3/4; if >= 1, > 11/20."""
    from ..kernels import theta_scaled

    qq = parameter(q)
    with mp.workdps(_point_dps(qq, abs(mpmath.mpf(x0)), prec)):
        xx = mpmath.mpf(x0)
        t0 = eval_theta(qq, mpmath.mpc(xx), prec)
    if xx >= -5:
        raise PreconditionUnmet(f"x0 must be < -5, got {mpmath.nstr(xx, 10)}")
    v0 = t0.value.real
    if abs(v0) + t0.abs_error < 1:
        raise PreconditionUnmet(f"|theta(q, x0)| = {mpmath.nstr(abs(v0), 10)} < 1")
    floor = mpmath.mpf(3) / 4 if v0 < 0 else mpmath.mpf(11) / 20
    R = abs(float(xx))
    phi = np.linspace(-math.pi, math.pi, samples)
    f, _, e = theta_scaled(float(qq), R * np.exp(1j * phi))
    mods = np.abs(f) * np.exp2(e.astype(float))
    i = int(np.argmin(mods))
    # re-evaluate the minimiser in multiprecision
    with mp.workdps(_point_dps(qq, R, prec)):
        zmin = R * mpmath.expj(mpmath.mpf(float(phi[i])))
        vmin = abs(eval_theta(qq, zmin, prec).value)
    return ProofReport("circle_lemma", bool(min(vmin, mpmath.mpf(float(mods[i]))) > floor),
                       {"q": float(qq), "x0": xx, "theta_x0": v0, "floor": floor,
                        "circle_min": vmin, "arg_min": float(phi[i])})


# ---------------------------------------------------------------------------
# second-coefficient argument for the first conjugate pair
# ---------------------------------------------------------------------------

def phi_c1(q) -> mpmath.mpf:
    q = mpmath.mpf(q)
    return q ** 6 * (1 + q ** 2) / ((1 - q ** 2) * (1 - q ** 4))


def delta_c1(q) -> mpmath.mpf:
    q = mpmath.mpf(q)
    return mpmath.mpf(2) ** mpmath.mpf("-4.5") * (2 * q ** 3 / (1 - q ** 2))


def margin_c1(q) -> mpmath.mpf:
    """q^3 - phi_c1(q) - 1/rho_0^2 - delta(q)"""
    q = mpmath.mpf(q)
    return q ** 3 - phi_c1(q) - 1 / rho0() ** 2 - delta_c1(q)


def second_symmetric_sum(q, n_zeros: int = 60, prec: PrecisionConfig = DEFAULT_PRECISION):
    """s2 = sum_{k<m} 1/(xi_k xi_m) from the first n_zeros zeros plus a tail bound.

    Returns (s2, bound, zeros_used). The real zeros beyond the list satisfy
    |xi_k| >= q^{1-k}, so the dropped reciprocals sum to at most T = 2q^{n+1}/(1-q^2).
    """
    qq = parameter(q)
    inv = find_all_zeros(qq, 10.0, prec)
    pairs = [z.location for z in inv.zeros if z.location.imag != 0]
    n_real = n_zeros - len(pairs)
    reals = list_real_zeros(qq, n_real, prec)
    with mp.workdps(prec.working_digits):
        recips = [1 / z for z in pairs] + [1 / r.location for r in reals.zeros]
        p1 = mpmath.fsum(recips)
        p2 = mpmath.fsum(w * w for w in recips)
        s2 = ((p1 * p1 - p2) / 2).real
        T = 2 * qq ** (n_zeros + 1) / (1 - qq ** 2)
        bound = abs(p1) * T + T * T
    return s2, bound, len(recips)


def check_c1_coefficient_argument(q, prec: PrecisionConfig = DEFAULT_PRECISION,
                                  n_zeros: int = 60, grid_step: float = 0.001) -> ProofReport:
    qq = parameter(q)
    s2, bound, used = second_symmetric_sum(qq, n_zeros, prec)
    with mp.workdps(prec.working_digits):
        q3 = qq ** 3
        gap = abs(q3 - s2)
    grid = [mpmath.mpf("0.3") + k * mpmath.mpf(grid_step)
            for k in range(int(round(0.2 / grid_step)) + 1)]
    d = [margin_c1(g) for g in grid]
    i = min(range(len(d)), key=lambda j: d[j])
    ok = gap <= bound + mpmath.mpf(10) ** (-prec.target_digits + 5) and min(d) > 0
    return ProofReport("c1_coefficient", bool(ok),
                       {"q": float(qq), "s2": s2, "q3": q3, "s2_gap": gap, "s2_tail_bound": bound,
                        "zeros_used": used, "phi_c1_0.3": phi_c1("0.3"), "phi_c1_0.5": phi_c1("0.5"),
                        "rho0": rho0(), "margin_min": d[i], "margin_argmin": float(grid[i])})


# ---------------------------------------------------------------------------
# tau_1, tau_2 and the spectral-disk inequality
# ---------------------------------------------------------------------------

def tau(q, which: int, prec: PrecisionConfig = DEFAULT_PRECISION):
    """tau_1(q) = theta(q, -q^{-1.2}), tau_2(q) = theta(q, -q^{-1.8})."""
    qq = parameter(q)
    e = TAU_EXPONENTS[which - 1]
    with mp.workdps(prec.working_digits + 10):
        x = -(qq ** (-e))
        res = eval_theta(qq, mpmath.mpc(x), prec)
    return res.value.real, res.abs_error


def check_tau_lemma(prec: PrecisionConfig = DEFAULT_PRECISION, grid_points: int = 20) -> ProofReport:
    grid = [mpmath.mpf("0.2") * k / grid_points for k in range(1, grid_points + 1)]
    t1 = [tau(q, 1, prec)[0] for q in grid]
    t2 = [tau(q, 2, prec)[0] for q in grid]
    inc = all(a < b for a, b in zip(t1, t1[1:])) and all(a < b for a, b in zip(t2, t2[1:]))
    ok = inc and t1[-1] < 0 and t2[-1] < 0
    return ProofReport("tau_lemma", bool(ok),
                       {"tau1_0.2": t1[-1], "tau2_0.2": t2[-1], "increasing": inc},
                       [{"q": float(q), "tau1": a, "tau2": b} for q, a, b in zip(grid, t1, t2)])


def spectral_disk_lemma(bound: float = 49.8, s_range=range(4, 26)) -> ProofReport:
    """q~_s^{-2s-3} < 49.8 for the tabulated spectral values."""
    rows = []
    for s in s_range:
        v = mpmath.mpf(SPECTRAL_TABLE[s - 1]) ** (-2 * s - 3)
        rows.append({"s": s, "value": v, "ok": bool(v < bound)})
    return ProofReport("spectral_disk", all(r["ok"] for r in rows),
                       {"max": max(r["value"] for r in rows)}, rows)


__all__ = ["ProofReport", "SumResult", "a_w", "rho0", "eval_S", "eval_W", "s_bound", "w_bound",
           "check_bounds", "U625", "kappa_integrand", "proof_constants", "theta_star_5i_sq",
           "dq_theta_star_5i_sq", "check_propmain", "theta_star_abs", "check_arc_minimality",
           "check_circle_lemma", "phi_c1", "delta_c1", "margin_c1", "second_symmetric_sum",
           "check_c1_coefficient_argument", "tau", "check_tau_lemma", "spectral_disk_lemma"]
