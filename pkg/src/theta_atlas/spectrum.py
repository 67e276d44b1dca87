"""Spectral values q~_k, double zeros y_k, and purely imaginary zeros.

A spectral value is a q at which theta(q, .) has a double real zero: the
pair xi_{2k-1}, xi_{2k} inside (-q^{-2k}, -q^{-2k+1}) coalesces into y_k and
leaves the real axis as a conjugate pair. We solve theta = theta_x = 0 in
(q, x) by damped Newton.

For zeros on the imaginary axis write v = q^4 and x = iy. Then
Re theta(q, iy) = psi_1(v, y) = theta(v, -v^{-1/4} y^2) and
Im theta(q, iy) = psi_2(v, y) = v^{1/4} y theta(v, -v^{1/4} y^2), whose
positive zeros are chi_k = v^{1/8} sqrt(-xi*_k) and mu_k = v^{-1/8} sqrt(-xi*_k)
(xi*_k the real zeros of theta(v, .)). A common zero appears where
mu_{2k-1} = chi_{2k}, i.e. where -xi*_{2k-1}(v) = v^{1/2} (-xi*_{2k}(v)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import mpmath
from mpmath import mp

from .errors import (BracketFailure, ConvergenceFailure, DomainError, NoCrossing,
                     SeedFailure)
from .realzeros import _point_dps, find_real_zero
from .series import (DEFAULT_PRECISION, PrecisionConfig, eval_theta, eval_theta_partial,
                     parameter)

# q~_1 .. q~_25 to six decimals (published reference values)
SPECTRAL_TABLE = (
    "0.309249", "0.516959", "0.630628", "0.701265", "0.749269",
    "0.783984", "0.810251", "0.830816", "0.847353", "0.860942",
    "0.872305", "0.881949", "0.890237", "0.897435", "0.903747",
    "0.909325", "0.914291", "0.918741", "0.922751", "0.926384",
    "0.929689", "0.932711", "0.935482", "0.938035", "0.940393",
)
MAX_INDEX = 40
NEWTON_CAP = 100
# |q~_k - asymptotic_q(k)| <= ASYMPTOTIC_C / k^2 for k = 30..40; calibrated once, see tests
ASYMPTOTIC_C = 1.7


def asymptotic_q(k: int) -> mpmath.mpf:
    """Leading asymptotics q~_k ~ 1 - pi/(2k) + ln(k)/(8k^2)."""
    k = mpmath.mpf(k)
    return 1 - mpmath.pi / (2 * k) + mpmath.log(k) / (8 * k * k)


@dataclass(frozen=True)
class SpectralPoint:
    k: int
    q_tilde: mpmath.mpf
    y_double: mpmath.mpf
    residuals: tuple
    second_derivative: mpmath.mpf
    iterations: int
    method: str = "newton"


@dataclass(frozen=True)
class ImaginaryAxisSolution:
    k2: int
    v_star: mpmath.mpf
    q_star: mpmath.mpf
    chi: mpmath.mpf
    residuals: tuple
    theta_residual: mpmath.mpf

    @property
    def zero(self) -> mpmath.mpc:
        return mpmath.mpc(0, self.chi)


@dataclass(frozen=True)
class ChiMu:
    v: mpmath.mpf
    xi: tuple
    chi: tuple
    mu: tuple

    def interlaced(self) -> bool:
        """chi_{k-1} < mu_{k-1} < chi_k < mu_k for every consecutive pair."""
        seq = [w for pair in zip(self.chi, self.mu) for w in pair]
        return all(a < b for a, b in zip(seq, seq[1:]))


# ---------------------------------------------------------------------------
# spectral points
# ---------------------------------------------------------------------------

def _spectral_seed(k: int) -> mpmath.mpf:
    return mpmath.mpf(SPECTRAL_TABLE[k - 1]) if k <= len(SPECTRAL_TABLE) else asymptotic_q(k)


def _fold_system(q, x, prec):
    """F = (theta, theta_x) and its Jacobian in (q, x)."""
    f = eval_theta(q, x, prec).real
    fx = eval_theta_partial(q, x, dx=1, prec=prec).real
    fq = eval_theta_partial(q, x, dq=1, prec=prec).real
    fxx = eval_theta_partial(q, x, dx=2, prec=prec).real
    fxq = eval_theta_partial(q, x, dx=1, dq=1, prec=prec).real
    return (f, fx), ((fq, fx), (fxq, fxx))


def _interval_minimum(q, k: int, prec: PrecisionConfig) -> mpmath.mpf:
    """Location of the minimum of theta(q, .) on (-q^{-2k}, -q^{-2k+1}) (golden section in log|x|)."""
    a = (2 * k - 1) * -mpmath.log(q)
    b = 2 * k * -mpmath.log(q)
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    fc = eval_theta(q, -mpmath.exp(c), prec).real
    fd = eval_theta(q, -mpmath.exp(d), prec).real
    while b - a > mpmath.mpf(10) ** -8:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - g * (b - a)
            fc = eval_theta(q, -mpmath.exp(c), prec).real
        else:
            a, c, fc = c, d, fd
            d = a + g * (b - a)
            fd = eval_theta(q, -mpmath.exp(d), prec).real
    return -mpmath.exp((a + b) / 2)


def _newton_fold(k: int, q0, prec: PrecisionConfig):
    q = q0
    x = _interval_minimum(q, k, prec)
    tol = mpmath.mpf(10) ** (-prec.target_digits)
    it = 0
    while it < NEWTON_CAP:
        it += 1
        (f, fx), ((a, b), (c, d)) = _fold_system(q, x, prec)
        scale = abs(d) * x * x
        if abs(f) <= tol * scale and abs(fx * x) <= tol * scale:
            return q, x, (abs(f), abs(fx)), d, it
        det = a * d - b * c
        if det == 0:
            raise ConvergenceFailure(f"singular fold Jacobian at k={k}")
        dq = (d * f - b * fx) / det
        dxs = (a * fx - c * f) / det
        norm0 = math.hypot(float(f), float(fx * x))
        lam = mpmath.mpf(1)
        # damping: halve until the residual norm decreases
        for _ in range(30):
            qn, xn = q - lam * dq, x - lam * dxs
            if 0 < qn < 1 and xn < 0:
                fn = eval_theta(qn, xn, prec).real
                fxn = eval_theta_partial(qn, xn, dx=1, prec=prec).real
                if math.hypot(float(fn), float(fxn * xn)) < norm0 or lam < 1e-6:
                    break
            lam /= 2
        else:
            raise ConvergenceFailure(f"damped Newton stalled at k={k}")
        if not (0 < qn < 1):
            raise SeedFailure(f"Newton iterate left (0, 1) at k={k}: q={qn}")
        q, x = qn, xn
    raise ConvergenceFailure(f"fold Newton for k={k} did not converge in {NEWTON_CAP} steps")


def _min_theta(q, k, prec) -> mpmath.mpf:
    x = _interval_minimum(q, k, prec)
    return eval_theta(q, x, prec).real


def _bisect_fold(k: int, q0, prec: PrecisionConfig):
    """Fallback: q~_k is where min theta over the k-th interval crosses zero."""
    lo, hi = q0 - mpmath.mpf("0.01"), min(q0 + mpmath.mpf("0.01"), mpmath.mpf("0.999"))
    if not (_min_theta(lo, k, prec) < 0 < _min_theta(hi, k, prec)):
        raise ConvergenceFailure(f"no sign change of min theta around the seed for k={k}")
    for _ in range(NEWTON_CAP):
        mid = (lo + hi) / 2
        if _min_theta(mid, k, prec) < 0:
            lo = mid
        else:
            hi = mid
        if hi - lo < mpmath.mpf(10) ** (-prec.target_digits // 2):
            break
    return _newton_fold(k, (lo + hi) / 2, prec)


def find_spectral_point(k: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> SpectralPoint:
    """q~_k and the double zero y_k."""
    if not (1 <= k <= MAX_INDEX):
        raise DomainError(f"spectral index must lie in [1, {MAX_INDEX}], got {k}")
    q0 = _spectral_seed(k)
    if not (0 < q0 < 1):
        raise SeedFailure(f"seed for k={k} outside (0, 1): {q0}")
    with mp.workdps(_point_dps(q0, q0 ** (-2 * k), prec)):
        method = "newton"
        try:
            q, x, res, d2, it = _newton_fold(k, mpmath.mpf(q0), prec)
        except ConvergenceFailure:
            q, x, res, d2, it = _bisect_fold(k, mpmath.mpf(q0), prec)
            method = "bisection"
        if d2 == 0:
            raise ConvergenceFailure(f"theta_xx vanishes at the fold for k={k}")
        return SpectralPoint(k, +q, +x, (+res[0], +res[1]), +d2, it, method)


# ---------------------------------------------------------------------------
# imaginary-axis machinery
# ---------------------------------------------------------------------------

def eval_psi(v, y, prec: PrecisionConfig = DEFAULT_PRECISION) -> tuple:
    """(psi_1, psi_2)(v, y), the real and imaginary parts of theta(v^{1/4}, iy)."""
    vv = parameter(v)
    with mp.workdps(prec.working_digits + 20):
        yy = mpmath.mpf(y)
        v4 = vv ** mpmath.mpf(0.25)
        p1 = eval_theta(vv, -yy * yy / v4, prec).real
        p2 = v4 * yy * eval_theta(vv, -v4 * yy * yy, prec).real
        return p1, p2


def chi_mu_sequences(v, count: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> ChiMu:
    """chi_k, mu_k for k = 1..count from the real zeros of theta(v, .)."""
    vv = parameter(v)
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    xi, chi, mu = [], [], []
    for k in range(1, count + 1):
        z = find_real_zero(vv, k, prec).location
        with mp.workdps(prec.working_digits + 10):
            s = mpmath.sqrt(-z)
            v8 = vv ** (mpmath.mpf(1) / 8)
            xi.append(z)
            chi.append(v8 * s)
            mu.append(s / v8)
    return ChiMu(vv, tuple(xi), tuple(chi), tuple(mu))


def _crossing_gap(v, k2, prec):
    """mu_{2k2-1} - chi_{2k2}, up to the positive factor v^{-1/8}: |xi_{2k2-1}| - v^{1/2} |xi_{2k2}|."""
    a = find_real_zero(v, 2 * k2 - 1, prec).location
    b = find_real_zero(v, 2 * k2, prec).location
    return -a - mpmath.sqrt(v) * -b, b


def _psi_newton(v, y, prec: PrecisionConfig):
    """2D Newton on (theta(v, -v^{-1/4} y^2), theta(v, -v^{1/4} y^2)) in (v, y)."""
    tol = mpmath.mpf(10) ** (-prec.working_digits + 5)
    for _ in range(NEWTON_CAP):
        v4 = v ** mpmath.mpf(0.25)
        a, b = -y * y / v4, -v4 * y * y
        a_v, a_y = y * y / (4 * v4 * v), -2 * y / v4
        b_v, b_y = -v4 * y * y / (4 * v), -2 * v4 * y
        f1 = eval_theta(v, a, prec).real
        f2 = eval_theta(v, b, prec).real
        t1x = eval_theta_partial(v, a, dx=1, prec=prec).real
        t2x = eval_theta_partial(v, b, dx=1, prec=prec).real
        j11 = eval_theta_partial(v, a, dq=1, prec=prec).real + t1x * a_v
        j12 = t1x * a_y
        j21 = eval_theta_partial(v, b, dq=1, prec=prec).real + t2x * b_v
        j22 = t2x * b_y
        det = j11 * j22 - j12 * j21
        dv = (j22 * f1 - j12 * f2) / det
        dy = (j11 * f2 - j21 * f1) / det
        v, y = v - dv, y - dy
        if abs(dv) <= tol and abs(dy) <= tol * y:
            return v, y
    raise ConvergenceFailure("psi Newton polish did not converge")


def find_imaginary_axis_solution(k2: int, v_lo, v_hi,
                                 prec: PrecisionConfig = DEFAULT_PRECISION) -> ImaginaryAxisSolution:
    """v* in (v_lo, v_hi) with mu_{2k2-1}(v*) = chi_{2k2}(v*), and the zero i*chi of theta(v*^{1/4}, .)."""
    if k2 < 1:
        raise DomainError(f"k2 must be >= 1, got {k2}")
    lo, hi = parameter(v_lo), parameter(v_hi)
    if not lo < hi:
        raise DomainError("need v_lo < v_hi")
    with mp.workdps(prec.working_digits + 10):
        try:
            g_lo, _ = _crossing_gap(lo, k2, prec)
            g_hi, _ = _crossing_gap(hi, k2, prec)
        except BracketFailure as exc:
            raise NoCrossing(f"zeros xi_{2 * k2 - 1}, xi_{2 * k2} not real at a bracket end: {exc}")
        if not (g_lo < 0 < g_hi):
            raise NoCrossing(
                f"mu_{2 * k2 - 1} - chi_{2 * k2} does not change sign from - to + on [{v_lo}, {v_hi}]")
        vtol = mpmath.mpf(10) ** (-(prec.target_digits // 2))
        while hi - lo > vtol:
            mid = (lo + hi) / 2
            g, _ = _crossing_gap(mid, k2, prec)
            if g < 0:
                lo = mid
            else:
                hi = mid
        v = (lo + hi) / 2
        _, xi = _crossing_gap(v, k2, prec)
        y = v ** (mpmath.mpf(1) / 8) * mpmath.sqrt(-xi)
        v, y = _psi_newton(v, y, prec)
        p1, p2 = eval_psi(v, y, prec)
        q = v ** mpmath.mpf(0.25)
        th = eval_theta(q, mpmath.mpc(0, y), prec)
        return ImaginaryAxisSolution(k2, +v, +q, +y, (abs(p1), abs(p2)), abs(th.value) + th.abs_error)


__all__ = ["SPECTRAL_TABLE", "SpectralPoint", "ImaginaryAxisSolution", "ChiMu",
           "asymptotic_q", "find_spectral_point", "eval_psi", "chi_mu_sequences",
           "find_imaginary_axis_solution"]
