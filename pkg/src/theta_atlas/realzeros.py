"""Real zeros xi_1 > xi_2 > ... of theta(q, .), all of them negative.

Zeros come in consecutive pairs: xi_{2j} and xi_{2j-1} both lie in
(-q^{-2j}, -q^{-2j+1}), where theta is positive at both ends. So an
interval of that shape does not bracket a zero by itself. We locate an
interior point where theta < 0 (the local minimum of theta in the interval,
or for q <= 0.2 the fixed points -q^{-2j+0.8}, -q^{-2j+0.2}) and split there.
When the minimum stays positive the pair has left the real axis and the
bracket fails.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import mpmath
from mpmath import mp

from .errors import BracketFailure, ConvergenceFailure, DomainError
from .series import (DEFAULT_PRECISION, EvalResult, Number, PrecisionConfig,
                     eval_theta, eval_theta_partial, parameter)

LEMMA_Q_MAX = mpmath.mpf("0.2")
BISECTION_STEPS = 20
ITERATION_CAP = 200
# leading indices that may be complex; q <= 0.95 has fewer than 30 pairs
MAX_LEADING_GAP = 80
_GOLDEN = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class ZeroBracket:
    """Interval holding xi_k.

    ``lo``/``hi`` are the interval the index lives in. When
    ``sign_separating`` is False both ends have theta > 0 and ``split`` is an
    interior point with theta < 0; ``zero_interval`` gives the half that
    holds xi_k.
    """
    k: int
    lo: mpmath.mpf
    hi: mpmath.mpf
    sign_separating: bool
    split: mpmath.mpf | None = None
    source: str = "interlacing"

    def __post_init__(self):
        if not (self.lo < self.hi < 0):
            raise DomainError(f"bracket must satisfy lo < hi < 0, got ({self.lo}, {self.hi})")

    @property
    def zero_interval(self) -> tuple:
        if self.sign_separating:
            return self.lo, self.hi
        # xi_{2j-1} is the right zero of the pair, xi_{2j} the left
        return (self.split, self.hi) if self.k % 2 else (self.lo, self.split)

    def contains(self, x) -> bool:
        a, b = self.zero_interval
        return a < x < b


@dataclass(frozen=True)
class RealZero:
    k: int
    location: mpmath.mpf
    residual: mpmath.mpf
    derivative: mpmath.mpf
    bracket: ZeroBracket
    iterations: int


@dataclass
class RealZeroList:
    q: mpmath.mpf
    zeros: list = field(default_factory=list)
    first_index: int = 1
    requested: int = 0

    @property
    def gap(self) -> bool:
        """True when the leading indices were skipped because those zeros are complex."""
        return self.first_index > 1

    @property
    def short_count(self) -> bool:
        return len(self.zeros) < self.requested

    @property
    def locations(self) -> list:
        return [z.location for z in self.zeros]

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]


def _point_dps(q, r, prec: PrecisionConfig) -> int:
    """Digits needed to hold a point of modulus r so theta at it is meaningful.

    The largest series term at |x| = r = q^{-m} is about q^{-m^2/2}, and theta
    there is only of size q^m: every digit of cancellation must also be
    carried by the argument itself.
    """
    m = max(0.0, float(mpmath.log(r) / -mpmath.log(q)))
    cancel = 0.5 * m * m * float(-mpmath.log10(q))
    return prec.working_digits + int(math.ceil(cancel)) + 10


def _theta_real(q, x, prec) -> EvalResult:
    return eval_theta(q, mpmath.mpc(x), prec)


def _neg_power(q, e) -> mpmath.mpf:
    """-q^{-e}"""
    return -(q ** (-mpmath.mpf(e)))


def _find_negative_point(q, lo, hi, prec):
    """Point in (lo, hi) with theta certainly < 0, by golden-section descent on log|x|."""
    a = mpmath.log(-hi)
    b = mpmath.log(-lo)
    best = None
    c = b - _GOLDEN * (b - a)
    d = a + _GOLDEN * (b - a)
    fc = _theta_real(q, -mpmath.exp(c), prec)
    fd = _theta_real(q, -mpmath.exp(d), prec)
    for _ in range(ITERATION_CAP):
        for s, f in ((c, fc), (d, fd)):
            if f.real + f.abs_error < 0:
                return -mpmath.exp(s), f
            if best is None or f.real < best[1].real:
                best = (s, f)
        # theta is quadratic at the minimum, so half the digits in s resolve its sign
        if b - a < mpmath.mpf(10) ** (-(prec.target_digits // 2)):
            break
        if fc.real < fd.real:
            b, d, fd = d, c, fc
            c = b - _GOLDEN * (b - a)
            fc = _theta_real(q, -mpmath.exp(c), prec)
        else:
            a, c, fc = c, d, fd
            d = a + _GOLDEN * (b - a)
            fd = _theta_real(q, -mpmath.exp(d), prec)
    return None, best[1]


def bracket_real_zero(q: Number, k: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> ZeroBracket:
    """Bracket for xi_k; raises BracketFailure when xi_k is not real at this q."""
    if k < 1:
        raise DomainError(f"zero index must be >= 1, got {k}")
    qq = parameter(q)
    j = (k + 1) // 2
    with mp.workdps(_point_dps(qq, qq ** (-2 * j), prec)):
        if qq <= LEMMA_Q_MAX:
            if k % 2:
                lo, hi = _neg_power(qq, 2 * j - mpmath.mpf("0.8")), _neg_power(qq, 2 * j - 1)
            else:
                lo, hi = _neg_power(qq, 2 * j), _neg_power(qq, 2 * j - mpmath.mpf("0.2"))
            flo, fhi = _theta_real(qq, lo, prec), _theta_real(qq, hi, prec)
            if (flo.real + flo.abs_error < 0 < fhi.real - fhi.abs_error
                    or fhi.real + fhi.abs_error < 0 < flo.real - flo.abs_error):
                return ZeroBracket(k, lo, hi, True, source="refined")
            raise BracketFailure(f"refined bracket for xi_{k} does not change sign at q={q}", q, k)
        lo, hi = _neg_power(qq, 2 * j), _neg_power(qq, 2 * j - 1)
        split, fmin = _find_negative_point(qq, lo, hi, prec)
        if split is None:
            raise BracketFailure(
                f"theta stays positive on (-q^-{2 * j}, -q^-{2 * j - 1}) at q={q} "
                f"(min ~ {mpmath.nstr(fmin.real, 5)}); xi_{k} is not real", q, k)
        return ZeroBracket(k, lo, hi, False, split=split)


def _newton_scale(q, br: ZeroBracket, prec):
    # theta(q, -q^-m) lies in (0, q^m): the endpoint values set the natural size of theta here
    return max(abs(_theta_real(q, br.lo, prec).real), abs(_theta_real(q, br.hi, prec).real))


def find_real_zero(q: Number, k: int, prec: PrecisionConfig = DEFAULT_PRECISION,
                   bracket: ZeroBracket | None = None) -> RealZero:
    """xi_k: bisection inside the bracket, then Newton polish."""
    qq = parameter(q)
    br = bracket if bracket is not None else bracket_real_zero(qq, k, prec)
    with mp.workdps(_point_dps(qq, -br.lo, prec)):
        a, b = br.zero_interval
        fa = _theta_real(qq, a, prec).real
        neg_left = fa < 0
        it = 0
        for _ in range(BISECTION_STEPS):
            it += 1
            m = (a + b) / 2
            if (_theta_real(qq, m, prec).real < 0) == neg_left:
                a = m
            else:
                b = m
        x = (a + b) / 2
        scale = _newton_scale(qq, br, prec)
        tol = mpmath.mpf(10) ** (-prec.target_digits)
        guard = mpmath.mpf(10) ** (-(prec.target_digits // 2))
        # evaluate 10 digits past target so the stopping test is not swamped by abs_error
        # when theta' is small (pairs about to coalesce)
        fine = PrecisionConfig(prec.target_digits + 10, prec.working_digits + 10)
        width_tol = mpmath.mpf(10) ** (-prec.working_digits) * abs(x)
        while it < ITERATION_CAP:
            it += 1
            f = _theta_real(qq, x, fine)
            d = eval_theta_partial(qq, mpmath.mpc(x), dx=1, prec=fine).real
            if abs(d * x) < guard * scale:
                raise ConvergenceFailure(
                    f"theta' ~ {mpmath.nstr(d, 3)} at xi_{k} (q={q}): near a double zero")
            if abs(f.real) + f.abs_error <= tol * abs(d * x) or b - a <= width_tol:
                return RealZero(k, x, abs(f.real) + f.abs_error, d, br, it)
            # keep the bisection bracket current so a wild Newton step can fall back to it
            if (f.real < 0) == neg_left:
                a = x
            else:
                b = x
            xn = x - f.real / d
            x = xn if a < xn < b else (a + b) / 2
        raise ConvergenceFailure(f"xi_{k} at q={q} did not converge in {ITERATION_CAP} iterations")


def list_real_zeros(q: Number, count: int, prec: PrecisionConfig = DEFAULT_PRECISION) -> RealZeroList:
    """First ``count`` real zeros, rightmost first.

    Leading indices whose zeros have gone complex are skipped (``gap``); the
    list stops early at the first later bracket failure (``short_count``).
    """
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    qq = parameter(q)
    out = RealZeroList(qq, requested=count)
    k = 1
    while len(out.zeros) < count:
        try:
            br = bracket_real_zero(qq, k, prec)
        except BracketFailure:
            if out.zeros or k >= MAX_LEADING_GAP:
                break
            k += 1
            out.first_index = k
            continue
        out.zeros.append(find_real_zero(qq, k, prec, bracket=br))
        k += 1
    return out


__all__ = ["ZeroBracket", "RealZero", "RealZeroList", "bracket_real_zero",
           "find_real_zero", "list_real_zeros"]
