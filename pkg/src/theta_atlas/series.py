"""Evaluation of the partial theta function and its companions.

All evaluators run in mpmath at a working precision that is raised above
``PrecisionConfig.working_digits`` by the number of digits the series is
expected to cancel, so that the reported ``abs_error`` (truncation tail plus
rounding allowance) stays below ``10**-target_digits * max(1, |value|)``.

Functions here:

* ``eval_theta``      theta(q, x)  = sum_{j>=0} q^{j(j+1)/2} x^j
* ``eval_theta_star`` Theta*(q, x) = sum over all integers j, via the triple product
* ``eval_G``          G(q, x)      = sum_{j>=1} q^{j(j-1)/2} x^{-j}, so theta = Theta* - G
* ``eval_theta_partial`` mixed partial derivatives in (q, x), used by the solvers
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import mpmath
from mpmath import mp

from .errors import DomainError

Number = Union[int, float, complex, str, "mpmath.mpf", "mpmath.mpc"]

# Hard cap on series length; q this close to 1 is outside every sweep we run.
MAX_TERMS = 200_000


@dataclass(frozen=True)
class PrecisionConfig:
    target_digits: int = 30
    working_digits: int = 50

    def __post_init__(self):
        if self.target_digits < 10:
            raise DomainError(f"target_digits must be >= 10, got {self.target_digits}")
        if self.working_digits < self.target_digits + 10:
            raise DomainError(
                f"working_digits must be >= target_digits + 10 "
                f"({self.target_digits + 10}), got {self.working_digits}"
            )

    @classmethod
    def for_digits(cls, digits: int) -> "PrecisionConfig":
        return cls(target_digits=digits, working_digits=digits + 20)

    @property
    def tolerance(self) -> mpmath.mpf:
        return mpmath.mpf(10) ** (-self.target_digits)


DEFAULT_PRECISION = PrecisionConfig()


@dataclass(frozen=True)
class EvalResult:
    """A value with an absolute error bound.

    ``terms_used`` is the number of series terms (or product factors) summed.
    """

    value: mpmath.mpc
    abs_error: mpmath.mpf
    terms_used: int

    @property
    def real(self) -> mpmath.mpf:
        return self.value.real

    @property
    def imag(self) -> mpmath.mpf:
        return self.value.imag

    def __complex__(self) -> complex:
        return complex(self.value)

    def bounds_contain(self, other, slack=0) -> bool:
        """True if ``other`` lies within abs_error (+ slack) of the value."""
        return abs(self.value - other) <= self.abs_error + slack


# ---------------------------------------------------------------------------
# coercion
# ---------------------------------------------------------------------------

_PARSE_DPS = 120


def to_mpf(v: Number) -> mpmath.mpf:
    """Exact conversion for binary inputs; decimal strings parsed at 120 digits."""
    if isinstance(v, str):
        with mp.workdps(_PARSE_DPS):
            return mpmath.mpf(v)
    if isinstance(v, mpmath.mpc):
        if v.imag != 0:
            raise DomainError(f"expected a real number, got {v}")
        return v.real
    if isinstance(v, mpmath.mpf):
        return v
    with mp.workprec(max(mp.prec, 64, int(v).bit_length() + 64 if isinstance(v, int) else 0)):
        return mpmath.mpf(v)


def to_mpc(v: Number) -> mpmath.mpc:
    if isinstance(v, str):
        s = v.strip().replace(" ", "")
        with mp.workdps(_PARSE_DPS):
            if "," in s:
                re_s, im_s = s.split(",", 1)
                return mpmath.mpc(mpmath.mpf(re_s), mpmath.mpf(im_s))
            return mpmath.mpc(s.replace("i", "j"))
    if isinstance(v, mpmath.mpc):
        return v
    if isinstance(v, mpmath.mpf):
        # keep every bit of a high-precision real argument
        return mp.make_mpc((v._mpf_, mpmath.libmp.fzero))
    with mp.workprec(max(mp.prec, 64)):
        return mpmath.mpc(v)


def parameter(q: Number) -> mpmath.mpf:
    """Coerce and validate q in (0, 1)."""
    qq = to_mpf(q)
    if not mpmath.isfinite(qq) or not (0 < qq < 1):
        raise DomainError(f"q must lie in (0, 1), got {q!r}")
    return qq


def point(x: Number) -> mpmath.mpc:
    """Coerce and validate a finite complex argument."""
    xx = to_mpc(x)
    if not (mpmath.isfinite(xx.real) and mpmath.isfinite(xx.imag)):
        raise DomainError(f"argument must be finite, got {x!r}")
    return xx


def _log_abs(v) -> float:
    a = abs(v)
    if a == 0:
        return -math.inf
    return float(mpmath.log(a))


# ---------------------------------------------------------------------------
# power series sum_j w(j) q^{j(j+1)/2 - dq} x^{j - dx}
# ---------------------------------------------------------------------------

def _falling(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out *= n - i
    return out


def _weight(j: int, dx: int, dq: int) -> int:
    return _falling(j, dx) * _falling(j * (j + 1) // 2, dq)


@dataclass(frozen=True)
class _Plan:
    n_last: int          # last index summed
    dps: int             # working decimal digits for the summation
    log_majorant: float  # natural log of sum |t_j|, float estimate


def _series_plan(log_q: float, log_r: float, dx: int, dq: int, prec: PrecisionConfig,
                 tail_budget: float) -> _Plan:
    """Choose the truncation index and working precision.

    The stopping index N is the first j >= dx past which the term ratio
    |t_{j+1}/t_j| stays <= 1/2 (so the tail is below 2|t_{N+1}|) and that tail
    is below ``tail_budget`` (natural log scale comparisons).
    """
    if log_r == -math.inf:
        return _Plan(dx, prec.working_digits + 2, 0.0)

    def log_term(j: int) -> float:
        w = _weight(j, dx, dq)
        if w == 0:
            return -math.inf
        return math.log(w) + (j * (j + 1) / 2 - dq) * log_q + (j - dx) * log_r

    log_budget = math.log(tail_budget)
    # Ratio t_{j+1}/t_j = q^{j+1} r * w(j+1)/w(j), decreasing in j once w(j) > 0.
    j = max(dx, 0)
    log_max = -math.inf
    acc = []
    while True:
        lt = log_term(j)
        acc.append(lt)
        if lt > log_max:
            log_max = lt
        wj = _weight(j, dx, dq)
        wj1 = _weight(j + 1, dx, dq)
        log_ratio = (j + 1) * log_q + log_r + (math.log(wj1 / wj) if wj > 0 else math.inf)
        if log_ratio <= math.log(0.5) - 1e-9:
            tail = math.log(2.0) + log_term(j + 1)
            if tail <= log_budget:
                break
        j += 1
        if j - dx > MAX_TERMS:
            raise DomainError("series too long; q is too close to 1 for this argument")
    m = max(acc)
    log_sum = m + math.log(sum(math.exp(a - m) for a in acc if a > -math.inf))
    cancel = max(0.0, log_sum / math.log(10))
    extra = int(math.ceil(cancel + math.log10(4 * (j + 2)))) + 3
    return _Plan(j, prec.working_digits + extra, log_sum)


def _sum_series(q: mpmath.mpf, x: mpmath.mpc, dx: int, dq: int, plan: _Plan):
    """Sum terms dx..plan.n_last at plan.dps. Returns (value, sum |t_j|, |t_{N+1}| majorant)."""
    with mp.workdps(plan.dps):
        ax = abs(x)
        s = mpmath.mpc(0)
        sabs = mpmath.mpf(0)
        j = dx
        while _weight(j, dx, dq) == 0:
            j += 1
        # coefficient recursion: q^{T_{j+1} - dq} = q^{T_j - dq} * q^{j+1}
        qpow = q ** j
        coeff = q ** (j * (j + 1) // 2 - dq)
        xpow = x ** (j - dx)
        while j <= plan.n_last:
            t = _weight(j, dx, dq) * coeff * xpow
            s += t
            sabs += abs(t)
            qpow *= q
            coeff *= qpow
            xpow *= x
            j += 1
        nxt = _weight(j, dx, dq) * coeff * ax ** (j - dx)
        return s, sabs, nxt


def _series_result(q, x, prec: PrecisionConfig, dx: int = 0, dq: int = 0) -> EvalResult:
    log_q = float(mpmath.log(q))
    log_r = _log_abs(x)
    # Absolute budget half of 10^-target (scale 1); relative scaling is implied
    # because max(1, |value|) >= 1.
    budget = 0.25 * 10.0 ** (-prec.target_digits)
    plan = _series_plan(log_q, log_r, dx, dq, prec, budget)
    if log_r == -math.inf:
        val = mpmath.mpc(_weight(dx, dx, dq)) * q ** (dx * (dx + 1) // 2 - dq)
        return EvalResult(mpmath.mpc(val), mpmath.mpf(0), 1)
    s, sabs, nxt = _sum_series(q, x, dx, dq, plan)
    n_terms = plan.n_last - dx + 1
    with mp.workdps(plan.dps):
        u = mpmath.mpf(10) ** (-plan.dps)
        # term j carries <= 3j+1 roundings from the recursions, the sum adds <= N more
        rounding = (4 * (plan.n_last + 2)) * u * sabs
        tail = 2 * nxt
        err = rounding + tail
    return EvalResult(s, err, n_terms)


def eval_theta(q: Number, x: Number, prec: PrecisionConfig = DEFAULT_PRECISION) -> EvalResult:
    """theta(q, x) with a rigorous absolute error bound."""
    qq = parameter(q)
    xx = point(x)
    return _series_result(qq, xx, prec)


def eval_theta_partial(q: Number, x: Number, dx: int = 0, dq: int = 0,
                       prec: PrecisionConfig = DEFAULT_PRECISION) -> EvalResult:
    """Partial derivative d^dq/dq^dq d^dx/dx^dx of theta, summed term-wise."""
    if dx < 0 or dq < 0:
        raise DomainError("derivative orders must be non-negative")
    return _series_result(parameter(q), point(x), prec, dx=dx, dq=dq)


def eval_G(q: Number, x: Number, prec: PrecisionConfig = DEFAULT_PRECISION) -> EvalResult:
    """G(q, x) = sum_{j>=1} q^{j(j-1)/2} x^{-j} = theta(q, 1/x) / x."""
    qq = parameter(q)
    xx = point(x)
    if xx == 0:
        raise DomainError("G(q, x) is undefined at x = 0")
    log_r = _log_abs(xx)
    # dividing by x multiplies the error by 1/|x|; buy those digits back up front
    boost = max(0, int(math.ceil(-log_r / math.log(10))))
    inner = PrecisionConfig(prec.target_digits + boost, prec.working_digits + boost)
    plan = _series_plan(float(mpmath.log(qq)), -log_r, 0, 0, inner,
                        0.25 * 10.0 ** (-inner.target_digits))
    with mp.workdps(plan.dps + 10):
        w = 1 / xx
    th = _series_result(qq, w, inner)
    with mp.workdps(plan.dps):
        val = th.value * w
        err = th.abs_error * abs(w) + abs(val) * mpmath.mpf(10) ** (-plan.dps + 2)
    return EvalResult(val, err, th.terms_used)


def eval_theta_star(q: Number, x: Number, prec: PrecisionConfig = DEFAULT_PRECISION) -> EvalResult:
    """Theta*(q, x) from the Jacobi triple product.

    Theta*(q,x) = (1 + 1/x) prod_{m>=1} (1 - q^m)(1 + x q^m)(1 + q^m / x).
    """
    qq = parameter(q)
    xx = point(x)
    if xx == 0:
        raise DomainError("Theta*(q, x) is undefined at x = 0")
    log_q = float(mpmath.log(qq))
    log_r = _log_abs(xx)
    target = 10.0 ** (-prec.target_digits)
    big = abs(log_r)

    # Truncation: sum_{m>M} |w_m| <= (1 + r + 1/r) q^{M+1}/(1-q) =: s, and the
    # dropped factors change the product by at most (e^s - 1)|P_M|.
    log_c = big + math.log(3.0) - math.log1p(-math.exp(log_q))
    m_cut = 1
    while True:
        log_s = log_c + (m_cut + 1) * log_q
        if log_s < math.log(0.25 * target) - 1:
            break
        m_cut += 1
        if m_cut > MAX_TERMS:
            raise DomainError("product too long; q is too close to 1")

    # Majorant of the rounding error: product of |1|+|w| over all factors.
    log_major = math.log1p(math.exp(-log_r)) if -log_r < 700 else -log_r
    for m in range(1, m_cut + 1):
        qm = m * log_q
        log_major += math.log1p(math.exp(qm + log_r)) if qm + log_r < 700 else qm + log_r
        log_major += math.log1p(math.exp(qm - log_r)) if qm - log_r < 700 else qm - log_r
    extra = int(math.ceil(max(0.0, log_major / math.log(10)) + math.log10(6 * m_cut + 10))) + 3
    dps = prec.working_digits + extra
    with mp.workdps(dps):
        x = xx
        qv = qq
        inv = 1 / x
        P = 1 + inv
        qm = mpmath.mpf(1)
        for _ in range(m_cut):
            qm *= qv
            P *= (1 - qm) * (1 + x * qm) * (1 + qm * inv)
        u = mpmath.mpf(10) ** (-dps)
        major = mpmath.exp(mpmath.mpf(log_major))
        rounding = (6 * m_cut + 10) * u * major
        s = mpmath.exp(mpmath.mpf(log_s))
        tail = (abs(P) + rounding) * mpmath.expm1(s)
        err = rounding + tail
    return EvalResult(P, err, m_cut)


def eval_bilateral_series(q: Number, x: Number, prec: PrecisionConfig = DEFAULT_PRECISION) -> EvalResult:
    """Theta* by direct bilateral summation: theta(q, x) + G(q, x)."""
    th = eval_theta(q, x, prec)
    g = eval_G(q, x, prec)
    dps = max(prec.working_digits + 20, mp.dps)
    with mp.workdps(dps):
        return EvalResult(th.value + g.value, th.abs_error + g.abs_error,
                          th.terms_used + g.terms_used)


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityCheck:
    """Residuals of the three exact identities and the error budgets they must meet."""

    functional: mpmath.mpf      # |theta(q,x) - 1 - q x theta(q, q x)|
    even_odd: mpmath.mpf        # |theta(q,x) - theta(q^4, x^2/q) - q x theta(q^4, q x^2)|
    decomposition: mpmath.mpf   # |theta(q,x) - Theta*(q,x) + G(q,x)|
    functional_bound: mpmath.mpf
    even_odd_bound: mpmath.mpf
    decomposition_bound: mpmath.mpf

    @property
    def residuals(self) -> tuple:
        return (self.functional, self.even_odd, self.decomposition)

    @property
    def bounds(self) -> tuple:
        return (self.functional_bound, self.even_odd_bound, self.decomposition_bound)

    @property
    def passed(self) -> bool:
        return all(r <= b for r, b in zip(self.residuals, self.bounds))


def check_identities(q: Number, x: Number, prec: PrecisionConfig = DEFAULT_PRECISION) -> IdentityCheck:
    qq = parameter(q)
    xx = point(x)
    if xx == 0:
        raise DomainError("identity check needs x != 0 (Theta* and G are undefined at 0)")
    # Derived arguments are formed with enough digits that their rounding is
    # invisible next to the evaluation bounds.
    hi = prec.working_digits + 10 + int(max(0.0, _log_abs(xx)) ** 2 / max(1e-3, -float(mpmath.log(qq))) / 2.3) + 20
    with mp.workdps(hi):
        qx = qq * xx
        q4 = qq ** 4
        a_even = xx * xx / qq
        a_odd = qq * xx * xx
    th = eval_theta(qq, xx, prec)
    th_qx = eval_theta(qq, qx, prec)
    th_even = eval_theta(q4, a_even, prec)
    th_odd = eval_theta(q4, a_odd, prec)
    ts = eval_theta_star(qq, xx, prec)
    g = eval_G(qq, xx, prec)
    with mp.workdps(hi):
        slack = mpmath.mpf(10) ** (-prec.working_digits)
        r1 = abs(th.value - 1 - qx * th_qx.value)
        b1 = th.abs_error + abs(qx) * th_qx.abs_error + slack * (1 + abs(th.value))
        r2 = abs(th.value - th_even.value - qx * th_odd.value)
        b2 = th.abs_error + th_even.abs_error + abs(qx) * th_odd.abs_error + slack * (1 + abs(th.value))
        r3 = abs(th.value - ts.value + g.value)
        b3 = th.abs_error + ts.abs_error + g.abs_error + slack * (1 + abs(ts.value))
    return IdentityCheck(r1, r2, r3, b1, b2, b3)


# ---------------------------------------------------------------------------
# Katsnelson family
# ---------------------------------------------------------------------------

def eval_katsnelson_family(eps: Number, z: Number, prec: PrecisionConfig = DEFAULT_PRECISION) -> EvalResult:
    """f_eps(z) = sum_n exp(-eps n^2) z^n = theta(exp(-2 eps), z exp(eps))."""
    e = to_mpf(eps)
    if not (mpmath.isfinite(e) and e > 0):
        raise DomainError(f"eps must be > 0, got {eps!r}")
    zz = point(z)
    if zz == 0:
        return EvalResult(mpmath.mpc(1), mpmath.mpf(0), 1)
    # q and x inherit rounding; carry enough digits that the induced change in
    # the sum stays under the evaluation budget.
    log_q = -2 * float(e)
    log_r = _log_abs(zz) + float(e)
    plan = _series_plan(log_q, log_r, 0, 0, prec, 0.25 * 10.0 ** (-prec.target_digits))
    digits = plan.dps + int(2 * math.log10(plan.n_last + 2)) + 10
    with mp.workdps(digits):
        q = mpmath.exp(-2 * e)
        x = zz * mpmath.exp(e)
    return _series_result(q, x, prec)


__all__ = [
    "PrecisionConfig",
    "DEFAULT_PRECISION",
    "EvalResult",
    "IdentityCheck",
    "eval_theta",
    "eval_theta_partial",
    "eval_theta_star",
    "eval_G",
    "eval_bilateral_series",
    "check_identities",
    "eval_katsnelson_family",
    "parameter",
    "point",
    "to_mpf",
    "to_mpc",
]
