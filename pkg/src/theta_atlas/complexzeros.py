"""All zeros of theta(q, .) in a disk, paired and certified.

Pipeline for one q:

1. count the zeros in |x| < R (argument principle on the circle, float64),
2. locate them with a simultaneous Aberth iteration run in float64 on the
   cancellation-free factored form of theta (compiled kernel), using one
   estimate per zero inside a 1.6x larger circle so the outermost zeros of
   interest are not pulled on by missing neighbours,
3. polish each estimate by Newton in mpmath against the full series,
4. certify: with Taylor coefficients c_n of theta at the polished point z0 and
   rho = 10^(-target/3), |theta'| >= deriv_lower on |x - z0| <= rho, and
   |c0| < deriv_lower * rho gives exactly one zero in that disk (Rouche
   against the linear part).

The truncation object records how many series terms are needed on the disk;
it is used for bookkeeping and the tail bounds, while evaluation goes through
``series`` (which truncates adaptively per point).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import mpmath
import numpy as np
from mpmath import mp

from . import kernels
from .errors import (AmbiguousNearSpectral, CertificationFailure, DegreeOverflow,
                     DomainError)
from .series import (DEFAULT_PRECISION, Number, PrecisionConfig, _series_plan,
                     eval_theta, eval_theta_partial, parameter)

MAX_DEGREE = 5000
MAX_RADIUS = 55.0
DEFAULT_RADIUS = 50.0
Q_CEILING = 0.95
ESTIMATE_FACTOR = 1.6
POLISH_CAP = 60
REAL_SNAP = 1e-6
STATUS_CERTIFIED = "certified"
STATUS_UNCERTIFIED = "near_double_uncertified"


def exact_conj(z: mpmath.mpc) -> mpmath.mpc:
    """Complex conjugate without rounding to the ambient precision."""
    re_, im_ = z._mpc_
    return mp.make_mpc((re_, mpmath.libmp.mpf_neg(im_)))


def term_modulus(q: Number, j: int, r: Number) -> mpmath.mpf:
    """|t_j| = q^{j(j+1)/2} r^j, the modulus of the j-th series term on |x| = r."""
    qq = parameter(q)
    return qq ** (mpmath.mpf(j) * (j + 1) / 2) * mpmath.mpf(r) ** j


@dataclass(frozen=True)
class TruncationPolynomial:
    q: mpmath.mpf
    degree: int
    tail_bound_on_disk: mpmath.mpf
    radius: mpmath.mpf
    threshold: mpmath.mpf

    def term_modulus(self, j: int, r: Number | None = None) -> mpmath.mpf:
        return term_modulus(self.q, j, self.radius if r is None else r)

    def term_ratio(self, j: int, r: Number | None = None) -> mpmath.mpf:
        """|t_{j+1} / t_j| = q^{j+1} r."""
        return self.q ** (j + 1) * mpmath.mpf(self.radius if r is None else r)

    def tail_bound(self, n: int | None = None, r: Number | None = None) -> mpmath.mpf:
        """Bound on sum_{j>n} |t_j| on |x| <= r.

        Geometric (2 |t_{n+1}|) once the ratio is <= 1/2; before that the
        terms are summed directly until it is.
        """
        n = self.degree if n is None else n
        total = mpmath.mpf(0)
        j = n + 1
        while self.term_ratio(j, r) > 0.5:
            total += self.term_modulus(j, r)
            j += 1
            if j > MAX_DEGREE + n:
                return mpmath.inf
        return total + 2 * self.term_modulus(j, r)

    def coefficients(self) -> list:
        return [self.q ** (mpmath.mpf(j) * (j + 1) / 2) for j in range(self.degree + 1)]

    def evaluate(self, x: Number) -> mpmath.mpc:
        xx = mpmath.mpc(x)
        return mpmath.polyval(self.coefficients()[::-1], xx)


def build_truncation(q: Number, radius: Number = DEFAULT_RADIUS,
                     prec: PrecisionConfig = DEFAULT_PRECISION) -> TruncationPolynomial:
    """Smallest degree N with q^{N+1} R <= 1/2 and 2|t_{N+1}| below 10^-(target+5) on |x| <= R."""
    qq = parameter(q)
    if radius < 1:
        raise DomainError(f"radius must be >= 1, got {radius}")
    with mp.workdps(prec.working_digits):
        rr = mpmath.mpf(radius)
        threshold = mpmath.mpf(10) ** (-(prec.target_digits + 5))
        n = 0
        while not (qq ** (n + 1) * rr <= 0.5 and 2 * term_modulus(qq, n + 1, rr) <= threshold):
            n += 1
            if n > MAX_DEGREE:
                raise DegreeOverflow(
                    f"truncation degree exceeds {MAX_DEGREE} for q={q}, radius={radius}")
        tail = 2 * term_modulus(qq, n + 1, rr)
    return TruncationPolynomial(qq, n, tail, rr, threshold)


@dataclass(frozen=True)
class CertifiedZero:
    location: mpmath.mpc
    residual: mpmath.mpf
    deriv_lower: mpmath.mpf
    cert_radius: mpmath.mpf
    status: str
    newton_step: mpmath.mpf = mpmath.mpf(0)

    @property
    def certified(self) -> bool:
        return self.status == STATUS_CERTIFIED

    @property
    def real(self) -> mpmath.mpf:
        return self.location.real

    @property
    def imag(self) -> mpmath.mpf:
        return self.location.imag

    @property
    def modulus(self) -> mpmath.mpf:
        return abs(self.location)

    @property
    def is_real(self) -> bool:
        return self.location.imag == 0

    def conjugate(self) -> "CertifiedZero":
        return replace(self, location=exact_conj(self.location))

    def __complex__(self):
        return complex(self.location)


@dataclass
class ZeroInventory:
    q: mpmath.mpf
    radius: float
    zeros: list = field(default_factory=list)
    winding_count: int = 0
    sweeps: int = 0

    @property
    def complete(self) -> bool:
        return len(self.zeros) == self.winding_count

    @property
    def all_certified(self) -> bool:
        return all(z.certified for z in self.zeros)

    @property
    def uncertified(self) -> list:
        return [z for z in self.zeros if not z.certified]

    @property
    def real_zeros(self) -> list:
        return [z for z in self.zeros if z.is_real]

    @property
    def upper_zeros(self) -> list:
        """One representative (Im > 0) of every conjugate pair."""
        return [z for z in self.zeros if z.imag > 0]

    @property
    def pair_count(self) -> int:
        return len(self.upper_zeros)

    def as_complex(self) -> np.ndarray:
        return np.array([complex(z.location) for z in self.zeros], dtype=np.complex128)

    def __len__(self):
        return len(self.zeros)

    def __iter__(self):
        return iter(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]


# ---------------------------------------------------------------------------
# precision helpers
# ---------------------------------------------------------------------------

def _log10_majorant(q: float, r: float) -> float:
    """log10 of sum_j q^{j(j+1)/2} r^j (the series at |x| = r with all signs positive)."""
    lq = math.log(q)
    lr = math.log(max(r, 1e-300))
    jstar = max(0.0, lr / -lq - 0.5)
    terms = []
    for j in range(max(0, int(jstar) - 60), int(jstar) + 60):
        terms.append(j * (j + 1) / 2 * lq + j * lr)
    m = max(terms)
    return (m + math.log(sum(math.exp(t - m) for t in terms))) / math.log(10)


def _point_dps(q: float, r: float, prec: PrecisionConfig) -> int:
    # the argument must carry every digit the series cancels
    return prec.working_digits + max(0, int(math.ceil(_log10_majorant(q, r)))) + 10


# ---------------------------------------------------------------------------
# polishing and certification
# ---------------------------------------------------------------------------

def _newton_polish(q, z0, prec: PrecisionConfig, real: bool):
    """Newton in mpmath; returns (z, converged)."""
    qf = float(q)
    dps = _point_dps(qf, abs(complex(z0)) + 1, prec)
    with mp.workdps(dps):
        z = mpmath.mpf(complex(z0).real) if real else mpmath.mpc(complex(z0))
        tol = mpmath.mpf(10) ** (-(prec.working_digits - 2))
        for _ in range(POLISH_CAP):
            f = eval_theta(q, z, prec).value
            d = eval_theta_partial(q, z, dx=1, prec=prec).value
            if d == 0:
                return z, False
            step = f / d
            if real:
                step = step.real
            z = z - step
            if abs(step) <= tol * max(1, abs(z)):
                return z, True
        return z, False


def _taylor_coefficients(q, z0, n0: int, prec: PrecisionConfig):
    """c_n = theta^(n)(z0)/n!, n = 1..n0, each with an absolute error bound."""
    qf = float(q)
    r = float(abs(z0))
    log_r = math.log(r) if r > 0 else -math.inf
    budget = 10.0 ** (-prec.working_digits)
    plan = _series_plan(math.log(qf), log_r, n0, 0, prec, budget)
    dps = plan.dps + int(math.ceil(n0 * math.log10(plan.n_last + 2))) + 5
    with mp.workdps(dps):
        z = mpmath.mpc(z0)
        acc = [mpmath.mpc(0)] * (n0 + 1)
        mags = [mpmath.mpf(0)] * (n0 + 1)
        coeff = mpmath.mpf(1)
        qpow = mpmath.mpf(1)
        zpow = mpmath.mpc(1)
        az = abs(z)
        for j in range(plan.n_last + 1):
            t = coeff * zpow
            at = coeff * az ** j
            for n in range(1, min(j, n0) + 1):
                b = math.comb(j, n)
                acc[n] += b * t
                mags[n] += b * at
            qpow *= q
            coeff *= qpow
            zpow *= z
        j = plan.n_last + 1
        u = mpmath.mpf(10) ** (-dps)
        out = []
        for n in range(1, n0 + 1):
            zn = z ** n
            # rounding on each accumulated term plus the geometric tail beyond N
            tail = 2 * math.comb(j, n) * coeff * az ** j
            err = (4 * (j + n0 + 4) * u * mags[n] + tail) / abs(zn)
            out.append((acc[n] / zn, err))
        return out


def certify_zero(q: Number, z0, prec: PrecisionConfig = DEFAULT_PRECISION) -> CertifiedZero:
    """Certify a single zero near z0 on the disk |x - z0| <= 10^(-target/3)."""
    qq = parameter(q)
    qf = float(qq)
    rho = mpmath.mpf(10) ** (-mpmath.mpf(prec.target_digits) / 3)
    r = float(abs(complex(z0)))
    # Cauchy majorant on |x - z0| = 1: |theta| <= sum |t_j| at |x| = |z0| + 1
    log10_m = _log10_majorant(qf, r + 1.0)
    target3 = prec.target_digits / 3.0
    n0 = min(60, max(3, 2 + int(math.ceil((log10_m + 15) / target3))))
    with mp.workdps(_point_dps(qf, r + 1, prec)):
        z = mpmath.mpc(z0)
        c0 = eval_theta(qq, z, prec)
        residual = abs(c0.value) + c0.abs_error
        coeffs = _taylor_coefficients(qq, z, n0, prec)
        c1, e1 = coeffs[0]
        lower = abs(c1) - e1
        for n, (cn, en) in enumerate(coeffs[1:], start=2):
            lower -= n * (abs(cn) + en) * rho ** (n - 1)
        big_m = mpmath.mpf(10) ** log10_m * 2
        x = rho
        lower -= big_m / rho * (n0 + 1) * x ** (n0 + 1) / (1 - x) ** 2
        step = abs(c0.value) / abs(c1) if c1 != 0 else mpmath.inf
        ok = lower > 0 and residual < lower * rho and step < rho / 2
        return CertifiedZero(
            location=z,
            residual=residual,
            deriv_lower=max(lower, mpmath.mpf(0)),
            cert_radius=rho,
            status=STATUS_CERTIFIED if ok else STATUS_UNCERTIFIED,
            newton_step=step,
        )


# ---------------------------------------------------------------------------
# the solver
# ---------------------------------------------------------------------------

def default_seeds(q: float, n: int, phase: float = 0.4) -> np.ndarray:
    """Aberth seeds at the moduli the zeros actually occupy (|xi_k| ~ q^-k), spread in angle."""
    k = np.arange(1, n + 1, dtype=float)
    return q ** (-(k - 0.5)) * np.exp(1j * (phase + 2.399963229728653 * k))


def _merge_seeds(q: float, n: int, seeds, phase: float) -> np.ndarray:
    base = default_seeds(q, n, phase)
    if seeds is None:
        return base
    s = np.asarray(list(seeds), dtype=np.complex128).ravel()
    s = s[np.isfinite(s)]
    if s.size >= n:
        return s[np.argsort(np.abs(s))[:n]]
    # fill the missing estimates with the outermost default seeds
    return np.concatenate([s, base[s.size:]])


def _classify_and_polish(q, estimates, prec: PrecisionConfig) -> list:
    """Polish float64 estimates in mp and return a conjugation-closed list of CertifiedZero."""
    reals, uppers = [], []
    tol_same = mpmath.mpf(10) ** (-(prec.target_digits // 2))
    rmax = max((abs(complex(w)) for w in estimates), default=1.0)
    # the polished points carry more digits than the ambient context; keep them exact
    with mp.workdps(_point_dps(float(q), rmax + 1, prec)):
        for w in estimates:
            zeta = None
            if abs(w.imag) <= REAL_SNAP * max(1.0, abs(w)):
                z, ok = _newton_polish(q, w.real, prec, real=True)
                if ok:
                    zeta = mpmath.mpc(z)
            if zeta is None:
                w_up = complex(w.real, abs(w.imag)) if w.imag != 0 else complex(w.real, 1e-8 * abs(w))
                z, ok = _newton_polish(q, w_up, prec, real=False)
                if abs(z.imag) <= tol_same * max(1, abs(z)):
                    z = mpmath.mpc(z.real)
                zeta = z
            target = reals if zeta.imag == 0 else uppers
            if zeta.imag < 0:
                zeta = exact_conj(zeta)
            if any(abs(zeta - o) <= tol_same * max(1, abs(o)) for o in target):
                continue
            target.append(zeta)
    out = []
    for z in reals:
        out.append(certify_zero(q, z, prec))
    for z in uppers:
        c = certify_zero(q, z, prec)
        out.append(c)
        out.append(c.conjugate())
    out.sort(key=lambda c: (float(abs(c.location)), float(c.location.imag)))
    return out


def _dedupe(z: np.ndarray) -> np.ndarray:
    out = []
    for w in z[np.argsort(np.abs(z))]:
        if not any(abs(w - o) <= 1e-9 * max(1.0, abs(o)) for o in out):
            out.append(w)
    return np.array(out, dtype=np.complex128)


def _fill_missing(qf: float, radius: float, known: np.ndarray, n_in: int,
                  rounds: int = 6) -> np.ndarray:
    """Find zeros the first Aberth pass missed.

    theta has infinitely many zeros, so free estimates sometimes settle on
    zeros beyond the circle of interest. Comparing argument-principle counts
    with the found zeros on a ladder of radii shows where zeros are missing;
    fresh estimates are seeded there and iterated with every known zero
    frozen in place (deflating them).
    """
    ladder = np.geomspace(1.0, radius, 40)
    for rnd in range(rounds):
        mods = np.abs(known)
        if (mods < radius).sum() >= n_in:
            break
        seeds = []
        prev_r, prev_def = 1.0, 0
        for r in ladder[1:]:
            deficit = kernels.winding_count(qf, r) - int((mods < r).sum())
            for i in range(max(0, deficit - prev_def)):
                ang = 1.9 + 2.399963229728653 * (len(seeds) + 7 * rnd)
                seeds.append(math.sqrt(prev_r * r) * np.exp(1j * ang))
            prev_r, prev_def = r, max(prev_def, deficit)
        if not seeds:
            break
        z0 = np.concatenate([known, np.array(seeds, dtype=np.complex128)])
        frozen = np.concatenate([np.ones(known.size, bool), np.zeros(len(seeds), bool)])
        z, done, _ = kernels.aberth(qf, z0, max_iter=500, tol=1e-14, clamp=1e6, frozen=frozen)
        new = z[known.size:][done[known.size:]]
        known = _dedupe(np.concatenate([known, new]))
    return known


def find_all_zeros(q: Number, radius: float = DEFAULT_RADIUS,
                   prec: PrecisionConfig = DEFAULT_PRECISION, seeds=None,
                   q_max: float = Q_CEILING, attempts: int = 3) -> ZeroInventory:
    """Every zero of theta(q, .) in |x| < radius, each certified or flagged.

    ``seeds`` (complex estimates, e.g. the zeros at a neighbouring q) warm-start
    the iteration. The inventory is ``complete`` when the number of zeros found
    equals the argument-principle count on |x| = radius.
    """
    qq = parameter(q)
    qf = float(qq)
    if not (1 <= radius <= MAX_RADIUS):
        raise DomainError(f"radius must lie in [1, {MAX_RADIUS}], got {radius}")
    if qf > q_max + 1e-12:
        raise DomainError(f"q={q} exceeds the solver ceiling {q_max}")
    n_in = kernels.winding_count(qf, radius)
    inv = ZeroInventory(qq, radius, [], n_in)
    if n_in == 0:
        return inv
    n_est = max(n_in, kernels.winding_count(qf, ESTIMATE_FACTOR * radius))
    best = None
    for attempt in range(attempts):
        z0 = _merge_seeds(qf, n_est + 4 * attempt, seeds if attempt == 0 else None,
                          0.4 + 0.9 * attempt)
        z, done, sweeps = kernels.aberth(qf, z0, max_iter=500, tol=1e-14, clamp=1e6)
        known = _fill_missing(qf, radius, _dedupe(z[done]), n_in)
        # estimates that never converged are still polished rather than dropped
        stragglers = z[~done]
        cand = np.concatenate([known, stragglers])
        cand = cand[np.abs(cand) < radius * (1 + 1e-9)]
        zeros = [c for c in _classify_and_polish(qq, cand, prec) if abs(c.location) < radius]
        trial = ZeroInventory(qq, radius, zeros, n_in, sweeps)
        if trial.complete:
            return trial
        if best is None or abs(len(trial) - n_in) < abs(len(best) - n_in):
            best = trial
    return best


def count_pairs(q: Number, prec: PrecisionConfig = DEFAULT_PRECISION,
                radius: float = MAX_RADIUS) -> int:
    """Number of conjugate pairs of zeros in |x| < radius (all complex zeros lie well inside 55)."""
    inv = find_all_zeros(q, radius, prec)
    if inv.uncertified:
        raise AmbiguousNearSpectral(
            f"q={q}: {len(inv.uncertified)} zero(s) could not be separated; too close to a spectral value")
    if not inv.complete:
        raise CertificationFailure(
            f"q={q}: found {len(inv)} zeros but the argument principle counts {inv.winding_count}")
    return inv.pair_count


__all__ = ["TruncationPolynomial", "CertifiedZero", "ZeroInventory", "term_modulus",
           "build_truncation", "find_all_zeros", "certify_zero", "count_pairs",
           "default_seeds", "STATUS_CERTIFIED", "STATUS_UNCERTIFIED"]
