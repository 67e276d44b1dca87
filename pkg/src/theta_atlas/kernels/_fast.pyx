# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled float64 kernels: factored theta evaluation and Aberth sweeps.

For |x| <= 2 theta is summed directly (terms stay below ~1e2 in modulus for
q <= 0.95, so little cancellation). For |x| > 2 we use theta = Theta* - G with
Theta* from the triple product and G = theta(q, 1/x)/x, which avoids the
catastrophic cancellation of the power series far from the origin. The
product is renormalised by powers of two so it never overflows; callers
receive (f, df, e) with theta = f * 2**e.
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, frexp, ldexp, sin, cos, isfinite, sqrt

cnp.import_array()

cdef double RESCALE_HI = 2.0 ** 300
cdef double RESCALE_LO = 2.0 ** -300


cdef inline double cmod(double complex z) nogil:
    return sqrt(z.real * z.real + z.imag * z.imag)


cdef inline void _series(double q, double complex x, double complex* s_out,
                         double complex* ds_out) nogil:
    cdef double complex s = 0, ds = 0, p = 1, pm = 0
    cdef double a = 1.0, r = cmod(x), qj = 1.0, rj = 1.0
    cdef int j = 0
    while True:
        s = s + a * p
        if j > 0:
            ds = ds + j * a * pm
        pm = p
        p = p * x
        j += 1
        qj = qj * q
        a = a * qj
        rj = rj * r
        if qj * r < 0.5 and a * rj * (j + 1) < 1e-18:
            break
    s_out[0] = s
    ds_out[0] = ds


cdef inline long _theta_scaled(double q, double complex x, double complex* f,
                               double complex* df) nogil:
    cdef double r = cmod(x)
    cdef double complex P, dP, inv, f2, f3, fac, dfac, g, dg, G, dG
    cdef double qm, f1, m, mant
    cdef int k
    cdef long ex = 0
    if r <= 2.0:
        _series(q, x, f, df)
        return 0
    inv = 1.0 / x
    P = 1.0 + inv
    dP = -inv * inv
    qm = q
    while True:
        f1 = 1.0 - qm
        f2 = 1.0 + x * qm
        f3 = 1.0 + qm * inv
        fac = f1 * f2 * f3
        dfac = f1 * (qm * f3 - f2 * qm * inv * inv)
        dP = dP * fac + P * dfac
        P = P * fac
        m = cmod(P)
        if m > RESCALE_HI or (m < RESCALE_LO and m > 0):
            mant = frexp(m, &k)
            P = P * ldexp(1.0, -k)
            dP = dP * ldexp(1.0, -k)
            ex += k
        if qm * r < 1e-17:
            break
        qm = qm * q
    _series(q, inv, &g, &dg)
    G = g * inv
    dG = -(dg * inv + g) * inv * inv
    if ex > 0:
        # |Theta*| > 2^300 while |G| < 1: G only enters at scale 2^-ex
        if ex < 1100:
            f[0] = P - G * ldexp(1.0, <int>-ex)
            df[0] = dP - dG * ldexp(1.0, <int>-ex)
        else:
            f[0] = P
            df[0] = dP
        return ex
    if ex < -1100:
        ex = -1100
    f[0] = P * ldexp(1.0, <int>ex) - G
    df[0] = dP * ldexp(1.0, <int>ex) - dG
    return 0


def theta_scaled(double q, z):
    """Return (f, df, e) with theta = f * 2**e and theta' = df * 2**e."""
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] zz = np.ascontiguousarray(
        np.atleast_1d(np.asarray(z, dtype=np.complex128)).ravel())
    cdef Py_ssize_t n = zz.shape[0], i
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] f = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] df = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] e = np.empty(n, dtype=np.int64)
    cdef double complex fv, dfv
    with nogil:
        for i in range(n):
            e[i] = _theta_scaled(q, zz[i], &fv, &dfv)
            f[i] = fv
            df[i] = dfv
    return f, df, e


def newton_ratio(double q, z):
    f, df, _ = theta_scaled(q, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        return f / df


def aberth(double q, z0, int max_iter=500, double tol=1e-14, double clamp=1e6, frozen=None):
    """Simultaneous (Aberth-Ehrlich) iteration, Jacobi sweeps.

    Returns (z, converged, sweeps). Estimates that leave |z| <= clamp or turn
    non-finite are re-seeded on the circle |z| = clamp / 2. Entries marked in
    ``frozen`` are known zeros: they never move but still repel the others.
    """
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] z = np.array(z0, dtype=np.complex128, copy=True).ravel()
    cdef Py_ssize_t n = z.shape[0], i, j
    cdef cnp.ndarray[cnp.complex128_t, ndim=1] znew = np.empty(n, dtype=np.complex128)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] done = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] conv = np.zeros(n, dtype=np.uint8)
    cdef double complex fv, dfv, ratio, s, d, corr, zi
    cdef double ang, az
    cdef int sweeps = 0, all_done
    if frozen is not None:
        done[:] = np.asarray(frozen, dtype=np.uint8).ravel()
    if n == 0:
        return z, done.astype(bool), 0
    with nogil:
        for sweeps in range(1, max_iter + 1):
            for i in range(n):
                conv[i] = 0
                if done[i]:
                    znew[i] = z[i]
                    continue
                zi = z[i]
                _theta_scaled(q, zi, &fv, &dfv)
                ratio = fv / dfv
                s = 0
                for j in range(n):
                    if j == i:
                        continue
                    d = zi - z[j]
                    if cmod(d) > 1e-300:
                        s = s + 1.0 / d
                corr = ratio / (1.0 - ratio * s)
                znew[i] = zi - corr
                az = cmod(znew[i])
                if not (isfinite(znew[i].real) and isfinite(znew[i].imag)) or az > clamp:
                    ang = 0.7 + 2.399963229728653 * i
                    znew[i] = 0.5 * clamp * (cos(ang) + 1j * sin(ang))
                elif cmod(corr) <= tol * (az if az > 1.0 else 1.0):
                    conv[i] = 1
            all_done = 1
            for i in range(n):
                z[i] = znew[i]
                if conv[i]:
                    done[i] = 1
                if not done[i]:
                    all_done = 0
            if all_done:
                break
    return z, done.astype(bool), sweeps
