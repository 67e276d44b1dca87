"""numpy implementation of the float64 kernels.

Mirrors ``_fast.pyx`` operation for operation; see that module for the
numerical reasoning. Used when the compiled extension is unavailable or
``THETA_ATLAS_PURE=1`` is set.
"""

from __future__ import annotations

import numpy as np

_TINY = 1e-17
_RESCALE_HI = 2.0 ** 300
_RESCALE_LO = 2.0 ** -300


def _series(q: float, x: np.ndarray):
    """theta and theta' by direct summation; x is expected to satisfy |x| <= 2."""
    s = np.zeros_like(x)
    ds = np.zeros_like(x)
    if x.size == 0:
        return s, ds
    rmax = float(np.abs(x).max())
    a = 1.0
    p = np.ones_like(x)
    pm = np.zeros_like(x)
    j = 0
    while True:
        s += a * p
        if j > 0:
            ds += j * a * pm
        pm = p
        p = p * x
        j += 1
        a *= q ** j
        # past q^j r < 1/2 the terms shrink geometrically; stop at float64 noise
        if q ** j * rmax < 0.5 and a * rmax ** j * (j + 1) < 1e-18:
            break
    return s, ds


def theta_scaled(q: float, z):
    """Return (f, df, e) with theta = f * 2**e and theta' = df * 2**e (to float64 accuracy)."""
    z = np.atleast_1d(np.asarray(z, dtype=np.complex128))
    f = np.empty_like(z)
    df = np.empty_like(z)
    e = np.zeros(z.shape, dtype=np.int64)
    r = np.abs(z)
    near = r <= 2.0
    if near.any():
        f[near], df[near] = _series(q, z[near])
    far = ~near
    if far.any():
        x = z[far]
        inv = 1.0 / x
        P = 1.0 + inv
        dP = -inv * inv
        ex = np.zeros(x.shape, dtype=np.int64)
        qm = q
        rmax = float(np.abs(x).max())
        while True:
            f1 = 1.0 - qm
            f2 = 1.0 + x * qm
            f3 = 1.0 + qm * inv
            fac = f1 * f2 * f3
            dfac = f1 * (qm * f3 - f2 * qm * inv * inv)
            dP = dP * fac + P * dfac
            P = P * fac
            m = np.abs(P)
            big = (m > _RESCALE_HI) | ((m < _RESCALE_LO) & (m > 0))
            if big.any():
                _, k = np.frexp(m[big])
                P[big] = np.ldexp(1.0, -k) * P[big]
                dP[big] = np.ldexp(1.0, -k) * dP[big]
                ex[big] += k
            if qm * rmax < _TINY:
                break
            qm *= q
        g, dg = _series(q, inv)
        G = g * inv
        dG = -(dg * inv + g) * inv * inv
        pos = ex > 0
        # e > 0: |Theta*| > 2^300 and G (|G| < 1 here) only enters at scale 2^-e
        down = np.ldexp(1.0, -np.clip(ex, 0, 1100))
        up = np.ldexp(1.0, np.clip(ex, -1100, 0))
        f[far] = np.where(pos, P - G * down, P * up - G)
        df[far] = np.where(pos, dP - dG * down, dP * up - dG)
        e[far] = np.where(pos, ex, 0)
    return f, df, e


def newton_ratio(q: float, z):
    f, df, _ = theta_scaled(q, z)
    with np.errstate(divide="ignore", invalid="ignore"):
        return f / df


def aberth(q: float, z0, max_iter: int = 500, tol: float = 1e-14, clamp: float = 1e6,
           frozen=None):
    """Simultaneous (Aberth-Ehrlich) iteration, Jacobi sweeps.

    Returns (z, converged, sweeps). Estimates that leave |z| <= clamp or turn
    non-finite are re-seeded on the circle |z| = clamp / 2. Entries marked in
    ``frozen`` are known zeros: they never move but still repel the others.
    """
    z = np.array(z0, dtype=np.complex128, copy=True)
    n = z.size
    done = np.zeros(n, dtype=bool)
    if frozen is not None:
        done[:] = np.asarray(frozen, dtype=bool).ravel()
    sweeps = 0
    if n == 0 or done.all():
        return z, done, 0
    for sweeps in range(1, max_iter + 1):
        idx = np.nonzero(~done)[0]
        ratio = newton_ratio(q, z[idx])
        diff = z[idx, None] - z[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            inv = np.where(np.abs(diff) > 1e-300, 1.0 / diff, 0.0)
            s = inv.sum(axis=1)
            corr = ratio / (1.0 - ratio * s)
        znew = z[idx] - corr
        bad = ~np.isfinite(znew) | (np.abs(znew) > clamp)
        if bad.any():
            ang = 0.7 + 2.399963229728653 * idx[bad]
            znew[bad] = 0.5 * clamp * np.exp(1j * ang)
        conv = (~bad) & (np.abs(corr) <= tol * np.maximum(1.0, np.abs(znew)))
        z[idx] = znew
        done[idx[conv]] = True
        if done.all():
            break
    return z, done, sweeps
