"""Float64 hot kernels with a compiled core and a numpy fallback.

The compiled extension ``_fast`` is used when it imports; setting
``THETA_ATLAS_PURE=1`` forces the numpy implementation. ``BACKEND`` names the
active one. Both expose:

* ``theta_scaled(q, z) -> (f, df, e)`` with theta = f 2^e, theta' = df 2^e
* ``newton_ratio(q, z) -> theta / theta'``
* ``aberth(q, z0, max_iter, tol, clamp, frozen) -> (z, converged, sweeps)``

``winding_count`` is built on top of ``theta_scaled`` and works with either.
"""

from __future__ import annotations

import math
import os

import numpy as np

from . import _fallback

fallback = _fallback

if os.environ.get("THETA_ATLAS_PURE", "") not in ("", "0"):
    _impl = _fallback
    BACKEND = "numpy"
else:
    try:
        from . import _fast as _impl  # type: ignore[attr-defined]
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "numpy"

theta_scaled = _impl.theta_scaled
newton_ratio = _impl.newton_ratio
aberth = _impl.aberth


def winding_count(q: float, radius: float, samples: int = 256, max_rounds: int = 40) -> int:
    """Number of zeros of theta(q, .) in |x| < radius, by the argument principle.

    theta is real on the real axis, so the upper semicircle carries half of
    the argument change. Segments whose argument step exceeds pi/3 are split
    until every step is small enough to unwrap unambiguously.
    """
    t = np.linspace(0.0, math.pi, samples + 1)
    f = theta_scaled(q, radius * np.exp(1j * t))[0]
    for _ in range(max_rounds):
        step = np.angle(f[1:] / f[:-1])
        bad = np.nonzero(np.abs(step) > math.pi / 3)[0]
        if bad.size == 0:
            break
        tm = 0.5 * (t[bad] + t[bad + 1])
        fm = theta_scaled(q, radius * np.exp(1j * tm))[0]
        t = np.insert(t, bad + 1, tm)
        f = np.insert(f, bad + 1, fm)
    else:
        raise ArithmeticError(f"winding count did not resolve on |x| = {radius} (q = {q})")
    total = 2.0 * np.angle(f[1:] / f[:-1]).sum() / (2.0 * math.pi)
    n = int(round(total))
    if abs(total - n) > 0.05:
        raise ArithmeticError(f"non-integral winding {total:.3f} on |x| = {radius} (q = {q})")
    return n


def compiled():
    """The compiled module, or None when it is not built."""
    try:
        from . import _fast  # type: ignore[attr-defined]
    except ImportError:
        return None
    return _fast


__all__ = ["BACKEND", "theta_scaled", "newton_ratio", "aberth", "fallback", "compiled",
           "winding_count"]
