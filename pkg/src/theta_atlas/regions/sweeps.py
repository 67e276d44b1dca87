"""Theorem-verification sweeps over q grids.

Each grid point gets a full zero inventory in |x| < radius_cap. Inventories
are cached per (q, radius, precision) so T1 and T3 on the same grid share
them, and consecutive grid points warm-start each other. With more than one
worker the grid is cut into contiguous chunks (one process each, warm starts
within a chunk); results are merged back in ascending q.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import mpmath

from ..complexzeros import MAX_RADIUS, Q_CEILING, ZeroInventory, find_all_zeros
from ..errors import DomainError
from ..series import DEFAULT_PRECISION, PrecisionConfig
from . import geometry as geo

T1, T2B, T3 = "T1", "T2b", "T3"
THEOREMS = (T1, T2B, T3)
T2B_Q_MAX = 0.2 ** 0.25
T3_RADIUS = 49.8

_CACHE: dict = {}


@dataclass
class RegionReport:
    theorem: str
    region: geo.Region
    q_grid: list
    radius_cap: float
    zero_inventory: dict = field(default_factory=dict)
    violations: list = field(default_factory=list)
    warnings: list = field(default_factory=list)
    worst_margin: float | None = None
    worst_margin_q: float | None = None
    max_modulus_right: float | None = None
    max_modulus_left: float | None = None
    katsnelson_outside: list = field(default_factory=list)
    e_plus_outside: list = field(default_factory=list)
    q_ceiling: float = Q_CEILING

    @property
    def passed(self) -> bool:
        return not self.violations

    @property
    def zeros_checked(self) -> int:
        return sum(1 for q in self.q_grid for z in self.zero_inventory[q] if z.imag != 0)


def threads() -> int:
    env = os.environ.get("THETA_ATLAS_THREADS")
    if env:
        return max(1, int(env))
    return max(1, os.cpu_count() or 1)


def _key(q: float, radius: float, prec: PrecisionConfig):
    return (round(q, 12), float(radius), prec.target_digits, prec.working_digits)


def _chunk(qs: list, radius: float, prec: PrecisionConfig) -> list:
    out = []
    seeds = None
    for q in qs:
        inv = find_all_zeros(q, radius, prec, seeds=seeds)
        seeds = inv.as_complex() if len(inv) else None
        out.append(inv)
    return out


def inventories(q_grid, radius: float = MAX_RADIUS, prec: PrecisionConfig = DEFAULT_PRECISION,
                workers: int | None = None) -> dict:
    """ZeroInventory for every q in the grid (cached, deterministic order)."""
    qs = [float(q) for q in q_grid]
    todo = [q for q in qs if _key(q, radius, prec) not in _CACHE]
    workers = min(workers or threads(), max(1, len(todo)))
    if todo:
        if workers == 1:
            results = _chunk(todo, radius, prec)
        else:
            size = math.ceil(len(todo) / workers)
            chunks = [todo[i:i + size] for i in range(0, len(todo), size)]
            with ProcessPoolExecutor(max_workers=workers) as pool:
                parts = pool.map(_chunk, chunks, [radius] * len(chunks), [prec] * len(chunks))
                results = [inv for part in parts for inv in part]
        for q, inv in zip(todo, results):
            _CACHE[_key(q, radius, prec)] = inv
    return {q: _CACHE[_key(q, radius, prec)] for q in qs}


def clear_cache():
    _CACHE.clear()


def verify_theorem(theorem_id: str, q_grid, radius_cap: float = MAX_RADIUS,
                   prec: PrecisionConfig = DEFAULT_PRECISION,
                   workers: int | None = None) -> RegionReport:
    """Check one zero-location theorem on every grid point.

    T1:  complex zeros with Re >= 0 lie in the half-annulus 1 < |x| < 5.
    T2b: for q <= 0.2^{1/4} no zero has Re >= 0.
    T3:  complex zeros with Re < 0 satisfy |x| < 49.8.
    """
    if theorem_id not in THEOREMS:
        raise DomainError(f"unknown theorem {theorem_id!r}; expected one of {THEOREMS}")
    qs = sorted(float(q) for q in q_grid)
    if not qs:
        raise DomainError("empty q grid")
    if qs[0] <= 0 or qs[-1] > Q_CEILING + 1e-12:
        raise DomainError(f"q grid must lie in (0, {Q_CEILING}]")
    if radius_cap > MAX_RADIUS:
        raise DomainError(f"radius_cap must be <= {MAX_RADIUS}")
    if theorem_id == T2B and qs[-1] > T2B_Q_MAX:
        raise DomainError(f"T2b only concerns q <= 0.2^(1/4) = {T2B_Q_MAX:.10f}")

    region = {T1: geo.half_annulus_A(), T2B: geo.Region(geo.LEFT_HALF_DISK, {"radius": radius_cap}),
              T3: geo.left_half_disk(T3_RADIUS)}[theorem_id]
    invs = inventories(qs, radius_cap, prec, workers)
    rep = RegionReport(theorem_id, region, qs, radius_cap)
    kats = geo.katsnelson_interior()
    eplus = geo.domain_E_plus()
    for q in qs:
        inv: ZeroInventory = invs[q]
        rep.zero_inventory[q] = inv.zeros
        if not inv.complete:
            rep.warnings.append((q, f"found {len(inv)} of {inv.winding_count} zeros"))
        for z in inv.uncertified:
            rep.warnings.append((q, f"uncertified zero near {mpmath.nstr(z.location, 10)}"))
        for z in inv.zeros:
            w = complex(z.location)
            if w.imag == 0:
                # the theorems concern conjugate pairs; real zeros are all < -5
                continue
            mod = abs(w)
            if w.real >= 0:
                rep.max_modulus_right = max(rep.max_modulus_right or 0.0, mod)
            else:
                rep.max_modulus_left = max(rep.max_modulus_left or 0.0, mod)
            if not kats.contains(w) and q >= 0.32:
                rep.katsnelson_outside.append((q, w))
            if not eplus.contains(w):
                rep.e_plus_outside.append((q, w))
            if theorem_id == T1:
                if w.real < 0:
                    continue
                m = region.margin(w)
                bad = not region.contains(w)
            elif theorem_id == T2B:
                m = -w.real
                bad = w.real >= 0
            else:
                if w.real >= 0:
                    continue
                m = region.margin(w)
                bad = not region.contains(w)
            if rep.worst_margin is None or m < rep.worst_margin:
                rep.worst_margin, rep.worst_margin_q = m, q
            if bad and w.imag > 0:
                rep.violations.append((q, w))
    return rep


__all__ = ["RegionReport", "THEOREMS", "T1", "T2B", "T3", "T2B_Q_MAX", "T3_RADIUS",
           "verify_theorem", "inventories", "clear_cache", "threads"]
